#ifndef BMG_SCALE_HPP
#define BMG_SCALE_HPP

#include <gmpxx.h>

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bmg/element.hpp"

namespace bmg {

// Exact positive integer (indices, scale values).
using Index = mpz_class;

struct Caps {
  std::size_t max_internal = 64;       // |Int| of enumerated trees
  std::size_t max_nodes = 10000000;    // backtracking / DP node budget
  int max_depth = 64;
};

// A finite complete subtree around the axis that controls the singularities
// of its owner; the compact open subgroup U_P it defines is tidy above.
struct Pando {
  Elem owner;
  CompleteSubtree tree;
  int depth;                        // D used (strictly above the owner's D_g)
  std::pair<Vertex, Vertex> axis_window;  // v0, v1
};

// Builds the band pando of the given depth (default D_g + 1) with the
// tightest admissible axis window, and machine-checks P1-P3.
Pando make_pando(const Elem& g, std::optional<int> depth = std::nullopt,
                 const Caps& caps = {});
void validate_pando(const Pando& p);

// The initial segment P0: smallest complete subtree containing P \ g(P).
CompleteSubtree initial_segment(const Pando& p);

// [U_small : U_big] = number of distinct restrictions to `big` of
// U(F)-elements fixing `small` pointwise, as an exact per-vertex product.
// `big` is any finite connected vertex set containing the small tree.
Index fixator_index(const std::set<Vertex>& big, const CompleteSubtree& small,
                    const PermGroup& F);

// w U_C w^-1 (pointwise), or w U_{{e}} w^-1 when setwise_edge is set (then
// `fixed` must be a single edge).
struct Fixator {
  CompleteSubtree fixed;
  std::optional<Elem> conjugator;
  bool setwise_edge = false;
};

// Exhaustive backtracking count of distinct restrictions of members of A to
// the vertices of T.  The oracle route: no product shortcuts.
Index restriction_count(const Fixator& A, const CompleteSubtree& T,
                        const GroupCtxPtr& ctx, const Caps& caps = {});

// Membership of a concrete element in a fixator subgroup (exact).
bool fixator_contains(const Fixator& A, const Elem& u);

// ([U : U n V], [V : U n V]) by finite class enumeration.
std::pair<Index, Index> cos_distance(const Fixator& U, const Fixator& V,
                                     const GroupCtxPtr& ctx, const Caps& caps = {});

// Whether every member of U_small lies in A, decided on class representatives
// modulo a deep enough pointwise fixator.
bool fixator_subgroup_leq(const CompleteSubtree& small_fixed, const Fixator& A,
                          const GroupCtxPtr& ctx, const Caps& caps = {});

// The M-set: automorphisms of a finite tree fixing axis(g) within it whose
// local actions satisfy the stabilised double-coset condition.
enum class MMode {
  PandoInitial,          // condition at the forward-escape threshold
  FlexPastSingularities  // condition via lambda-trajectory cosets
};

Index count_M(const Elem& g, const CompleteSubtree& T, MMode mode,
              const Caps& caps = {});
// Explicit enumeration for small instances; each automorphism as a vertex map.
std::vector<std::map<Vertex, Vertex>> enumerate_M(const Elem& g,
                                                  const CompleteSubtree& T,
                                                  MMode mode,
                                                  const Caps& caps = {});

// s(g): 1 for elliptic, else the pando formula numerator / |M| with exact
// divisibility asserted.
Index scale(const Elem& g, const Caps& caps = {});

struct ScaleBreakdown {
  Index value;
  Index numerator;
  Index m_size;
  std::size_t pando_internal;
};
ScaleBreakdown scale_breakdown(const Elem& g, const Caps& caps = {});

// Closed form for hyperbolic g in U(F): product of stabiliser index factors
// along one fundamental domain of the axis colour sequence.
Index scale_closed_form_uf(const Elem& g);

// Flexible window form; requires a 2-transitive F, v0 on the axis strictly
// past every singular projection, and depth > D_g.
Index scale_flex(const Elem& g, const Vertex& v0, int depth,
                 const Caps& caps = {});

// Delta(g) = s(g) / s(g^-1) as an exact rational.
mpq_class modular(const Elem& g, const Caps& caps = {});

// When F lacks distinct point stabilisers: a hyperbolic element of U(F) with
// identity local actions along its axis and scale 1.  Absent otherwise.
std::optional<Elem> uniscalar_witness(const GroupCtxPtr& ctx);

// Prop U(F)_small_scale recipe: h in U(F) agreeing with g on an initial
// segment chosen past the singularities; l(h) = l(g) and s(h) <= s(g).
Elem dominating_uf_element(const Elem& g, const Caps& caps = {});

} // namespace bmg

#endif
