#ifndef BMG_ELEMENT_HPP
#define BMG_ELEMENT_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "bmg/perm.hpp"
#include "bmg/tree.hpp"

namespace bmg {

// The ambient data of G(F, F'): tree degree, the default group F and the
// allowed local group F'.  F' is intersected with the Young subgroup of F at
// construction so that the canonical F-default extension always exists.
struct GroupContext {
  int degree;
  PermGroup F;
  PermGroup Fprime;        // already trimmed to F' n F^
  bool fprime_trimmed;     // true if the trim removed anything

  static std::shared_ptr<const GroupContext> make(int degree, PermGroup F,
                                                  PermGroup Fprime);
};

using GroupCtxPtr = std::shared_ptr<const GroupContext>;

// A finite portrait: base u -> image u', consistent local permutations on a
// complete subtree A containing u, and the canonical lex-minimal F-default
// beyond A.  Denotes a unique automorphism of the tree.
class Portrait {
public:
  // `locals` may be partial on V(A); missing entries are materialised with
  // the default rule walking outward from the base.  Throws on inconsistent
  // data or locals outside F'.
  Portrait(GroupCtxPtr ctx, Vertex base, Vertex image, CompleteSubtree support,
           std::map<Vertex, Perm> locals);

  const GroupCtxPtr& ctx() const { return ctx_; }
  const Vertex& base() const { return base_; }
  const Vertex& image() const { return image_; }
  const CompleteSubtree& support() const { return support_; }
  const std::map<Vertex, Perm>& locals() const { return locals_; }

  Vertex eval(const Vertex& v) const;
  Perm local_action(const Vertex& v) const;
  Vertex eval_inverse(const Vertex& v) const;
  Perm local_action_inverse(const Vertex& v) const;  // sigma(g^-1, v)

  // Vertices of the support whose local action lies outside F.
  const std::set<Vertex>& singular_support() const { return singular_; }

private:
  struct State {
    Vertex image;
    Perm sigma;
  };
  const State& forward_state(const Vertex& v) const;
  const State& backward_state(const Vertex& v) const;  // of preimage, keyed by image-side vertex

  GroupCtxPtr ctx_;
  Vertex base_, image_;
  CompleteSubtree support_;
  std::map<Vertex, Perm> locals_;
  std::set<Vertex> singular_;

  mutable std::mutex mu_;
  mutable std::map<Vertex, State> fwd_;
  mutable std::map<Vertex, State> bwd_;
};

using PortraitPtr = std::shared_ptr<const Portrait>;

enum class Kind { Elliptic, Hyperbolic };

struct Classification {
  Kind kind = Kind::Elliptic;
  int length = 0;                       // l(g)
  Vertex axis_base;                     // on axis (hyperbolic), fixed vertex (elliptic)
  std::optional<EdgeRef> inverted_edge; // elliptic with no fixed vertex
};

// A group element as a signed word of portraits.  word[0] acts first.
// Immutable; evaluation and classification are memoised internally.
class Elem {
public:
  struct Letter {
    PortraitPtr portrait;
    int sign;  // +1 or -1
  };

  Elem(GroupCtxPtr ctx, std::vector<Letter> word);
  Elem(const Elem& other);
  Elem(Elem&& other) noexcept;
  Elem& operator=(const Elem& other);
  Elem& operator=(Elem&& other) noexcept;

  static Elem identity(GroupCtxPtr ctx);
  static Elem from_portrait(PortraitPtr p);

  const GroupCtxPtr& ctx() const { return ctx_; }
  const std::vector<Letter>& word() const { return word_; }

  Vertex eval(const Vertex& v) const;
  Perm local_action(const Vertex& v) const;
  Vertex eval_inverse(const Vertex& v) const;
  Vertex eval_power(int n, const Vertex& v) const;       // g^n(v), any sign
  Perm local_action_power(int n, const Vertex& v) const; // sigma(g^n, v)

  Elem inverse() const;
  Elem then(const Elem& outer) const;  // outer * this (this acts first)
  Elem power(int n) const;
  Elem conjugated_by(const Elem& x) const;  // x g x^-1

  const Classification& classify() const;
  bool is_hyperbolic() const { return classify().kind == Kind::Hyperbolic; }
  int length() const { return classify().length; }

  // Axis machinery (hyperbolic only).
  int dist_to_axis(const Vertex& v) const;      // (d(v,gv) - l)/2
  Vertex project_to_axis(const Vertex& v) const;
  bool axis_order_leq(const Vertex& u, const Vertex& v) const;  // u <=_g v, both on axis
  bool on_axis(const Vertex& v) const;
  // Signed coordinate along the axis; axis_base has position 0, positive in
  // the translation direction.
  long axis_position(const Vertex& u) const;
  Vertex axis_vertex(long position) const;

  // Exact finite singular set and its depth D_g (0 when empty).
  const std::set<Vertex>& singularities() const;
  int sing_depth() const;
  // max/min axis position of projections of singularities; nullopt if S empty.
  std::optional<long> max_sing_projection() const;
  std::optional<long> min_sing_projection() const;
  // Smallest j0 >= 0 with g^j(v) not in S(g) for all j >= j0.
  int forward_escape(const Vertex& v) const;
  // Smallest m0 >= 0 with g^-m(v) not in S(g) for all m >= m0.
  int backward_escape(const Vertex& v) const;

  struct MembershipReport {
    bool member = true;
    std::size_t singular_count = 0;
    std::set<Vertex> singular;
  };
  MembershipReport validate_membership() const;

  // Semantic equality on a radius-r ball around both base points plus
  // sigma-comparison on the joint singular candidates.  Sound and complete
  // on the certified ball only.
  bool equal_on_ball(const Elem& other, int radius) const;

private:
  Vertex letter_eval(std::size_t i, const Vertex& v) const;
  Vertex letter_eval_inv(std::size_t i, const Vertex& v) const;
  Perm letter_local(std::size_t i, const Vertex& v) const;
  Perm letter_local_inv(std::size_t i, const Vertex& v) const;
  Vertex start_vertex() const;

  GroupCtxPtr ctx_;
  std::vector<Letter> word_;

  mutable std::mutex mu_;
  mutable std::optional<Classification> classification_;
  mutable std::optional<std::set<Vertex>> singular_;
  mutable std::map<long, Vertex> axis_cache_;
};

// Direction handle: omega_+(g) for sign = +1, omega_-(g) for sign = -1.
struct EndHandle {
  const Elem* carrier;
  int sign;

  // The element whose forward end this handle denotes (carrier or inverse).
  Elem oriented() const { return sign > 0 ? *carrier : carrier->inverse(); }
};

// Derived constructors ------------------------------------------------------

// Element from a consistent local prescription on a complete subtree.
Elem from_consistent_set(GroupCtxPtr ctx, const CompleteSubtree& A,
                         const std::map<Vertex, Perm>& locals, const Vertex& u,
                         const Vertex& u_prime);

// Translation of length 1 whose axis follows the given colour cycles around
// the root: ..., b1, b0, root, f0, f1, ... (forward cycle repeats forward,
// backward cycle repeats backward).  Requires a 2-transitive F and cycles
// whose default continuation reproduces them; throws invalid_input when the
// requested path is not realisable with the canonical defaults.
Elem translation_along(GroupCtxPtr ctx, const std::vector<colour>& backward_cycle,
                       const std::vector<colour>& forward_cycle);

// The usual workhorse: length-1 translation along the 0,1-alternating line.
Elem standard_translation(GroupCtxPtr ctx);

// standard_translation when the alternating line is realisable, else the
// 0,1,...,d-1 periodic line (which works for the cyclic groups).
Elem default_translation(GroupCtxPtr ctx);

// Elliptic rotation about `center`: local action tau there, consistent
// F-defaults elsewhere.  tau may lie in F' \ F (a planted singularity).
Elem rotation_about(GroupCtxPtr ctx, const Vertex& center, const Perm& tau);

} // namespace bmg

#endif
