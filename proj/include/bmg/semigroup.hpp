#ifndef BMG_SEMIGROUP_HPP
#define BMG_SEMIGROUP_HPP

#include <string>
#include <vector>

#include "bmg/directions.hpp"
#include "bmg/element.hpp"
#include "bmg/scale.hpp"

namespace bmg {

// Order agreement on shared axes; exact (Unknown is never produced, the
// overlap analysis is finite).
ThreeValued translation_compatible(const Elem& g, const Elem& h, int depth = 0);

// The branch-off element g_v: asymptotic to g, same translation length, and
// its axis meets axis(g) exactly in {u : u >=_g v}.  Requires a 2-transitive
// F, l(g) > D_g, and v on the axis strictly past every singular projection.
Elem shift_element(const Elem& g, const Vertex& v, const Caps& caps = {});

// Membership in the stabiliser of the direction of g: fixes omega_+(g) and
// intertwines lambda_g.  Three-valued through the end test.
ThreeValued in_direction_stabilizer(const Elem& x, const Elem& g, int depth = 0);

// Membership in G(F,F')_{+dg}: hyperbolic members are the asymptotic class,
// elliptic members the (automatically uniscalar) direction stabiliser.
ThreeValued in_plus_semigroup(const Elem& x, const Elem& g, int depth = 0);

// Words over the generators up to a bounded length, with cached scales.
struct SemigroupSample {
  std::vector<Elem> generators;
  std::vector<Elem> products;
  std::vector<Index> scales;

  static SemigroupSample generate(const std::vector<Elem>& generators,
                                  int word_len, const Caps& caps = {});
};

struct MultReportLine {
  std::size_t i, j;
  Index s_product, s_lhs_rhs;
  bool multiplicative;
  std::string str() const;
};

struct MultReport {
  bool multiplicative = true;
  std::vector<MultReportLine> lines;
};

// Tests s(w1 w2) = s(w1) s(w2) over sampled pairs of products; stops at the
// first counterexample.
MultReport check_scale_multiplicative(const SemigroupSample& S,
                                      std::size_t max_pairs, std::uint64_t seed,
                                      const Caps& caps = {});

// The engineered same-attracting-end failure: given non-asymptotic g, h with
// omega_+(g) = omega_+(h), returns (g_l, h) with s(g_l h) > s(g_l) s(h).
std::pair<Elem, Elem> same_end_nonmult_pair(const Elem& g, const Elem& h,
                                            const Caps& caps = {});

} // namespace bmg

#endif
