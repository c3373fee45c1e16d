#ifndef BMG_DIRECTIONS_HPP
#define BMG_DIRECTIONS_HPP

#include <gmpxx.h>

#include <mutex>
#include <string>
#include <vector>

#include "bmg/element.hpp"
#include "bmg/perm.hpp"
#include "bmg/tree.hpp"

namespace bmg {

struct Caps;  // scale.hpp

enum class Verdict { Equal, NotEqual, Unknown };

// Equal and NotEqual carry a machine-checkable certificate kind; Unknown
// records the exhausted depth.
struct ThreeValued {
  Verdict verdict = Verdict::Unknown;
  int depth = 0;
  std::string certificate;

  bool is_equal() const { return verdict == Verdict::Equal; }
  bool is_not_equal() const { return verdict == Verdict::NotEqual; }
  bool is_unknown() const { return verdict == Verdict::Unknown; }
};

std::string verdict_str(Verdict v);

// lambda_g(v) = lim sigma(g^n, g^-n(v)) F together with the minimal
// threshold H_g(v) from which the coset is constant.
std::pair<LambdaCoset, int> lambda_coset(const Elem& g, const Vertex& v);

// The support window: vertices of the forward singular orbit, up to the
// forward escape index plus `extra`, whose lambda coset is non-trivial.
std::set<Vertex> lambda_support(const Elem& g, int extra = 0);

// Sparse lambda table built lazily per element.
class LambdaTable {
public:
  explicit LambdaTable(const Elem& g) : g_(&g) {}
  std::pair<LambdaCoset, int> at(const Vertex& v) const;
  const Elem& owner() const { return *g_; }

private:
  const Elem* g_;
  mutable std::mutex mu_;
  mutable std::map<Vertex, std::pair<LambdaCoset, int>> cache_;
};

// Minimal complete subtree containing e and g^-1(e) as edges with S(g)
// internal, and its interior size; the length function of the cube-complex
// action.
CompleteSubtree tree_T_e(const Elem& g, const EdgeRef& e);
std::size_t N_e(const Elem& g, const EdgeRef& e);
// Number of distinct lengths of paths from e to non-internal vertices.
std::size_t p_e(const Elem& g, const EdgeRef& e);

// omega_+(g) = omega_+(h)?  NotEqual certificates: "orientation" (opposite
// order on a shared segment), "divergence" (distance to axis(h) strictly
// increased, permanent by convexity), or "axis-gap" (axes disjoint).
// depth <= 0 selects the default budget.
ThreeValued ends_equal(const Elem& g, const Elem& h, int depth = 0);
// Handle form: compares the denoted ends (omega_- handles compare through
// the carrier's inverse).
ThreeValued ends_equal(const EndHandle& a, const EndHandle& b, int depth = 0);

// lambda_g == lambda_h everywhere; exact on the support windows with a
// forward-tail certificate.  Throws cap_exceeded only when the certificate
// cannot stabilise within the budget.
bool weakly_asymptotic(const Elem& g, const Elem& h);

// Asymptotic relation: weakly asymptotic plus equal attracting ends.
// Requires a 2-transitive F; three-valued through the end test.
ThreeValued asymptotic(const Elem& g, const Elem& h, int depth = 0);

// The sequence N_e(g^{-pn} h^{qn}) for n = 1..n_max.
std::vector<std::size_t> length_diagnostic(const Elem& g, const Elem& h, int p,
                                           int q, int n_max, const EdgeRef& e);

// Lower bound on the direction pseudometric for non-asymptotic pairs:
// log(d-1) * (l(g)/log s(g) + l(h)/log s(h)).  Exact rational when both
// scales are powers of d-1 (always the case for 2-transitive F).
struct DirectionGapBound {
  int omega_minus_one;
  int l_g, l_h;
  mpz_class s_g, s_h;
  std::optional<mpq_class> exact;
  double value;
};
// Absent when the pair is certified asymptotic (the bound is inapplicable).
std::optional<DirectionGapBound> direction_gap_bound(const Elem& g, const Elem& h);

} // namespace bmg

#endif
