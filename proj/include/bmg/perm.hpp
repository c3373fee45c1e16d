#ifndef BMG_PERM_HPP
#define BMG_PERM_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmg/errors.hpp"

namespace bmg {

using colour = std::uint8_t;

constexpr int kMaxDegree = 12;

// A permutation of the colour set {0,...,d-1} in one-line notation.
// images_[i] is the image of colour i.
class Perm {
public:
  Perm() : deg_(0) { images_.fill(0); }

  static Perm identity(int deg);
  static Perm from_images(const std::vector<int>& images);

  int degree() const { return deg_; }
  colour operator[](colour c) const { return images_[c]; }
  colour apply(colour c) const { return images_[c]; }

  Perm after(const Perm& rhs) const;  // (*this) o rhs: first rhs, then this
  Perm inverse() const;

  bool is_identity() const;
  bool operator==(const Perm& o) const {
    return deg_ == o.deg_ && images_ == o.images_;
  }
  bool operator!=(const Perm& o) const { return !(*this == o); }
  // Lexicographic order on image tuples; the canonical order everywhere.
  bool operator<(const Perm& o) const;

  std::string str() const;  // space-separated image list, e.g. "1 2 0"

private:
  std::array<colour, kMaxDegree> images_;
  int deg_;
};

// A finite permutation group on {0,...,d-1}, fully enumerated.
// Immutable after construction; safe to share across threads.
class PermGroup {
public:
  // Closure of the generators under product and inverse.  Deterministic
  // element order (sorted lexicographically).
  static PermGroup enumerate(int degree, const std::vector<Perm>& generators,
                             std::size_t order_cap = 1000000);

  static PermGroup trivial(int degree);
  static PermGroup symmetric(int degree, std::size_t order_cap = 1000000);

  int degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Perm>& elements() const { return elements_; }
  const std::vector<Perm>& generators() const { return generators_; }

  bool contains(const Perm& p) const;
  bool is_subgroup_of(const PermGroup& other) const;
  bool same_elements(const PermGroup& other) const;

  std::vector<colour> orbit(colour a) const;
  std::vector<std::vector<colour>> orbits() const;

  PermGroup point_stabilizer(colour a) const;
  // Elements fixing every pinned colour: tau(p.first) == p.second for all pins.
  std::vector<Perm> pinned_elements(
      const std::vector<std::pair<colour, colour>>& pins) const;
  // Number of distinct restrictions to `free` of the pinned subset.
  std::uint64_t count_pinned_restrictions(
      const std::vector<std::pair<colour, colour>>& pins,
      const std::vector<colour>& free) const;

  // |G_a| / |G_a n G_b| as an exact integer.
  std::uint64_t index_factor(colour a, colour b) const;

  bool is_transitive() const;
  bool is_2transitive() const;
  bool has_distinct_point_stabilizers() const;

  // Largest subgroup of Sym(d) preserving each orbit of this group setwise.
  PermGroup young_subgroup(std::size_t order_cap = 1000000) const;

  // Lexicographically minimal tau in the group with tau(b) = a, if any.
  // This is the global default-extension rule; see minimal_map_table.
  std::optional<Perm> minimal_map(colour b, colour a) const;
  // Cached form: entry [b][a] is the element index or -1.
  const Perm* minimal_map_ptr(colour b, colour a) const;

  // Intersection as element sets (both groups must share the degree).
  PermGroup intersect(const PermGroup& other) const;

private:
  PermGroup() = default;
  void build_tables();

  int degree_ = 0;
  std::vector<Perm> generators_;
  std::vector<Perm> elements_;  // sorted
  // minimal_map_[b * degree_ + a]: index into elements_, or -1.
  std::vector<int> minimal_map_;
};

// A left coset tau*F with the lex-minimal member as canonical representative.
// Two cosets are equal iff their representatives are equal.
class LambdaCoset {
public:
  LambdaCoset() : group_(nullptr) {}
  LambdaCoset(const Perm& rep, const PermGroup& group);

  static LambdaCoset trivial(const PermGroup& group);

  const Perm& representative() const { return rep_; }
  const PermGroup& group() const { return *group_; }

  bool is_trivial() const;
  bool contains(const Perm& p) const;

  // Coset of the product tau1 * (coset tau2 F) = (tau1 tau2) F.
  LambdaCoset left_mul(const Perm& tau) const;
  // (tau F)^-1 = F tau^-1 canonicalised as a left coset of the same F only
  // when F is normal in the relevant overgroup; here we return the coset
  // tau^-1 F, which is what the lambda calculus needs.
  LambdaCoset inverse_coset() const;

  bool operator==(const LambdaCoset& o) const;
  bool operator!=(const LambdaCoset& o) const { return !(*this == o); }

private:
  Perm rep_;
  const PermGroup* group_;
};

// tau in sigma1 * F * sigma2, decided by enumeration of F.
bool double_coset_contains(const Perm& tau, const Perm& sigma1,
                           const Perm& sigma2, const PermGroup& F);

} // namespace bmg

#endif
