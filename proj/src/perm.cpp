#include "bmg/perm.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace bmg {

Perm Perm::identity(int deg) {
  if (deg < 0 || deg > kMaxDegree) throw invalid_input("permutation degree out of range");
  Perm p;
  p.deg_ = deg;
  for (int i = 0; i < deg; ++i) p.images_[i] = static_cast<colour>(i);
  return p;
}

Perm Perm::from_images(const std::vector<int>& images) {
  const int d = static_cast<int>(images.size());
  if (d < 1 || d > kMaxDegree) throw invalid_input("permutation degree out of range");
  Perm p;
  p.deg_ = d;
  std::array<bool, kMaxDegree> seen{};
  for (int i = 0; i < d; ++i) {
    int v = images[i];
    if (v < 0 || v >= d || seen[v]) throw invalid_input("not a bijection: " + std::to_string(v));
    seen[v] = true;
    p.images_[i] = static_cast<colour>(v);
  }
  return p;
}

Perm Perm::after(const Perm& rhs) const {
  check_internal(deg_ == rhs.deg_, "degree mismatch in permutation product");
  Perm p;
  p.deg_ = deg_;
  for (int i = 0; i < deg_; ++i) p.images_[i] = images_[rhs.images_[i]];
  return p;
}

Perm Perm::inverse() const {
  Perm p;
  p.deg_ = deg_;
  for (int i = 0; i < deg_; ++i) p.images_[images_[i]] = static_cast<colour>(i);
  return p;
}

bool Perm::is_identity() const {
  for (int i = 0; i < deg_; ++i)
    if (images_[i] != i) return false;
  return true;
}

bool Perm::operator<(const Perm& o) const {
  check_internal(deg_ == o.deg_, "degree mismatch in permutation compare");
  for (int i = 0; i < deg_; ++i)
    if (images_[i] != o.images_[i]) return images_[i] < o.images_[i];
  return false;
}

std::string Perm::str() const {
  std::ostringstream os;
  for (int i = 0; i < deg_; ++i) {
    if (i) os << ' ';
    os << static_cast<int>(images_[i]);
  }
  return os.str();
}

PermGroup PermGroup::enumerate(int degree, const std::vector<Perm>& generators,
                               std::size_t order_cap) {
  if (degree < 1 || degree > kMaxDegree) throw invalid_input("group degree out of range");
  for (const Perm& g : generators)
    if (g.degree() != degree) throw invalid_input("generator degree mismatch");

  std::set<Perm> closed;
  closed.insert(Perm::identity(degree));
  std::vector<Perm> frontier(closed.begin(), closed.end());
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const Perm& x : frontier) {
      for (const Perm& g : generators) {
        for (const Perm& y : {g.after(x), g.inverse().after(x)}) {
          if (closed.insert(y).second) {
            next.push_back(y);
            if (closed.size() > order_cap)
              throw cap_exceeded("group order cap exceeded during closure");
          }
        }
      }
    }
    frontier.swap(next);
  }

  PermGroup G;
  G.degree_ = degree;
  G.generators_ = generators;
  G.elements_.assign(closed.begin(), closed.end());
  G.build_tables();
  return G;
}

PermGroup PermGroup::trivial(int degree) { return enumerate(degree, {}); }

PermGroup PermGroup::symmetric(int degree, std::size_t order_cap) {
  std::vector<int> cyc(degree), swp(degree);
  for (int i = 0; i < degree; ++i) { cyc[i] = (i + 1) % degree; swp[i] = i; }
  if (degree >= 2) std::swap(swp[0], swp[1]);
  std::vector<Perm> gens{Perm::from_images(cyc)};
  if (degree >= 2) gens.push_back(Perm::from_images(swp));
  return enumerate(degree, gens, order_cap);
}

void PermGroup::build_tables() {
  minimal_map_.assign(static_cast<std::size_t>(degree_) * degree_, -1);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const Perm& p = elements_[i];
    for (int b = 0; b < degree_; ++b) {
      int& slot = minimal_map_[static_cast<std::size_t>(b) * degree_ + p[static_cast<colour>(b)]];
      if (slot < 0) slot = static_cast<int>(i);  // elements_ sorted, first hit is lex-minimal
    }
  }
}

bool PermGroup::contains(const Perm& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

bool PermGroup::is_subgroup_of(const PermGroup& other) const {
  for (const Perm& p : elements_)
    if (!other.contains(p)) return false;
  return true;
}

bool PermGroup::same_elements(const PermGroup& other) const {
  return degree_ == other.degree_ && elements_ == other.elements_;
}

std::vector<colour> PermGroup::orbit(colour a) const {
  std::array<bool, kMaxDegree> hit{};
  hit[a] = true;
  std::vector<colour> out{a};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const Perm& g : elements_) {
      colour b = g[out[i]];
      if (!hit[b]) { hit[b] = true; out.push_back(b); }
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<colour>> PermGroup::orbits() const {
  std::array<bool, kMaxDegree> done{};
  std::vector<std::vector<colour>> out;
  for (int a = 0; a < degree_; ++a) {
    if (done[a]) continue;
    auto orb = orbit(static_cast<colour>(a));
    for (colour c : orb) done[c] = true;
    out.push_back(std::move(orb));
  }
  return out;
}

PermGroup PermGroup::point_stabilizer(colour a) const {
  if (a >= degree_) throw invalid_input("stabilised point out of range");
  PermGroup H;
  H.degree_ = degree_;
  for (const Perm& p : elements_)
    if (p[a] == a) H.elements_.push_back(p);
  H.generators_ = H.elements_;
  H.build_tables();
  return H;
}

std::vector<Perm> PermGroup::pinned_elements(
    const std::vector<std::pair<colour, colour>>& pins) const {
  std::vector<Perm> out;
  for (const Perm& p : elements_) {
    bool ok = true;
    for (auto [from, to] : pins)
      if (p[from] != to) { ok = false; break; }
    if (ok) out.push_back(p);
  }
  return out;
}

std::uint64_t PermGroup::count_pinned_restrictions(
    const std::vector<std::pair<colour, colour>>& pins,
    const std::vector<colour>& free) const {
  std::set<std::vector<colour>> images;
  for (const Perm& p : pinned_elements(pins)) {
    std::vector<colour> tuple;
    tuple.reserve(free.size());
    for (colour c : free) tuple.push_back(p[c]);
    images.insert(std::move(tuple));
  }
  return images.size();
}

std::uint64_t PermGroup::index_factor(colour a, colour b) const {
  if (a >= degree_ || b >= degree_) throw invalid_input("colour out of range");
  std::uint64_t na = 0, nab = 0;
  for (const Perm& p : elements_) {
    if (p[a] != a) continue;
    ++na;
    if (p[b] == b) ++nab;
  }
  check_internal(nab > 0 && na % nab == 0, "stabiliser index not integral");
  return na / nab;
}

bool PermGroup::is_transitive() const {
  return orbit(0).size() == static_cast<std::size_t>(degree_);
}

bool PermGroup::is_2transitive() const {
  if (degree_ < 2) throw invalid_input("2-transitivity needs degree >= 2");
  // Orbit of the ordered pair (0,1) must be all d(d-1) ordered distinct pairs.
  std::set<std::pair<colour, colour>> orb;
  for (const Perm& p : elements_) orb.insert({p[0], p[1]});
  return orb.size() == static_cast<std::size_t>(degree_) * (degree_ - 1);
}

bool PermGroup::has_distinct_point_stabilizers() const {
  for (int a = 0; a < degree_; ++a)
    for (int b = a + 1; b < degree_; ++b) {
      bool equal = true;
      for (const Perm& p : elements_) {
        if ((p[static_cast<colour>(a)] == a) != (p[static_cast<colour>(b)] == b)) {
          equal = false;
          break;
        }
      }
      if (equal) return false;
    }
  return true;
}

PermGroup PermGroup::young_subgroup(std::size_t order_cap) const {
  std::vector<Perm> gens;
  for (const auto& orb : orbits()) {
    // Sym(orbit) generated by transpositions of consecutive orbit members.
    for (std::size_t i = 0; i + 1 < orb.size(); ++i) {
      std::vector<int> img(degree_);
      for (int c = 0; c < degree_; ++c) img[c] = c;
      std::swap(img[orb[i]], img[orb[i + 1]]);
      gens.push_back(Perm::from_images(img));
    }
  }
  return enumerate(degree_, gens, order_cap);
}

std::optional<Perm> PermGroup::minimal_map(colour b, colour a) const {
  const Perm* p = minimal_map_ptr(b, a);
  if (!p) return std::nullopt;
  return *p;
}

const Perm* PermGroup::minimal_map_ptr(colour b, colour a) const {
  if (b >= degree_ || a >= degree_) throw invalid_input("colour out of range");
  int idx = minimal_map_[static_cast<std::size_t>(b) * degree_ + a];
  if (idx < 0) return nullptr;
  return &elements_[static_cast<std::size_t>(idx)];
}

PermGroup PermGroup::intersect(const PermGroup& other) const {
  check_internal(degree_ == other.degree_, "degree mismatch in intersection");
  PermGroup H;
  H.degree_ = degree_;
  for (const Perm& p : elements_)
    if (other.contains(p)) H.elements_.push_back(p);
  H.generators_ = H.elements_;
  H.build_tables();
  return H;
}

LambdaCoset::LambdaCoset(const Perm& rep, const PermGroup& group) : group_(&group) {
  check_internal(rep.degree() == group.degree(), "coset representative degree mismatch");
  Perm best = rep;
  for (const Perm& f : group.elements()) {
    Perm cand = rep.after(f);
    if (cand < best) best = cand;
  }
  rep_ = best;
}

LambdaCoset LambdaCoset::trivial(const PermGroup& group) {
  return LambdaCoset(Perm::identity(group.degree()), group);
}

bool LambdaCoset::is_trivial() const { return rep_.is_identity(); }

bool LambdaCoset::contains(const Perm& p) const {
  return group_->contains(rep_.inverse().after(p));
}

LambdaCoset LambdaCoset::left_mul(const Perm& tau) const {
  return LambdaCoset(tau.after(rep_), *group_);
}

LambdaCoset LambdaCoset::inverse_coset() const {
  return LambdaCoset(rep_.inverse(), *group_);
}

bool LambdaCoset::operator==(const LambdaCoset& o) const {
  check_internal(group_ && o.group_, "comparing uninitialised cosets");
  check_internal(group_->same_elements(*o.group_), "cosets of different groups");
  return rep_ == o.rep_;
}

bool double_coset_contains(const Perm& tau, const Perm& sigma1,
                           const Perm& sigma2, const PermGroup& F) {
  // tau = sigma1 f sigma2  <=>  sigma1^-1 tau sigma2^-1 in F
  return F.contains(sigma1.inverse().after(tau).after(sigma2.inverse()));
}

} // namespace bmg
