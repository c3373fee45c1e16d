#include "bmg/tree.hpp"

#include <algorithm>
#include <map>

namespace bmg {

Vertex::Vertex(std::vector<colour> word) : word_(std::move(word)) {
  for (std::size_t i = 0; i + 1 < word_.size(); ++i)
    if (word_[i] == word_[i + 1])
      throw invalid_input("vertex address not reduced: " + str());
}

Vertex Vertex::parse(const std::string& text) {
  if (text == "-" || text.empty()) return Vertex();
  std::vector<colour> w;
  w.reserve(text.size());
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw invalid_input("bad address character in " + text);
    w.push_back(static_cast<colour>(ch - '0'));
  }
  return Vertex(std::move(w));
}

colour Vertex::last() const {
  check_internal(!word_.empty(), "root has no last letter");
  return word_.back();
}

Vertex Vertex::neighbour(colour a) const {
  Vertex v;
  v.word_ = word_;
  if (!word_.empty() && word_.back() == a)
    v.word_.pop_back();
  else
    v.word_.push_back(a);
  return v;
}

Vertex Vertex::parent() const {
  check_internal(!word_.empty(), "root has no parent");
  Vertex v;
  v.word_.assign(word_.begin(), word_.end() - 1);
  return v;
}

colour Vertex::edge_colour_to(const Vertex& adj) const {
  if (adj.word_.size() == word_.size() + 1) return adj.word_.back();
  if (word_.size() == adj.word_.size() + 1) return word_.back();
  throw invalid_input("vertices not adjacent");
}

std::string Vertex::str() const {
  if (word_.empty()) return "-";
  std::string s;
  s.reserve(word_.size());
  for (colour c : word_) s.push_back(static_cast<char>('0' + c));
  return s;
}

static std::size_t common_prefix(const Vertex& u, const Vertex& v) {
  const auto& a = u.word();
  const auto& b = v.word();
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

int distance(const Vertex& u, const Vertex& v) {
  std::size_t p = common_prefix(u, v);
  return static_cast<int>(u.depth() + v.depth() - 2 * p);
}

std::vector<Vertex> geodesic(const Vertex& u, const Vertex& v) {
  std::size_t p = common_prefix(u, v);
  std::vector<Vertex> path;
  std::vector<colour> w = u.word();
  path.emplace_back(Vertex(w));
  while (w.size() > p) {
    w.pop_back();
    path.emplace_back(Vertex(w));
  }
  for (std::size_t i = p; i < v.depth(); ++i) {
    w.push_back(v.word()[i]);
    path.emplace_back(Vertex(w));
  }
  return path;
}

bool adjacent(const Vertex& u, const Vertex& v) { return distance(u, v) == 1; }

Vertex step_towards(const Vertex& u, const Vertex& v) {
  check_internal(u != v, "step_towards needs distinct vertices");
  std::size_t p = common_prefix(u, v);
  if (u.depth() > p) return u.parent();
  return u.neighbour(v.word()[u.depth()]);
}

Vertex mid_vertex(const Vertex& u, const Vertex& v) {
  auto path = geodesic(u, v);
  return path[path.size() / 2];
}

bool EdgeRef::same_undirected(const EdgeRef& o) const {
  if (origin == o.origin && col == o.col) return true;
  return origin == o.target() && target() == o.origin;
}

std::uint64_t sphere_size(int degree, int k) {
  if (degree < 3) throw invalid_input("tree degree must be at least 3");
  std::uint64_t out = 2;
  for (int i = 0; i < k; ++i) out *= static_cast<std::uint64_t>(degree - 1);
  return out;
}

std::vector<Vertex> ball(int degree, const Vertex& center, int radius) {
  std::vector<Vertex> out{center};
  std::size_t lo = 0;
  for (int r = 0; r < radius; ++r) {
    std::size_t hi = out.size();
    for (std::size_t i = lo; i < hi; ++i) {
      for (int a = 0; a < degree; ++a) {
        Vertex n = out[i].neighbour(static_cast<colour>(a));
        if (distance(n, center) == r + 1) out.push_back(n);
      }
    }
    lo = hi;
  }
  return out;
}

std::vector<Vertex> sphere_around_edge(int degree, const EdgeRef& e, int k) {
  std::set<Vertex> out;
  Vertex o = e.origin, t = e.target();
  for (const Vertex& v : ball(degree, o, k + 1)) {
    int d = std::min(distance(v, o), distance(v, t));
    if (d == k) out.insert(v);
  }
  for (const Vertex& v : ball(degree, t, k + 1)) {
    int d = std::min(distance(v, o), distance(v, t));
    if (d == k) out.insert(v);
  }
  return {out.begin(), out.end()};
}

CompleteSubtree CompleteSubtree::from_vertices(int degree, std::set<Vertex> vertices) {
  if (vertices.empty()) throw invalid_input("complete subtree cannot be empty");
  CompleteSubtree T;
  T.degree_ = degree;
  T.vertices_ = std::move(vertices);
  // Connectedness: every non-root-of-subtree vertex must see a neighbour on
  // its geodesic towards an arbitrary anchor.
  const Vertex& anchor = *T.vertices_.begin();
  for (const Vertex& v : T.vertices_) {
    if (v == anchor) continue;
    if (!T.vertices_.count(step_towards(v, anchor)))
      throw invalid_input("subtree not connected at " + v.str());
  }
  for (const Vertex& v : T.vertices_) {
    int val = 0;
    bool all = true;
    for (int a = 0; a < degree; ++a) {
      if (T.vertices_.count(v.neighbour(static_cast<colour>(a)))) ++val;
      else all = false;
    }
    if (all)
      T.internal_.insert(v);
    else if (val != 1 && T.vertices_.size() > 1)
      throw invalid_input("subtree not complete at " + v.str());
  }
  return T;
}

CompleteSubtree CompleteSubtree::edge(int degree, const EdgeRef& e) {
  return from_vertices(degree, {e.origin, e.target()});
}

CompleteSubtree CompleteSubtree::star(int degree, const Vertex& center) {
  std::set<Vertex> vs{center};
  for (int a = 0; a < degree; ++a) vs.insert(center.neighbour(static_cast<colour>(a)));
  return from_vertices(degree, std::move(vs));
}

CompleteSubtree CompleteSubtree::complete_hull(int degree, const std::set<Vertex>& S) {
  if (S.empty()) throw invalid_input("complete hull of empty set");
  // Union of geodesics from one anchor covers all pairwise geodesics in a
  // tree, so this is already the convex hull of S.
  std::set<Vertex> hull;
  const Vertex& anchor = *S.begin();
  for (const Vertex& v : S)
    for (const Vertex& w : geodesic(anchor, v)) hull.insert(w);
  bool grew = true;
  while (grew) {
    grew = false;
    std::set<Vertex> add;
    for (const Vertex& v : hull) {
      int val = 0;
      for (int a = 0; a < degree; ++a)
        if (hull.count(v.neighbour(static_cast<colour>(a)))) ++val;
      if (val >= 2) {
        for (int a = 0; a < degree; ++a) {
          Vertex n = v.neighbour(static_cast<colour>(a));
          if (!hull.count(n)) add.insert(n);
        }
      }
    }
    if (!add.empty()) {
      hull.insert(add.begin(), add.end());
      grew = true;
    }
  }
  return from_vertices(degree, std::move(hull));
}

bool CompleteSubtree::contains_subtree(const CompleteSubtree& other) const {
  for (const Vertex& v : other.vertices_)
    if (!vertices_.count(v)) return false;
  return true;
}

Vertex CompleteSubtree::project(const Vertex& v) const {
  if (contains(v)) return v;
  Vertex cur = v;
  const Vertex& anchor = *vertices_.begin();
  while (!contains(cur)) cur = step_towards(cur, anchor);
  return cur;
}

int CompleteSubtree::distance_to(const Vertex& v) const {
  return distance(v, project(v));
}

CompleteSubtree CompleteSubtree::union_with(const CompleteSubtree& other) const {
  std::set<Vertex> vs = vertices_;
  vs.insert(other.vertices_.begin(), other.vertices_.end());
  return from_vertices(degree_, std::move(vs));
}

CompleteSubtree CompleteSubtree::map(const std::function<Vertex(const Vertex&)>& f) const {
  std::set<Vertex> out;
  for (const Vertex& v : vertices_) out.insert(f(v));
  return from_vertices(degree_, std::move(out));
}

} // namespace bmg
