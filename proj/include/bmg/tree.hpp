#ifndef BMG_TREE_HPP
#define BMG_TREE_HPP

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "bmg/errors.hpp"
#include "bmg/perm.hpp"

namespace bmg {

// A vertex of the coloured d-regular tree, addressed by its reduced colour
// word from a fixed basepoint (the root, address = empty word).  The edge
// between w and w.a carries colour a in both directions, which realises a
// legal colouring implicitly.  Moving along colour a from w appends a when
// a differs from the last letter and truncates otherwise, so every vertex
// has exactly d neighbours indexed by colour.
class Vertex {
public:
  Vertex() = default;
  explicit Vertex(std::vector<colour> word);

  static Vertex root() { return Vertex(); }
  static Vertex parse(const std::string& text);  // digit string, "-" = root

  std::size_t depth() const { return word_.size(); }
  bool is_root() const { return word_.empty(); }
  colour last() const;
  const std::vector<colour>& word() const { return word_; }

  Vertex neighbour(colour a) const;
  Vertex parent() const;  // root has no parent

  // Colour of the edge between *this and an adjacent vertex.
  colour edge_colour_to(const Vertex& adjacent) const;

  bool operator==(const Vertex& o) const { return word_ == o.word_; }
  bool operator!=(const Vertex& o) const { return word_ != o.word_; }
  bool operator<(const Vertex& o) const { return word_ < o.word_; }

  std::string str() const;

private:
  std::vector<colour> word_;
};

int distance(const Vertex& u, const Vertex& v);
std::vector<Vertex> geodesic(const Vertex& u, const Vertex& v);
bool adjacent(const Vertex& u, const Vertex& v);
// First vertex after u on the geodesic from u to v (u != v).
Vertex step_towards(const Vertex& u, const Vertex& v);
// Midpoint-ish: the vertex at floor(d/2) along the geodesic from u to v.
Vertex mid_vertex(const Vertex& u, const Vertex& v);

// A directed edge by origin and colour; target = origin.neighbour(colour).
struct EdgeRef {
  Vertex origin;
  colour col = 0;

  Vertex target() const { return origin.neighbour(col); }
  EdgeRef reversed() const { return EdgeRef{target(), col}; }
  bool same_undirected(const EdgeRef& o) const;
};

// Number of vertices at distance k from a fixed edge: 2(d-1)^k.
std::uint64_t sphere_size(int degree, int k);
// Brute-force enumeration of {v : d(v, e) == k}; the acceptance oracle.
std::vector<Vertex> sphere_around_edge(int degree, const EdgeRef& e, int k);
std::vector<Vertex> ball(int degree, const Vertex& center, int radius);

// A finite complete subtree: connected, and every vertex either has all d
// of its neighbours inside or has valency 1 inside.
class CompleteSubtree {
public:
  CompleteSubtree() = default;

  // Checks connectedness and completeness; throws invalid_input otherwise.
  static CompleteSubtree from_vertices(int degree, std::set<Vertex> vertices);
  static CompleteSubtree edge(int degree, const EdgeRef& e);
  static CompleteSubtree star(int degree, const Vertex& center);

  // Smallest complete subtree containing S: convex hull, then close every
  // hull vertex of valency >= 2 under all its neighbours.
  static CompleteSubtree complete_hull(int degree, const std::set<Vertex>& S);

  int degree() const { return degree_; }
  std::size_t size() const { return vertices_.size(); }
  const std::set<Vertex>& vertices() const { return vertices_; }
  const std::set<Vertex>& internal() const { return internal_; }
  bool contains(const Vertex& v) const { return vertices_.count(v) > 0; }
  bool is_internal(const Vertex& v) const { return internal_.count(v) > 0; }
  bool contains_edge(const EdgeRef& e) const {
    return contains(e.origin) && contains(e.target());
  }
  bool contains_subtree(const CompleteSubtree& other) const;

  // Unique closest vertex of the subtree.
  Vertex project(const Vertex& v) const;
  int distance_to(const Vertex& v) const;

  // Union as vertex sets; validates that the union is still complete.
  CompleteSubtree union_with(const CompleteSubtree& other) const;

  CompleteSubtree map(const std::function<Vertex(const Vertex&)>& f) const;

private:
  int degree_ = 0;
  std::set<Vertex> vertices_;
  std::set<Vertex> internal_;
};

// Distinct restrictions to `big` (any finite connected vertex set containing
// `small`) of U(F)-elements fixing `small` pointwise, as a per-vertex product
// of pinned local-action counts.  This is the [U_small : U_big] count used by
// the scale numerator; big need not be complete.
// Declared here because it is pure tree+perm machinery; the scale module
// wraps it.
struct VertexSetHash {
  std::size_t operator()(const Vertex& v) const {
    std::size_t h = 1469598103934665603ull;
    for (colour c : v.word()) { h ^= c; h *= 1099511628211ull; }
    return h;
  }
};

} // namespace bmg

#endif
