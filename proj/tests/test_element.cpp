#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "bmg/element.hpp"

using namespace bmg;

namespace {

Perm P(std::vector<int> v) { return Perm::from_images(v); }
Vertex V(const std::string& s) { return Vertex::parse(s); }

GroupCtxPtr ctx_s3() {
  return GroupContext::make(3, PermGroup::symmetric(3), PermGroup::symmetric(3));
}

GroupCtxPtr ctx_c3() {
  PermGroup c3 = PermGroup::enumerate(3, {P({1, 2, 0})});
  return GroupContext::make(3, c3, PermGroup::symmetric(3));
}

GroupCtxPtr ctx_a4() {
  PermGroup a4 = PermGroup::enumerate(4, {P({1, 2, 0, 3}), P({0, 2, 3, 1})});
  return GroupContext::make(4, a4, PermGroup::symmetric(4));
}

Vertex random_vertex(std::mt19937_64& rng, int degree, int max_depth) {
  std::uniform_int_distribution<int> depth_d(0, max_depth);
  std::uniform_int_distribution<int> col(0, degree - 1);
  int n = depth_d(rng);
  std::vector<colour> w;
  for (int i = 0; i < n; ++i) {
    colour c = static_cast<colour>(col(rng));
    if (!w.empty() && w.back() == c) c = static_cast<colour>((c + 1) % degree);
    w.push_back(c);
  }
  return Vertex(w);
}

Elem random_rotation(std::mt19937_64& rng, const GroupCtxPtr& ctx, int max_depth,
                     bool allow_twist) {
  Vertex c = random_vertex(rng, ctx->degree, max_depth);
  const auto& pool = allow_twist ? ctx->Fprime.elements() : ctx->F.elements();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return rotation_about(ctx, c, pool[pick(rng)]);
}

Elem base_translation(const GroupCtxPtr& ctx) {
  // The alternating line works for the 2-transitive contexts; C3 translates
  // the 0,1,2-periodic line instead.
  if (ctx->F.is_2transitive()) return standard_translation(ctx);
  return translation_along(ctx, {2, 1, 0}, {0, 1, 2});
}

Elem random_word(std::mt19937_64& rng, const GroupCtxPtr& ctx, int letters,
                 bool allow_twist = false) {
  Elem g = base_translation(ctx);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < letters; ++i) {
    Elem r = random_rotation(rng, ctx, 3, allow_twist);
    switch (kind(rng)) {
      case 0: g = g.then(r); break;
      case 1: g = r.then(g); break;
      default: g = g.then(r.inverse()); break;
    }
  }
  return g;
}

} // namespace

TEST_CASE("rotation portrait evaluation and defaults") {
  auto ctx = ctx_s3();
  Elem g = rotation_about(ctx, Vertex::root(), P({1, 2, 0}));
  CHECK(g.eval(V("0")) == V("1"));
  CHECK(g.eval(V("1")) == V("2"));
  // Default at "0": lex-minimal tau in Sym(3) with tau(0) = 1.
  CHECK(g.local_action(V("0")) == P({1, 0, 2}));
  CHECK(g.eval_inverse(V("1")) == V("0"));
  CHECK(g.eval(g.eval_inverse(V("2102"))) == V("2102"));
}

TEST_CASE("cocycle identity on random words") {
  auto ctx = ctx_a4();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    Elem g = random_word(rng, ctx, 2, true);
    Elem h = random_word(rng, ctx, 2, true);
    Elem gh = h.then(g);  // g h, h acts first
    for (int i = 0; i < 25; ++i) {
      Vertex v = random_vertex(rng, 4, 4);
      CHECK(gh.eval(v) == g.eval(h.eval(v)));
      CHECK(gh.local_action(v) == g.local_action(h.eval(v)).after(h.local_action(v)));
    }
    Elem trivial = g.then(g.inverse());
    for (int i = 0; i < 10; ++i) {
      Vertex v = random_vertex(rng, 4, 4);
      CHECK(trivial.eval(v) == v);
      CHECK(trivial.local_action(v).is_identity());
    }
  }
}

TEST_CASE("consistent-set construction") {
  auto ctx = ctx_s3();
  // All-identity locals with u = u' give the identity element.
  auto star = CompleteSubtree::star(3, Vertex::root());
  std::map<Vertex, Perm> locals;
  for (const Vertex& v : star.vertices()) locals[v] = Perm::identity(3);
  Elem e = from_consistent_set(ctx, star, locals, Vertex::root(), Vertex::root());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    Vertex v = random_vertex(rng, 3, 5);
    CHECK(e.eval(v) == v);
  }
  CHECK(e.classify().kind == Kind::Elliptic);

  // A planted twist in F' \ F has exactly that singularity.
  auto cctx = ctx_c3();
  Elem t = rotation_about(cctx, V("01"), P({0, 2, 1}));
  CHECK(t.singularities() == std::set<Vertex>{V("01")});
  CHECK(t.validate_membership().member);

  // Inconsistent locals are rejected.
  std::map<Vertex, Perm> bad = locals;
  bad[V("0")] = P({1, 0, 2});  // must fix colour 0 to agree with the centre
  CHECK_THROWS_AS(from_consistent_set(ctx, star, bad, Vertex::root(), Vertex::root()),
                  invalid_input);
}

TEST_CASE("translations") {
  auto ctx = ctx_s3();
  Elem h = standard_translation(ctx);
  CHECK(h.classify().kind == Kind::Hyperbolic);
  CHECK(h.length() == 1);
  CHECK(h.singularities().empty());
  Elem h2 = h.power(2);
  CHECK(h2.length() == 2);
  Elem hi = h.inverse();
  CHECK(hi.length() == 1);
  CHECK(hi.dist_to_axis(h.classify().axis_base) == 0);

  // Brute-force minimal displacement over a small ball.
  int best = 1000;
  for (const Vertex& v : ball(3, Vertex::root(), 4))
    best = std::min(best, distance(v, h2.eval(v)));
  CHECK(best == h2.length());

  // C3 cannot realise the alternating line with canonical defaults.
  CHECK_THROWS_AS(translation_along(ctx_c3(), {1, 0}, {0, 1}), invalid_input);
}

TEST_CASE("classification") {
  auto ctx = ctx_s3();
  CHECK(rotation_about(ctx, Vertex::root(), P({1, 2, 0})).classify().kind ==
        Kind::Elliptic);
  Elem h = standard_translation(ctx);
  CHECK(h.classify().length == 1);
  // Edge inversion: swap the root and "0" with identity pins.
  auto e = CompleteSubtree::edge(3, EdgeRef{Vertex::root(), 0});
  std::map<Vertex, Perm> locals{{Vertex::root(), Perm::identity(3)},
                                {V("0"), Perm::identity(3)}};
  Elem swap = from_consistent_set(ctx, e, locals, Vertex::root(), V("0"));
  auto cls = swap.classify();
  CHECK(cls.kind == Kind::Elliptic);
  CHECK(cls.inverted_edge.has_value());

  // Conjugation preserves kind and length, inversion preserves length.
  std::mt19937_64 rng(17);
  for (int i = 0; i < 8; ++i) {
    Elem g = random_word(rng, ctx, 2);
    Elem x = random_word(rng, ctx, 2);
    CHECK(g.conjugated_by(x).classify().kind == g.classify().kind);
    CHECK(g.conjugated_by(x).length() == g.length());
    CHECK(g.inverse().length() == g.length());
  }
}

TEST_CASE("axis machinery") {
  auto ctx = ctx_s3();
  Elem h = standard_translation(ctx);
  Vertex base = h.classify().axis_base;
  CHECK(h.dist_to_axis(base) == 0);
  CHECK(h.axis_order_leq(base, h.eval(base)));
  CHECK(!h.axis_order_leq(h.eval(base), base));

  std::mt19937_64 rng(23);
  for (int i = 0; i < 40; ++i) {
    Vertex v = random_vertex(rng, 3, 5);
    // Displacement identity d(v, g v) = l + 2 d(v, axis).
    int dd = distance(v, h.eval(v));
    CHECK(dd == h.length() + 2 * h.dist_to_axis(v));
    Vertex pi = h.project_to_axis(v);
    CHECK(h.dist_to_axis(pi) == 0);
    CHECK(distance(v, pi) == h.dist_to_axis(v));
    // pi_g commutes with g.
    CHECK(h.project_to_axis(h.eval(v)) == h.eval(pi));
  }

  Vertex off = base.neighbour(2);
  if (h.dist_to_axis(off) == 0) off = base.neighbour(1);
  CHECK(h.dist_to_axis(off) == 1);

  // d(w^-n(v), axis(g)) is eventually non-decreasing.
  std::mt19937_64 rng2(41);
  Elem w = random_word(rng2, ctx, 1);
  if (w.is_hyperbolic()) {
    Vertex cur = V("0121");
    std::vector<int> ds;
    for (int n = 0; n <= 25; ++n) {
      ds.push_back(h.dist_to_axis(cur));
      cur = w.eval_inverse(cur);
    }
    auto minpos = std::min_element(ds.begin(), ds.end()) - ds.begin();
    for (std::size_t i = static_cast<std::size_t>(minpos); i + 1 < ds.size(); ++i)
      CHECK(ds[i] <= ds[i + 1]);
  }
}

TEST_CASE("singularities") {
  auto ctx = ctx_c3();
  Elem h = rotation_about(ctx, Vertex::root(), P({1, 2, 0}));
  CHECK(h.singularities().empty());

  Elem t = rotation_about(ctx, V("01"), P({0, 2, 1}));
  CHECK(t.singularities() == std::set<Vertex>{V("01")});

  // S(g^-1) = g S(g), and S(gh) within S(h) u h^-1 S(g).
  std::mt19937_64 rng(29);
  for (int i = 0; i < 10; ++i) {
    Elem g = random_word(rng, ctx, 2, true);
    std::set<Vertex> expect;
    for (const Vertex& s : g.singularities()) expect.insert(g.eval(s));
    CHECK(g.inverse().singularities() == expect);
    Elem w = random_word(rng, ctx, 1, true);
    Elem gw = w.then(g);
    std::set<Vertex> bound = w.singularities();
    for (const Vertex& s : g.singularities()) bound.insert(w.eval_inverse(s));
    for (const Vertex& s : gw.singularities()) CHECK(bound.count(s) == 1);
  }
}

TEST_CASE("singularity depth under powers") {
  auto ctx = ctx_c3();
  // C3 translates the 0,1,2-periodic line (each local action is the 3-cycle).
  Elem base = translation_along(ctx, {2, 1, 0}, {0, 1, 2});
  CHECK(base.singularities().empty());
  Elem t = rotation_about(ctx, base.classify().axis_base, P({0, 2, 1}));
  Elem g = base.then(t);
  REQUIRE(g.is_hyperbolic());
  int D = g.sing_depth();
  for (int n = 2; n <= 4; ++n) {
    Elem gn = g.power(n);
    REQUIRE(gn.is_hyperbolic());
    if (!gn.singularities().empty()) CHECK(gn.sing_depth() <= D);
  }
}

TEST_CASE("membership validation") {
  auto ctx = ctx_c3();
  CHECK(Elem::identity(ctx).validate_membership().singular_count == 0);
  Elem t = rotation_about(ctx, V("0"), P({0, 2, 1}));
  auto report = t.validate_membership();
  CHECK(report.member);
  CHECK(report.singular_count == 1);
  Elem t2 = rotation_about(ctx, V("121"), P({0, 2, 1}));
  auto r2 = t.then(t2).validate_membership();
  CHECK(r2.member);
  CHECK(r2.singular_count <= 2);
}

TEST_CASE("power and inverse word algebra") {
  auto ctx = ctx_s3();
  Elem h = standard_translation(ctx);
  std::mt19937_64 rng(31);
  for (int n = -3; n <= 3; ++n) {
    Elem hn = h.power(n);
    for (int i = 0; i < 10; ++i) {
      Vertex v = random_vertex(rng, 3, 4);
      CHECK(hn.eval(v) == h.eval_power(n, v));
    }
  }
  CHECK(h.power(3).length() == 3);
  CHECK(h.equal_on_ball(h, 4));
  CHECK(!h.equal_on_ball(h.inverse(), 4));
}

TEST_CASE("tree operations are translation covariant") {
  // Re-rooting via an element action: distances, hulls and interiors are
  // preserved by automorphisms.
  auto ctx = ctx_s3();
  std::mt19937_64 rng(47);
  Elem x = standard_translation(ctx).then(
      rotation_about(ctx, V("12"), P({0, 2, 1})));
  for (int i = 0; i < 30; ++i) {
    Vertex u = random_vertex(rng, 3, 5), v = random_vertex(rng, 3, 5);
    CHECK(distance(x.eval(u), x.eval(v)) == distance(u, v));
  }
  std::set<Vertex> S;
  for (int k = 0; k < 4; ++k) S.insert(random_vertex(rng, 3, 4));
  auto hull = CompleteSubtree::complete_hull(3, S);
  std::set<Vertex> mapped;
  for (const Vertex& v : S) mapped.insert(x.eval(v));
  auto hull2 = CompleteSubtree::complete_hull(3, mapped);
  CHECK(hull2.size() == hull.size());
  CHECK(hull2.internal().size() == hull.internal().size());
  for (const Vertex& v : hull.vertices()) CHECK(hull2.contains(x.eval(v)));
}
