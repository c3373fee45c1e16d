#include "bmg/scale.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "bmg/directions.hpp"

namespace bmg {

namespace {

// Vertices projecting onto the axis vertex at `pos`, within `depth` of it.
void add_column(const Elem& g, long pos, int depth, std::set<Vertex>& out) {
  Vertex center = g.axis_vertex(pos);
  Vertex fwd = g.axis_vertex(pos + 1);
  Vertex bwd = g.axis_vertex(pos - 1);
  out.insert(center);
  std::deque<std::pair<Vertex, int>> queue{{center, 0}};
  const int d = g.ctx()->degree;
  while (!queue.empty()) {
    auto [v, dep] = queue.front();
    queue.pop_front();
    if (dep == depth) continue;
    for (int a = 0; a < d; ++a) {
      Vertex w = v.neighbour(static_cast<colour>(a));
      if (w == fwd || w == bwd) continue;
      if (distance(w, center) != dep + 1) continue;
      if (out.insert(w).second) queue.push_back({w, dep + 1});
    }
  }
}

std::set<Vertex> band_vertices(const Elem& g, long lo_pos, long hi_pos, int depth) {
  // Window endpoints as leaves, full columns strictly between.
  std::set<Vertex> out{g.axis_vertex(lo_pos), g.axis_vertex(hi_pos)};
  for (long p = lo_pos + 1; p < hi_pos; ++p) add_column(g, p, depth, out);
  return out;
}

} // namespace

Pando make_pando(const Elem& g, std::optional<int> depth, const Caps& caps) {
  if (!g.is_hyperbolic()) throw invalid_input("pandos exist for hyperbolic elements only");
  const int D = depth.value_or(g.sing_depth() + 1);
  if (D <= g.sing_depth()) throw invalid_input("pando depth must exceed D_g");
  const long l = g.length();
  auto minp = g.min_sing_projection();
  auto maxp = g.max_sing_projection();
  long v0pos = minp ? *minp - 1 : g.axis_position(g.classify().axis_base);
  long v1pos = std::max(maxp.value_or(v0pos), v0pos + l) + 1;

  std::set<Vertex> vs = band_vertices(g, v0pos, v1pos, D);
  if (vs.size() > 4 * caps.max_nodes)
    throw cap_exceeded("pando too large at this depth");
  Pando p{g, CompleteSubtree::from_vertices(g.ctx()->degree, std::move(vs)), D,
          {g.axis_vertex(v0pos), g.axis_vertex(v1pos)}};
  validate_pando(p);
  return p;
}

void validate_pando(const Pando& p) {
  const Elem& g = p.owner;
  const CompleteSubtree& T = p.tree;
  // P1: singularities are internal.
  for (const Vertex& s : g.singularities())
    check_internal(T.is_internal(s), "pando violates P1");
  // P2: some axis vertex of the pando maps into the interior.
  bool p2 = false;
  for (const Vertex& v : T.vertices()) {
    if (g.dist_to_axis(v) != 0) continue;
    if (T.is_internal(g.eval(v))) { p2 = true; break; }
  }
  check_internal(p2, "pando violates P2");
  // P3: depth closure over columns of internal axis vertices.
  std::set<int> depths;
  for (const Vertex& v : T.vertices()) depths.insert(g.dist_to_axis(v));
  int maxd = depths.empty() ? 0 : *depths.rbegin();
  for (const Vertex& w : T.internal()) {
    if (g.dist_to_axis(w) != 0) continue;
    std::set<Vertex> col;
    add_column(g, g.axis_position(w), maxd, col);
    for (const Vertex& v : col)
      if (depths.count(g.dist_to_axis(v)))
        check_internal(T.contains(v), "pando violates P3");
  }
}

CompleteSubtree initial_segment(const Pando& p) {
  const Elem& g = p.owner;
  std::set<Vertex> gP;
  for (const Vertex& v : p.tree.vertices()) gP.insert(g.eval(v));
  std::set<Vertex> diff;
  for (const Vertex& v : p.tree.vertices())
    if (!gP.count(v)) diff.insert(v);
  check_internal(!diff.empty(), "pando initial segment is empty");
  CompleteSubtree P0 = CompleteSubtree::complete_hull(p.tree.degree(), diff);
  check_internal(p.tree.contains_subtree(P0), "initial segment escapes the pando");
  // P u g(P) == P0 u g(P).
  std::set<Vertex> lhs = p.tree.vertices();
  lhs.insert(gP.begin(), gP.end());
  std::set<Vertex> rhs = P0.vertices();
  rhs.insert(gP.begin(), gP.end());
  check_internal(lhs == rhs, "P0 u g(P) differs from P u g(P)");
  return P0;
}

Index fixator_index(const std::set<Vertex>& big, const CompleteSubtree& small,
                    const PermGroup& F) {
  for (const Vertex& v : small.vertices())
    check_internal(big.count(v) > 0, "fixator_index: small not inside big");
  const int d = small.degree();
  // BFS from small across big; each outside vertex has a unique parent.
  std::map<Vertex, Vertex> parent;
  std::map<Vertex, std::vector<colour>> children;
  std::deque<Vertex> queue(small.vertices().begin(), small.vertices().end());
  std::set<Vertex> seen(small.vertices().begin(), small.vertices().end());
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (int a = 0; a < d; ++a) {
      Vertex w = u.neighbour(static_cast<colour>(a));
      if (!big.count(w) || seen.count(w)) continue;
      seen.insert(w);
      parent.emplace(w, u);
      children[u].push_back(static_cast<colour>(a));
      queue.push_back(w);
    }
  }
  check_internal(seen.size() == big.size(), "fixator_index: big not connected");

  Index out = 1;
  for (const Vertex& v : big) {
    auto ch = children.find(v);
    if (ch == children.end()) continue;
    std::vector<std::pair<colour, colour>> pins;
    if (small.contains(v)) {
      for (int a = 0; a < d; ++a) {
        colour c = static_cast<colour>(a);
        if (small.contains(v.neighbour(c))) pins.push_back({c, c});
      }
    } else {
      // The count is independent of the parent pin's value, so pin it to
      // the identity target of the same colour.
      colour b = v.edge_colour_to(parent.at(v));
      pins.push_back({b, b});
    }
    out *= Index(static_cast<unsigned long>(F.count_pinned_restrictions(pins, ch->second)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Restriction enumeration: distinct restrictions of U_C to an arbitrary list
// of target vertices, with optional representative construction.

namespace {

struct RestrOptions {
  bool build_reps = false;
};

struct RestrClass {
  std::vector<Vertex> images;          // images of the targets, in order
  std::map<Vertex, Perm> locals;       // consistent F-locals realising it
};

struct RestrEnumerator {
  const GroupCtxPtr& ctx;
  const CompleteSubtree& C;
  const std::vector<Vertex>& targets;
  const Caps& caps;
  RestrOptions opt;

  std::vector<Vertex> order{};                 // decision vertices, BFS from C
  std::map<Vertex, Vertex> parent{};           // for order members outside C
  std::map<Vertex, std::vector<colour>> kids{};  // relevant child colours
  std::set<Vertex> region{};
  std::map<Vertex, bool> has_target_below{};
  std::size_t nodes = 0;

  std::map<std::vector<Vertex>, RestrClass> classes{};

  void build_region() {
    const Vertex& anchor = *C.vertices().begin();
    region = C.vertices();
    for (const Vertex& t : targets)
      for (const Vertex& w : geodesic(anchor, t)) region.insert(w);
    // has_target_below: v lies on the geodesic from some target to the anchor.
    for (const Vertex& v : region) {
      bool below = false;
      for (const Vertex& t : targets)
        if (distance(t, anchor) == distance(t, v) + distance(v, anchor)) {
          below = true;
          break;
        }
      has_target_below[v] = below;
    }
    std::deque<Vertex> queue(C.vertices().begin(), C.vertices().end());
    std::set<Vertex> seen(C.vertices().begin(), C.vertices().end());
    while (!queue.empty()) {
      Vertex u = queue.front();
      queue.pop_front();
      std::vector<colour> rel;
      for (int a = 0; a < ctx->degree; ++a) {
        Vertex w = u.neighbour(static_cast<colour>(a));
        if (!region.count(w) || seen.count(w) || C.contains(w)) continue;
        seen.insert(w);
        parent.emplace(w, u);
        queue.push_back(w);
        if (has_target_below[w]) rel.push_back(static_cast<colour>(a));
      }
      if (!rel.empty()) {
        kids[u] = rel;
        order.push_back(u);
      }
    }
    // Order decision vertices by distance from C so parents precede children.
    std::stable_sort(order.begin(), order.end(), [&](const Vertex& a, const Vertex& b) {
      return C.distance_to(a) < C.distance_to(b);
    });
  }

  void run() {
    build_region();
    std::map<Vertex, Vertex> image;
    std::map<Vertex, Perm> chosen;
    for (const Vertex& v : C.vertices()) image.emplace(v, v);
    dfs(0, image, chosen);
  }

  void dfs(std::size_t i, std::map<Vertex, Vertex>& image,
           std::map<Vertex, Perm>& chosen) {
    if (++nodes > caps.max_nodes)
      throw cap_exceeded("restriction enumeration node budget exhausted");
    if (i == order.size()) {
      record(image, chosen);
      return;
    }
    const Vertex& v = order[i];
    const std::vector<colour>& rel = kids.at(v);
    std::vector<std::pair<colour, colour>> pins;
    if (C.contains(v)) {
      for (int a = 0; a < ctx->degree; ++a) {
        colour c = static_cast<colour>(a);
        if (C.contains(v.neighbour(c))) pins.push_back({c, c});
      }
    } else {
      colour b = v.edge_colour_to(parent.at(v));
      colour target_col = image.at(v).edge_colour_to(image.at(parent.at(v)));
      pins.push_back({b, target_col});
    }
    // Distinct restrictions to the relevant colours.
    std::set<std::vector<colour>> seen_restr;
    for (const Perm& phi : ctx->F.pinned_elements(pins)) {
      std::vector<colour> restr;
      for (colour c : rel) restr.push_back(phi[c]);
      if (!seen_restr.insert(restr).second) continue;
      for (colour c : rel) image[v.neighbour(c)] = image.at(v).neighbour(phi[c]);
      chosen[v] = phi;
      dfs(i + 1, image, chosen);
      chosen.erase(v);
      for (colour c : rel) image.erase(v.neighbour(c));
    }
  }

  void record(const std::map<Vertex, Vertex>& image,
              const std::map<Vertex, Perm>& chosen) {
    std::vector<Vertex> tuple;
    tuple.reserve(targets.size());
    for (const Vertex& t : targets) tuple.push_back(image.at(t));
    if (classes.count(tuple)) return;
    RestrClass cls;
    cls.images = tuple;
    if (opt.build_reps) {
      cls.locals = chosen;
      // Every C-vertex needs an explicit local fixing its C-edge colours, so
      // that defaults beyond the portrait keep C fixed.
      for (const Vertex& v : C.vertices()) {
        if (cls.locals.count(v)) continue;
        std::vector<std::pair<colour, colour>> pins;
        for (int a = 0; a < ctx->degree; ++a) {
          colour c = static_cast<colour>(a);
          if (C.contains(v.neighbour(c))) pins.push_back({c, c});
        }
        auto cands = ctx->F.pinned_elements(pins);
        check_internal(!cands.empty(), "no local fixes the C-pins");
        cls.locals.emplace(v, cands.front());
      }
    }
    classes.emplace(std::move(tuple), std::move(cls));
  }
};

// The swap of an edge: e.origin <-> target, identity pinned locals.
Elem edge_swapper(const GroupCtxPtr& ctx, const CompleteSubtree& e) {
  check_internal(e.size() == 2, "setwise fixator needs an edge");
  Vertex a = *e.vertices().begin();
  Vertex b = *std::next(e.vertices().begin());
  std::map<Vertex, Perm> locals{{a, Perm::identity(ctx->degree)},
                                {b, Perm::identity(ctx->degree)}};
  auto p = std::make_shared<Portrait>(ctx, a, b, e, locals);
  return Elem::from_portrait(std::move(p));
}

Elem class_representative(const GroupCtxPtr& ctx, const CompleteSubtree& C,
                          const RestrClass& cls) {
  std::set<Vertex> supp = C.vertices();
  for (const auto& [v, phi] : cls.locals) supp.insert(v);
  CompleteSubtree support = CompleteSubtree::complete_hull(ctx->degree, supp);
  const Vertex& anchor = *C.vertices().begin();
  auto p = std::make_shared<Portrait>(ctx, anchor, anchor, support, cls.locals);
  return Elem::from_portrait(std::move(p));
}

// Classes of A restricted to `targets` with representatives in A.
std::vector<std::pair<std::vector<Vertex>, Elem>> fixator_classes(
    const Fixator& A, const std::vector<Vertex>& targets, const GroupCtxPtr& ctx,
    const Caps& caps, bool build_reps) {
  // Conjugation by w: restrictions of w U w^-1 to T correspond to
  // restrictions of U to w^-1(T); representatives conjugate back.
  std::vector<Vertex> core_targets = targets;
  if (A.conjugator)
    for (Vertex& t : core_targets) t = A.conjugator->eval_inverse(t);

  std::vector<std::pair<std::vector<Vertex>, Elem>> out;
  std::map<std::vector<Vertex>, Elem> merged;

  auto run_core = [&](const std::vector<Vertex>& tgts)
      -> std::vector<RestrClass> {
    RestrEnumerator en{ctx, A.fixed, tgts, caps, RestrOptions{build_reps}};
    en.run();
    std::vector<RestrClass> cls;
    for (auto& [k, v] : en.classes) cls.push_back(std::move(v));
    return cls;
  };

  auto realise = [&](const Elem& core_rep) {
    if (!A.conjugator) return core_rep;
    return core_rep.conjugated_by(*A.conjugator);
  };

  auto add = [&](const Elem& rep) {
    std::vector<Vertex> key;
    key.reserve(targets.size());
    for (const Vertex& t : targets) key.push_back(rep.eval(t));
    merged.emplace(std::move(key), rep);
  };

  if (!A.setwise_edge) {
    for (const RestrClass& c : run_core(core_targets)) {
      Elem rep = build_reps ? class_representative(ctx, A.fixed, c)
                            : Elem::identity(ctx);
      if (build_reps) {
        add(realise(rep));
      } else {
        // Counting only: class keys come straight from the core images.
        std::vector<Vertex> key = c.images;
        if (A.conjugator)
          for (Vertex& v : key) v = A.conjugator->eval(v);
        merged.emplace(std::move(key), Elem::identity(ctx));
      }
    }
  } else {
    Elem s = edge_swapper(ctx, A.fixed);
    // U_{{e}} = U_e u U_e s; the second cohort restricted to T is the first
    // restricted to s(T), post-composed with the fixed swap.
    std::vector<Vertex> swapped;
    for (const Vertex& t : core_targets) swapped.push_back(s.eval(t));
    for (const RestrClass& c : run_core(core_targets)) {
      Elem rep = class_representative(ctx, A.fixed, c);
      add(realise(rep));
    }
    for (const RestrClass& c : run_core(swapped)) {
      Elem rep = s.then(class_representative(ctx, A.fixed, c));
      add(realise(rep));
    }
  }
  for (auto& [k, v] : merged) out.push_back({k, v});
  return out;
}

// Fixed vertices of A in the ambient tree (w(C) for conjugated fixators),
// plus the twist-safety ball making U_R <= A for any R containing it.
std::set<Vertex> fixator_safety_region(const Fixator& A) {
  std::set<Vertex> out;
  for (const Vertex& v : A.fixed.vertices())
    out.insert(A.conjugator ? A.conjugator->eval(v) : v);
  if (A.conjugator) {
    const int d = A.conjugator->ctx()->degree;
    for (const Vertex& s : A.conjugator->singularities()) {
      Vertex ws = A.conjugator->eval(s);
      out.insert(ws);
      for (int a = 0; a < d; ++a) out.insert(ws.neighbour(static_cast<colour>(a)));
    }
  }
  return out;
}

} // namespace

Index restriction_count(const Fixator& A, const CompleteSubtree& T,
                        const GroupCtxPtr& ctx, const Caps& caps) {
  std::vector<Vertex> targets(T.vertices().begin(), T.vertices().end());
  auto classes = fixator_classes(A, targets, ctx, caps, A.setwise_edge);
  return Index(static_cast<unsigned long>(classes.size()));
}

bool fixator_contains(const Fixator& A, const Elem& u) {
  Elem y = A.conjugator ? u.conjugated_by(A.conjugator->inverse()) : u;
  if (!y.singularities().empty()) return false;
  if (A.setwise_edge) {
    Vertex a = *A.fixed.vertices().begin();
    Vertex b = *std::next(A.fixed.vertices().begin());
    Vertex ya = y.eval(a), yb = y.eval(b);
    return (ya == a && yb == b) || (ya == b && yb == a);
  }
  for (const Vertex& v : A.fixed.vertices())
    if (y.eval(v) != v) return false;
  return true;
}

std::pair<Index, Index> cos_distance(const Fixator& U, const Fixator& V,
                                     const GroupCtxPtr& ctx, const Caps& caps) {
  std::set<Vertex> seed = fixator_safety_region(U);
  std::set<Vertex> seedV = fixator_safety_region(V);
  seed.insert(seedV.begin(), seedV.end());
  CompleteSubtree R = CompleteSubtree::complete_hull(ctx->degree, seed);
  std::vector<Vertex> targets(R.vertices().begin(), R.vertices().end());

  auto one_side = [&](const Fixator& X, const Fixator& Y) -> Index {
    auto classes = fixator_classes(X, targets, ctx, caps, true);
    std::size_t total = classes.size(), in = 0;
    for (const auto& [key, rep] : classes) {
      check_internal(fixator_contains(X, rep), "class representative escaped its fixator");
      if (fixator_contains(Y, rep)) ++in;
    }
    check_internal(in > 0 && total % in == 0, "coset class count not divisible");
    return Index(static_cast<unsigned long>(total / in));
  };

  return {one_side(U, V), one_side(V, U)};
}

bool fixator_subgroup_leq(const CompleteSubtree& small_fixed, const Fixator& A,
                          const GroupCtxPtr& ctx, const Caps& caps) {
  std::set<Vertex> seed = small_fixed.vertices();
  std::set<Vertex> seedA = fixator_safety_region(A);
  seed.insert(seedA.begin(), seedA.end());
  CompleteSubtree R = CompleteSubtree::complete_hull(ctx->degree, seed);
  std::vector<Vertex> targets(R.vertices().begin(), R.vertices().end());
  Fixator small{small_fixed, std::nullopt, false};
  for (const auto& [key, rep] : fixator_classes(small, targets, ctx, caps, true))
    if (!fixator_contains(A, rep)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// The M-set.

namespace {

struct MProblem {
  const Elem& g;
  const CompleteSubtree& T;
  MMode mode;
  const Caps& caps;

  std::vector<Vertex> verts{};
  std::map<Vertex, int> index{};
  std::vector<bool> internal_flag{}, axis_fixed{};
  std::vector<int> parent{};            // -1 at root
  std::vector<colour> parent_colour{};  // colour towards parent
  int root = -1;

  // Flex mode: lambda representatives; PandoInitial: escape + sigma powers.
  std::map<int, Perm> lambda_rep{};
  std::vector<int> escape{};
  std::map<std::pair<int, int>, Perm> sigpow_cache{};

  std::map<std::pair<int, int>, Index> memo{};
  std::size_t nodes = 0;

  void build() {
    verts.assign(T.vertices().begin(), T.vertices().end());
    for (std::size_t i = 0; i < verts.size(); ++i) index[verts[i]] = static_cast<int>(i);
    internal_flag.resize(verts.size());
    axis_fixed.resize(verts.size());
    long best = 0;
    bool have_root = false;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      internal_flag[i] = T.is_internal(verts[i]);
      axis_fixed[i] = g.dist_to_axis(verts[i]) == 0;
      if (axis_fixed[i]) {
        long p = g.axis_position(verts[i]);
        if (!have_root || p < best) { best = p; root = static_cast<int>(i); have_root = true; }
      }
    }
    check_internal(have_root, "M-set tree must meet the axis");
    parent.assign(verts.size(), -1);
    parent_colour.assign(verts.size(), 0);
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (static_cast<int>(i) == root) continue;
      Vertex p = step_towards(verts[i], verts[root]);
      parent[i] = index.at(p);
      parent_colour[i] = verts[i].edge_colour_to(p);
    }
    if (mode == MMode::PandoInitial) {
      escape.resize(verts.size());
      for (std::size_t i = 0; i < verts.size(); ++i)
        escape[i] = g.forward_escape(verts[i]);
    }
  }

  const Perm& lambda(int i) {
    auto it = lambda_rep.find(i);
    if (it != lambda_rep.end()) return it->second;
    return lambda_rep.emplace(i, lambda_coset(g, verts[i]).first.representative())
        .first->second;
  }

  const Perm& sigpow(int i, int k) {
    auto key = std::make_pair(i, k);
    auto it = sigpow_cache.find(key);
    if (it != sigpow_cache.end()) return it->second;
    return sigpow_cache.emplace(key, g.local_action_power(k, verts[i])).first->second;
  }

  bool condition(const Perm& sigma, int u, int w) {
    const PermGroup& F = g.ctx()->F;
    if (!F.contains(sigma)) return false;
    if (mode == MMode::FlexPastSingularities) {
      // sigma in lambda(w) lambda(u)^-1  <=>  rep_w^-1 sigma rep_u in F.
      return F.contains(lambda(w).inverse().after(sigma).after(lambda(u)));
    }
    int H = std::max(escape[u], escape[w]);
    // sigma in sigma(g^H, w)^-1 F sigma(g^H, u).
    return F.contains(sigpow(w, H).after(sigma).after(sigpow(u, H).inverse()));
  }

  Index count(int u, int w) {
    if ((axis_fixed[u] || axis_fixed[w]) && u != w) return 0;
    if (internal_flag[u] != internal_flag[w]) return 0;
    if (!internal_flag[u]) return 1;
    auto key = std::make_pair(u, w);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (++nodes > caps.max_nodes)
      throw cap_exceeded("M-set counting budget exhausted");
    const int d = g.ctx()->degree;
    Index total = 0;
    bool is_root = parent[u] < 0;
    std::vector<std::pair<colour, colour>> pins;
    if (!is_root) pins.push_back({parent_colour[u], parent_colour[w]});
    for (const Perm& sigma : g.ctx()->F.pinned_elements(pins)) {
      if (!condition(sigma, u, w)) continue;
      Index term = 1;
      for (int a = 0; a < d && term != 0; ++a) {
        colour c = static_cast<colour>(a);
        if (!is_root && c == parent_colour[u]) continue;
        int cu = index.at(verts[u].neighbour(c));
        int cw = index.at(verts[w].neighbour(sigma[c]));
        term *= count(cu, cw);
      }
      total += term;
    }
    memo.emplace(key, total);
    return total;
  }

  Index solve() {
    build();
    if (static_cast<std::size_t>(std::count(internal_flag.begin(), internal_flag.end(), true)) >
        caps.max_internal)
      throw cap_exceeded("M-set tree interior exceeds the configured cap");
    if (!internal_flag[root]) {
      // Leaf root: its single neighbour inside T must map to itself.
      for (std::size_t i = 0; i < verts.size(); ++i)
        if (parent[i] == root) return count(static_cast<int>(i), static_cast<int>(i));
      return 1;  // single-vertex tree
    }
    return count(root, root);
  }

  void enumerate_at(int u, int w, std::vector<std::map<Vertex, Vertex>>& partials,
                    std::size_t budget) {
    // Combines each partial with every admissible mapping of subtree(u).
    if ((axis_fixed[u] || axis_fixed[w]) && u != w) { partials.clear(); return; }
    if (internal_flag[u] != internal_flag[w]) { partials.clear(); return; }
    for (auto& m : partials) m[verts[u]] = verts[w];
    if (!internal_flag[u]) return;
    const int d = g.ctx()->degree;
    bool is_root = parent[u] < 0;
    std::vector<std::pair<colour, colour>> pins;
    if (!is_root) pins.push_back({parent_colour[u], parent_colour[w]});
    std::vector<std::map<Vertex, Vertex>> out;
    for (const Perm& sigma : g.ctx()->F.pinned_elements(pins)) {
      if (!condition(sigma, u, w)) continue;
      std::vector<std::map<Vertex, Vertex>> branch = partials;
      for (int a = 0; a < d && !branch.empty(); ++a) {
        colour c = static_cast<colour>(a);
        if (!is_root && c == parent_colour[u]) continue;
        enumerate_at(index.at(verts[u].neighbour(c)),
                     index.at(verts[w].neighbour(sigma[c])), branch, budget);
      }
      out.insert(out.end(), branch.begin(), branch.end());
      if (out.size() > budget) throw cap_exceeded("explicit M enumeration too large");
    }
    partials.swap(out);
  }
};

} // namespace

Index count_M(const Elem& g, const CompleteSubtree& T, MMode mode, const Caps& caps) {
  MProblem p{g, T, mode, caps};
  return p.solve();
}

std::vector<std::map<Vertex, Vertex>> enumerate_M(const Elem& g,
                                                  const CompleteSubtree& T,
                                                  MMode mode, const Caps& caps) {
  MProblem p{g, T, mode, caps};
  p.build();
  std::vector<std::map<Vertex, Vertex>> partials(1);
  partials[0][p.verts[p.root]] = p.verts[p.root];
  if (!p.internal_flag[p.root]) {
    for (std::size_t i = 0; i < p.verts.size(); ++i)
      if (p.parent[i] == p.root)
        p.enumerate_at(static_cast<int>(i), static_cast<int>(i), partials, caps.max_nodes);
  } else {
    p.enumerate_at(p.root, p.root, partials, caps.max_nodes);
  }
  return partials;
}

ScaleBreakdown scale_breakdown(const Elem& g, const Caps& caps) {
  if (!g.is_hyperbolic()) return {Index(1), Index(1), Index(1), 0};
  Pando p = make_pando(g, std::nullopt, caps);
  CompleteSubtree P0 = initial_segment(p);
  CompleteSubtree gP = p.tree.map([&](const Vertex& v) { return g.eval(v); });
  CompleteSubtree big = p.tree.union_with(gP);
  Index numerator = fixator_index(big.vertices(), gP, g.ctx()->F);
  Index m = count_M(g, P0, MMode::PandoInitial, caps);
  check_internal(m > 0 && numerator % m == 0, "scale numerator not divisible by |M|");
  return {numerator / m, numerator, m, P0.internal().size()};
}

Index scale(const Elem& g, const Caps& caps) { return scale_breakdown(g, caps).value; }

Index scale_closed_form_uf(const Elem& g) {
  if (!g.is_hyperbolic()) throw invalid_input("closed form needs a hyperbolic element");
  if (!g.singularities().empty())
    throw invalid_input("closed form needs an element of U(F)");
  const PermGroup& F = g.ctx()->F;
  Vertex v0 = g.classify().axis_base;
  auto path = geodesic(v0, g.eval(v0));
  std::vector<colour> cols;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    cols.push_back(path[i].edge_colour_to(path[i + 1]));
  cols.push_back(g.local_action(v0)[cols.front()]);  // c(g v0, g v1)
  Index out = 1;
  for (std::size_t i = 0; i + 1 < cols.size(); ++i)
    out *= Index(static_cast<unsigned long>(F.index_factor(cols[i], cols[i + 1])));
  return out;
}

Index scale_flex(const Elem& g, const Vertex& v0, int depth, const Caps& caps) {
  if (!g.ctx()->F.is_2transitive())
    throw invalid_input("scale_flex needs a 2-transitive F");
  if (!g.is_hyperbolic()) throw invalid_input("scale_flex needs a hyperbolic element");
  if (g.dist_to_axis(v0) != 0) throw invalid_input("scale_flex window must start on the axis");
  if (depth <= g.sing_depth()) throw invalid_input("scale_flex depth must exceed D_g");
  long pos0 = g.axis_position(v0);
  auto maxp = g.max_sing_projection();
  if (maxp && pos0 <= *maxp)
    throw invalid_input("scale_flex window must sit past all singular projections");
  const long l = g.length();
  std::set<Vertex> vs{g.axis_vertex(pos0 - 1), g.axis_vertex(pos0 + l)};
  for (long p = pos0; p < pos0 + l; ++p) add_column(g, p, depth, vs);
  CompleteSubtree T = CompleteSubtree::from_vertices(g.ctx()->degree, std::move(vs));
  Index m = count_M(g, T, MMode::FlexPastSingularities, caps);
  Index numerator;
  mpz_ui_pow_ui(numerator.get_mpz_t(), static_cast<unsigned long>(g.ctx()->degree - 1),
                static_cast<unsigned long>(T.internal().size()));
  check_internal(m > 0 && numerator % m == 0, "flex numerator not divisible by |M|");
  return numerator / m;
}

mpq_class modular(const Elem& g, const Caps& caps) {
  mpq_class out(scale(g, caps), scale(g.inverse(), caps));
  out.canonicalize();
  return out;
}

std::optional<Elem> uniscalar_witness(const GroupCtxPtr& ctx) {
  const PermGroup& F = ctx->F;
  if (F.has_distinct_point_stabilizers()) return std::nullopt;
  colour a = 0, b = 1;
  bool found = false;
  for (int i = 0; i < ctx->degree && !found; ++i)
    for (int j = i + 1; j < ctx->degree && !found; ++j) {
      if (F.point_stabilizer(static_cast<colour>(i))
              .same_elements(F.point_stabilizer(static_cast<colour>(j)))) {
        a = static_cast<colour>(i);
        b = static_cast<colour>(j);
        found = true;
      }
    }
  check_internal(found, "no equal point stabilisers despite failed distinctness");
  // Translation by two along the a,b-alternating line with identity local
  // actions everywhere: identity pins make every default the identity.
  Vertex root = Vertex::root();
  Vertex va({std::vector<colour>{a}});
  Vertex vab({std::vector<colour>{a, b}});
  CompleteSubtree support = CompleteSubtree::from_vertices(ctx->degree, {root, va});
  std::map<Vertex, Perm> locals{{root, Perm::identity(ctx->degree)},
                                {va, Perm::identity(ctx->degree)}};
  auto p = std::make_shared<Portrait>(ctx, root, vab, support, std::move(locals));
  Elem w = Elem::from_portrait(std::move(p));
  check_internal(w.is_hyperbolic() && w.length() == 2, "uniscalar witness misclassified");
  // Identity local actions along the whole axis.
  Vertex cur = root;
  for (int k = 0; k < 8; ++k) {
    check_internal(w.local_action(cur).is_identity(), "witness local action not identity");
    cur = w.eval(cur);
  }
  return w;
}

Elem dominating_uf_element(const Elem& g, const Caps& caps) {
  if (!g.is_hyperbolic()) throw invalid_input("domination needs a hyperbolic element");
  if (g.singularities().empty()) return g;
  const long l = g.length();
  long minp = *g.min_sing_projection();
  long v0pos = minp - l - 2;
  int D = g.sing_depth() + 1;
  std::set<Vertex> vs = band_vertices(g, v0pos, v0pos + l + 1, D);
  CompleteSubtree slab = CompleteSubtree::from_vertices(g.ctx()->degree, std::move(vs));
  for (const Vertex& s : g.singularities())
    check_internal(!slab.contains(s), "domination slab meets the singularities");
  std::map<Vertex, Perm> locals;
  for (const Vertex& v : slab.vertices()) locals[v] = g.local_action(v);
  Vertex u = g.axis_vertex(v0pos);
  Elem h = from_consistent_set(g.ctx(), slab, locals, u, g.eval(u));
  check_internal(h.singularities().empty(), "domination candidate left U(F)");
  check_internal(h.is_hyperbolic() && h.length() == l, "domination candidate has wrong length");
  (void)caps;
  return h;
}

} // namespace bmg
