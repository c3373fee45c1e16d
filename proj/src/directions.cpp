#include "bmg/directions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmg/scale.hpp"

namespace bmg {

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "equal";
    case Verdict::NotEqual: return "notequal";
    default: return "unknown";
  }
}

std::pair<LambdaCoset, int> lambda_coset(const Elem& g, const Vertex& v) {
  if (!g.is_hyperbolic()) throw invalid_input("lambda needs a hyperbolic element");
  const PermGroup& F = g.ctx()->F;
  int N = g.backward_escape(v);
  // Cosets sigma(g^n, g^-n(v)) F for n = 0..N; constant from N onwards.
  std::vector<LambdaCoset> cosets;
  Vertex cur = v;
  Perm sigma = Perm::identity(g.ctx()->degree);
  cosets.push_back(LambdaCoset(sigma, F));
  for (int n = 1; n <= N; ++n) {
    Vertex prev = g.eval_inverse(cur);
    sigma = sigma.after(g.local_action(prev));  // sigma(g^n, g^-n v) = sigma(g^{n-1}, g^{1-n} v) sigma(g, g^-n v)
    cosets.push_back(LambdaCoset(sigma, F));
    cur = prev;
  }
  LambdaCoset lambda = cosets.back();
  int H = N;
  while (H > 0 && cosets[static_cast<std::size_t>(H - 1)] == lambda) --H;
  return {lambda, H};
}

std::set<Vertex> lambda_support(const Elem& g, int extra) {
  std::set<Vertex> out;
  for (const Vertex& s : g.singularities()) {
    int N = g.forward_escape(s) + extra;
    Vertex cur = s;
    for (int n = 0; n <= N; ++n) {
      if (!lambda_coset(g, cur).first.is_trivial()) out.insert(cur);
      cur = g.eval(cur);
    }
  }
  return out;
}

std::pair<LambdaCoset, int> LambdaTable::at(const Vertex& v) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(v);
  if (it != cache_.end()) return it->second;
  auto val = lambda_coset(*g_, v);
  cache_.emplace(v, val);
  return val;
}

CompleteSubtree tree_T_e(const Elem& g, const EdgeRef& e) {
  const int d = g.ctx()->degree;
  std::set<Vertex> seed{e.origin, e.target(), g.eval_inverse(e.origin),
                        g.eval_inverse(e.target())};
  for (const Vertex& s : g.singularities()) {
    seed.insert(s);
    for (int a = 0; a < d; ++a) seed.insert(s.neighbour(static_cast<colour>(a)));
  }
  return CompleteSubtree::complete_hull(d, seed);
}

std::size_t N_e(const Elem& g, const EdgeRef& e) {
  return tree_T_e(g, e).internal().size();
}

std::size_t p_e(const Elem& g, const EdgeRef& e) {
  CompleteSubtree T = tree_T_e(g, e);
  Vertex o = e.origin, t = e.target();
  std::set<int> lengths;
  for (const Vertex& u : T.vertices()) {
    if (T.is_internal(u)) continue;
    if (u != o && step_towards(o, u) == t) lengths.insert(distance(o, u));
    if (u != t && step_towards(t, u) == o) lengths.insert(distance(t, u));
  }
  return lengths.size();
}

ThreeValued ends_equal(const Elem& g, const Elem& h, int depth) {
  if (!g.is_hyperbolic() || !h.is_hyperbolic())
    throw invalid_input("ends_equal needs hyperbolic elements");
  if (depth <= 0) {
    depth = 4 * (g.length() + h.length() + g.sing_depth() + h.sing_depth() +
                 distance(g.classify().axis_base, h.classify().axis_base)) + 8;
  }
  auto axis_dist_h = [&](const Vertex& v) {
    return (distance(v, h.eval(v)) - h.length()) / 2;
  };
  Vertex x = g.classify().axis_base;
  int prev = axis_dist_h(x);
  int contact_run = 0;
  const int max_steps = depth + prev + 4;
  for (int step = 0; step < max_steps; ++step) {
    int f = axis_dist_h(x);
    if (step > 0 && f > prev) {
      // Distance to the convex axis(h) strictly increased along a forward
      // geodesic; it now increases forever.
      return {Verdict::NotEqual, step, "divergence"};
    }
    if (f == 0) {
      Vertex gfwd = step_towards(x, g.eval(x));
      Vertex hfwd = step_towards(x, h.eval(x));
      if (gfwd == hfwd) {
        if (++contact_run >= depth) return {Verdict::Equal, depth, "depth-certified"};
      } else if (axis_dist_h(gfwd) == 0) {
        // Shared edge with opposite orientations: the forward ends differ.
        return {Verdict::NotEqual, step, "orientation"};
      }
      // else: the next step leaves axis(h) and the divergence rule fires.
    } else if (step > 0 && f == prev) {
      check_internal(false, "distance to an axis plateaued off the axis");
    }
    prev = f;
    x = step_towards(x, g.eval(x));
  }
  return {Verdict::Unknown, depth, "budget"};
}

ThreeValued ends_equal(const EndHandle& a, const EndHandle& b, int depth) {
  return ends_equal(a.oriented(), b.oriented(), depth);
}

namespace {

// Forward-tail certificate for one strand representative w with a
// non-trivial coset: both elements must move it identically and transport
// the coset identically for a stabilisation window.
bool strand_tail_matches(const Elem& g, const Elem& h, Vertex w, int window) {
  LambdaTable lg(g), lh(h);
  for (int j = 0; j < window; ++j) {
    auto cg = lg.at(w).first;
    auto ch = lh.at(w).first;
    if (!(cg == ch)) return false;
    if (cg.is_trivial()) return true;  // tails trivial from here on
    Vertex gw = g.eval(w);
    if (h.eval(w) != gw) return false;
    // Coset transport must agree: sigma(g,w) lambda(w) == sigma(h,w) lambda(w).
    if (!(cg.left_mul(g.local_action(w)) == cg.left_mul(h.local_action(w))))
      return false;
    w = gw;
  }
  return true;
}

} // namespace

bool weakly_asymptotic(const Elem& g_in, const Elem& h_in) {
  if (!g_in.is_hyperbolic() || !h_in.is_hyperbolic())
    throw invalid_input("weak asymptotics needs hyperbolic elements");
  // lambda is invariant under positive powers; normalise lengths so the
  // forward tails march in step.
  long lg = g_in.length(), lh = h_in.length();
  long L = std::lcm(lg, lh);
  Elem g = g_in.power(static_cast<int>(L / lg));
  Elem h = h_in.power(static_cast<int>(L / lh));

  for (int round = 0, extra = 2; round < 4; ++round, extra *= 2) {
    std::set<Vertex> window;
    auto collect = [&](const Elem& e) {
      for (const Vertex& s : e.singularities()) {
        Vertex cur = s;
        int N = e.forward_escape(s) + extra;
        for (int n = 0; n <= N; ++n) {
          window.insert(cur);
          cur = e.eval(cur);
        }
      }
    };
    collect(g);
    collect(h);
    for (const Vertex& v : window)
      if (!(lambda_coset(g, v).first == lambda_coset(h, v).first)) return false;

    // Tail certificates at the deep representative of every strand.
    bool certified = true;
    auto certify = [&](const Elem& e) {
      for (const Vertex& s : e.singularities()) {
        Vertex w = e.eval_power(e.forward_escape(s) + extra, s);
        if (!strand_tail_matches(g, h, w, 3 * extra)) { certified = false; return; }
      }
    };
    certify(g);
    if (certified) certify(h);
    if (certified) return true;
    // A failed certificate with matching windows: widen and retry.  A
    // genuine mismatch surfaces as a window inequality at the next round.
  }
  throw cap_exceeded("weak-asymptotic tail certificate did not stabilise");
}

ThreeValued asymptotic(const Elem& g, const Elem& h, int depth) {
  if (!g.ctx()->F.is_2transitive())
    throw invalid_input("the asymptotic classification needs a 2-transitive F");
  if (!weakly_asymptotic(g, h)) return {Verdict::NotEqual, 0, "lambda"};
  return ends_equal(g, h, depth);
}

std::vector<std::size_t> length_diagnostic(const Elem& g, const Elem& h, int p,
                                           int q, int n_max, const EdgeRef& e) {
  std::vector<std::size_t> out;
  for (int n = 1; n <= n_max; ++n) {
    Elem x = h.power(q * n).then(g.power(-p * n));  // g^{-pn} h^{qn}
    out.push_back(N_e(x, e));
  }
  return out;
}

std::optional<DirectionGapBound> direction_gap_bound(const Elem& g, const Elem& h) {
  if (!g.ctx()->F.is_2transitive())
    throw invalid_input("the direction bound needs a 2-transitive F");
  if (asymptotic(g, h).is_equal()) return std::nullopt;
  DirectionGapBound out;
  out.omega_minus_one = g.ctx()->degree - 1;
  out.l_g = g.length();
  out.l_h = h.length();
  out.s_g = scale(g);
  out.s_h = scale(h);
  auto log_base = [&](const mpz_class& s) -> std::optional<long> {
    // s == (d-1)^k?
    mpz_class pow = 1;
    for (long k = 0; k < 4096; ++k) {
      if (pow == s) return k;
      if (pow > s) return std::nullopt;
      pow *= out.omega_minus_one;
    }
    return std::nullopt;
  };
  auto kg = log_base(out.s_g);
  auto kh = log_base(out.s_h);
  if (kg && kh && *kg > 0 && *kh > 0) {
    mpq_class exact(out.l_g, *kg);
    exact += mpq_class(out.l_h, *kh);
    exact.canonicalize();
    out.exact = exact;
  }
  double logd = std::log(static_cast<double>(out.omega_minus_one));
  out.value = logd * (out.l_g / std::log(out.s_g.get_d()) +
                      out.l_h / std::log(out.s_h.get_d()));
  return out;
}

} // namespace bmg
