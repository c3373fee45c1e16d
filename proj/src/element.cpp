#include "bmg/element.hpp"

#include <algorithm>
#include <deque>

namespace bmg {

std::shared_ptr<const GroupContext> GroupContext::make(int degree, PermGroup F,
                                                       PermGroup Fprime) {
  if (degree < 3) throw invalid_input("tree degree must be at least 3");
  if (F.degree() != degree || Fprime.degree() != degree)
    throw invalid_input("permutation degree must match tree degree");
  if (!F.is_subgroup_of(Fprime)) throw invalid_input("F must be contained in F'");
  PermGroup young = F.young_subgroup();
  PermGroup trimmed = Fprime.intersect(young);
  bool trim = trimmed.order() != Fprime.order();
  if (!F.is_subgroup_of(trimmed)) throw internal_error("F escaped its own Young subgroup");
  auto ctx = std::make_shared<GroupContext>(
      GroupContext{degree, std::move(F), std::move(trimmed), trim});
  return ctx;
}

Portrait::Portrait(GroupCtxPtr ctx, Vertex base, Vertex image,
                   CompleteSubtree support, std::map<Vertex, Perm> locals)
    : ctx_(std::move(ctx)), base_(std::move(base)), image_(std::move(image)),
      support_(std::move(support)), locals_(std::move(locals)) {
  if (!support_.contains(base_)) throw invalid_input("portrait base outside its support");
  for (const auto& [v, sigma] : locals_) {
    if (!support_.contains(v))
      throw invalid_input("portrait local outside the support at " + v.str());
    if (!ctx_->Fprime.contains(sigma))
      throw invalid_input("portrait local outside F' at " + v.str());
  }

  // Materialise locals on all of the support, walking outward from the base.
  // This is also the consistency check: every support edge is crossed once.
  std::map<Vertex, Perm> total;
  auto base_it = locals_.find(base_);
  total[base_] = base_it != locals_.end() ? base_it->second
                                          : Perm::identity(ctx_->degree);
  std::map<Vertex, Vertex> images;
  images[base_] = image_;
  std::deque<Vertex> queue{base_};
  while (!queue.empty()) {
    Vertex p = queue.front();
    queue.pop_front();
    const Perm& sp = total.at(p);
    const Vertex& ip = images.at(p);
    for (int a = 0; a < ctx_->degree; ++a) {
      Vertex w = p.neighbour(static_cast<colour>(a));
      if (!support_.contains(w) || total.count(w)) continue;
      colour b = static_cast<colour>(a);
      colour image_col = sp[b];
      images[w] = ip.neighbour(image_col);
      auto it = locals_.find(w);
      if (it != locals_.end()) {
        if (it->second[b] != image_col)
          throw invalid_input("inconsistent portrait locals at " + w.str());
        total[w] = it->second;
      } else {
        const Perm* def = ctx_->F.minimal_map_ptr(b, image_col);
        check_internal(def != nullptr, "default extension failed inside F-hat");
        total[w] = *def;
      }
      queue.push_back(w);
    }
  }
  check_internal(total.size() == support_.size(), "portrait support not connected");
  locals_ = std::move(total);
  for (const auto& [v, sigma] : locals_)
    if (!ctx_->F.contains(sigma)) singular_.insert(v);
}

const Portrait::State& Portrait::forward_state(const Vertex& v) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = fwd_.find(v);
  if (it != fwd_.end()) return it->second;
  auto path = geodesic(base_, v);
  State cur{image_, locals_.at(base_)};
  fwd_.emplace(base_, cur);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vertex& w = path[i];
    auto hit = fwd_.find(w);
    if (hit != fwd_.end()) { cur = hit->second; continue; }
    colour b = w.edge_colour_to(path[i - 1]);
    colour image_col = cur.sigma[b];
    Vertex iw = cur.image.neighbour(image_col);
    Perm sw;
    auto loc = locals_.find(w);
    if (loc != locals_.end()) {
      sw = loc->second;
      check_internal(sw[b] == image_col, "materialised locals inconsistent");
    } else {
      const Perm* def = ctx_->F.minimal_map_ptr(b, image_col);
      check_internal(def != nullptr, "default extension failed");
      sw = *def;
    }
    cur = State{iw, sw};
    fwd_.emplace(w, cur);
  }
  return fwd_.at(v);
}

const Portrait::State& Portrait::backward_state(const Vertex& z) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = bwd_.find(z);
  if (it != bwd_.end()) return it->second;
  auto path = geodesic(image_, z);
  State cur{base_, locals_.at(base_)};  // image = preimage here
  bwd_.emplace(image_, cur);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vertex& y = path[i];
    auto hit = bwd_.find(y);
    if (hit != bwd_.end()) { cur = hit->second; continue; }
    colour a = y.edge_colour_to(path[i - 1]);
    colour b = cur.sigma.inverse()[a];
    Vertex w = cur.image.neighbour(b);  // cur.image holds the preimage
    Perm sw;
    auto loc = locals_.find(w);
    if (loc != locals_.end()) {
      sw = loc->second;
      check_internal(sw[b] == a, "materialised locals inconsistent (backward)");
    } else {
      const Perm* def = ctx_->F.minimal_map_ptr(b, a);
      check_internal(def != nullptr, "default extension failed (backward)");
      sw = *def;
    }
    cur = State{w, sw};
    bwd_.emplace(y, cur);
  }
  return bwd_.at(z);
}

Vertex Portrait::eval(const Vertex& v) const { return forward_state(v).image; }
Perm Portrait::local_action(const Vertex& v) const { return forward_state(v).sigma; }
Vertex Portrait::eval_inverse(const Vertex& z) const { return backward_state(z).image; }
Perm Portrait::local_action_inverse(const Vertex& z) const {
  return backward_state(z).sigma.inverse();
}

Elem::Elem(GroupCtxPtr ctx, std::vector<Letter> word)
    : ctx_(std::move(ctx)), word_(std::move(word)) {
  for (const Letter& l : word_) {
    check_internal(l.sign == 1 || l.sign == -1, "letter sign must be +-1");
    check_internal(l.portrait != nullptr, "null portrait letter");
  }
}

Elem::Elem(const Elem& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  ctx_ = other.ctx_;
  word_ = other.word_;
  classification_ = other.classification_;
  singular_ = other.singular_;
  axis_cache_ = other.axis_cache_;
}

Elem::Elem(Elem&& other) noexcept {
  std::lock_guard<std::mutex> lock(other.mu_);
  ctx_ = std::move(other.ctx_);
  word_ = std::move(other.word_);
  classification_ = std::move(other.classification_);
  singular_ = std::move(other.singular_);
  axis_cache_ = std::move(other.axis_cache_);
}

Elem& Elem::operator=(const Elem& other) {
  if (this == &other) return *this;
  Elem tmp(other);
  return *this = std::move(tmp);
}

Elem& Elem::operator=(Elem&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  ctx_ = std::move(other.ctx_);
  word_ = std::move(other.word_);
  classification_ = std::move(other.classification_);
  singular_ = std::move(other.singular_);
  axis_cache_ = std::move(other.axis_cache_);
  return *this;
}

Elem Elem::identity(GroupCtxPtr ctx) { return Elem(std::move(ctx), {}); }

Elem Elem::from_portrait(PortraitPtr p) {
  GroupCtxPtr ctx = p->ctx();
  return Elem(std::move(ctx), {Letter{std::move(p), 1}});
}

Vertex Elem::letter_eval(std::size_t i, const Vertex& v) const {
  const Letter& l = word_[i];
  return l.sign > 0 ? l.portrait->eval(v) : l.portrait->eval_inverse(v);
}

Vertex Elem::letter_eval_inv(std::size_t i, const Vertex& v) const {
  const Letter& l = word_[i];
  return l.sign > 0 ? l.portrait->eval_inverse(v) : l.portrait->eval(v);
}

Perm Elem::letter_local(std::size_t i, const Vertex& v) const {
  const Letter& l = word_[i];
  return l.sign > 0 ? l.portrait->local_action(v) : l.portrait->local_action_inverse(v);
}

Perm Elem::letter_local_inv(std::size_t i, const Vertex& v) const {
  // sigma(letter^-1, v) = sigma(letter, letter^-1(v))^-1
  const Letter& l = word_[i];
  return l.sign > 0 ? l.portrait->local_action(l.portrait->eval_inverse(v)).inverse()
                    : l.portrait->local_action(v);
}

Vertex Elem::eval(const Vertex& v) const {
  Vertex cur = v;
  for (std::size_t i = 0; i < word_.size(); ++i) cur = letter_eval(i, cur);
  return cur;
}

Vertex Elem::eval_inverse(const Vertex& v) const {
  Vertex cur = v;
  for (std::size_t i = word_.size(); i-- > 0;) cur = letter_eval_inv(i, cur);
  return cur;
}

Perm Elem::local_action(const Vertex& v) const {
  Perm sigma = Perm::identity(ctx_->degree);
  Vertex cur = v;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    sigma = letter_local(i, cur).after(sigma);
    cur = letter_eval(i, cur);
  }
  return sigma;
}

Vertex Elem::eval_power(int n, const Vertex& v) const {
  Vertex cur = v;
  for (int i = 0; i < std::abs(n); ++i) cur = n > 0 ? eval(cur) : eval_inverse(cur);
  return cur;
}

Perm Elem::local_action_power(int n, const Vertex& v) const {
  Perm sigma = Perm::identity(ctx_->degree);
  Vertex cur = v;
  for (int i = 0; i < std::abs(n); ++i) {
    if (n > 0) {
      sigma = local_action(cur).after(sigma);
      cur = eval(cur);
    } else {
      Vertex prev = eval_inverse(cur);
      sigma = local_action(prev).inverse().after(sigma);
      cur = prev;
    }
  }
  return sigma;
}

Elem Elem::inverse() const {
  std::vector<Letter> w(word_.rbegin(), word_.rend());
  for (Letter& l : w) l.sign = -l.sign;
  return Elem(ctx_, std::move(w));
}

Elem Elem::then(const Elem& outer) const {
  check_internal(ctx_ == outer.ctx_ || ctx_->degree == outer.ctx_->degree,
                 "mixing group contexts");
  std::vector<Letter> w = word_;
  w.insert(w.end(), outer.word_.begin(), outer.word_.end());
  return Elem(ctx_, std::move(w));
}

Elem Elem::power(int n) const {
  if (n < 0) return inverse().power(-n);
  std::vector<Letter> w;
  for (int i = 0; i < n; ++i) w.insert(w.end(), word_.begin(), word_.end());
  return Elem(ctx_, std::move(w));
}

Elem Elem::conjugated_by(const Elem& x) const {
  return x.inverse().then(*this).then(x);
}

Vertex Elem::start_vertex() const {
  return word_.empty() ? Vertex::root() : word_.front().portrait->base();
}

const Classification& Elem::classify() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (classification_) return *classification_;
  }
  Classification out;
  Vertex v = start_vertex();
  bool done = false;
  for (int iter = 0; iter < 256 && !done; ++iter) {
    Vertex gv = eval(v);
    int dv = distance(v, gv);
    if (dv == 0) {
      out = Classification{Kind::Elliptic, 0, v, std::nullopt};
      done = true;
      break;
    }
    if (dv == 1) {
      if (eval(gv) == v) {
        out = Classification{Kind::Elliptic, 0, v,
                             EdgeRef{v, v.edge_colour_to(gv)}};
      } else {
        out = Classification{Kind::Hyperbolic, 1, v, std::nullopt};
      }
      done = true;
      break;
    }
    Vertex m = mid_vertex(v, gv);
    Vertex gm = eval(m);
    int dm = distance(m, gm);
    if (dm < dv) { v = m; continue; }
    check_internal(dm == dv, "midpoint increased displacement");
    // Unbounded-orbit test: m lies on an axis iff the geodesics [m,gm] and
    // [gm,g^2 m] concatenate without backtracking.
    if (distance(m, eval(gm)) == 2 * dm) {
      out = Classification{Kind::Hyperbolic, dm, m, std::nullopt};
      done = true;
      break;
    }
    v = m;
  }
  if (!done) throw internal_error("classification did not converge");
  std::lock_guard<std::mutex> lock(mu_);
  if (!classification_) classification_ = out;
  return *classification_;
}

int Elem::dist_to_axis(const Vertex& v) const {
  const Classification& c = classify();
  if (c.kind != Kind::Hyperbolic) throw invalid_input("dist_to_axis needs a hyperbolic element");
  int dv = distance(v, eval(v));
  check_internal((dv - c.length) % 2 == 0 && dv >= c.length,
                 "displacement parity violated");
  return (dv - c.length) / 2;
}

Vertex Elem::project_to_axis(const Vertex& v) const {
  const Classification& c = classify();
  if (c.kind != Kind::Hyperbolic) throw invalid_input("project_to_axis needs a hyperbolic element");
  Vertex cur = v;
  while (distance(cur, eval(cur)) > c.length) cur = step_towards(cur, eval(cur));
  return cur;
}

bool Elem::on_axis(const Vertex& v) const { return dist_to_axis(v) == 0; }

bool Elem::axis_order_leq(const Vertex& u, const Vertex& v) const {
  const Classification& c = classify();
  if (c.kind != Kind::Hyperbolic) throw invalid_input("axis order needs a hyperbolic element");
  check_internal(on_axis(u) && on_axis(v), "axis order arguments must lie on the axis");
  if (u == v) return true;
  int k = distance(u, v) / c.length + 1;
  Vertex target = eval_power(k, u);
  for (const Vertex& w : geodesic(u, target))
    if (w == v) return true;
  return false;
}

long Elem::axis_position(const Vertex& u) const {
  const Classification& c = classify();
  if (u == c.axis_base) return 0;
  long d = distance(u, c.axis_base);
  return axis_order_leq(c.axis_base, u) ? d : -d;
}

Vertex Elem::axis_vertex(long position) const {
  const Classification& c = classify();
  if (c.kind != Kind::Hyperbolic) throw invalid_input("axis_vertex needs a hyperbolic element");
  std::lock_guard<std::mutex> lock(mu_);
  axis_cache_.emplace(0, c.axis_base);
  auto it = axis_cache_.find(position);
  if (it != axis_cache_.end()) return it->second;
  // Extend the cached chain towards the requested position.
  long known = position > 0 ? axis_cache_.rbegin()->first : axis_cache_.begin()->first;
  Vertex cur = position > 0 ? axis_cache_.rbegin()->second : axis_cache_.begin()->second;
  while (known != position) {
    if (position > known) {
      cur = step_towards(cur, eval(cur));
      ++known;
    } else {
      cur = step_towards(cur, eval_inverse(cur));
      --known;
    }
    axis_cache_.emplace(known, cur);
  }
  return cur;
}

const std::set<Vertex>& Elem::singularities() const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (singular_) return *singular_;
  }
  std::set<Vertex> candidates;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    const Letter& l = word_[i];
    for (const Vertex& s : l.portrait->singular_support()) {
      Vertex here = l.sign > 0 ? s : l.portrait->eval(s);  // S(p^-1) = p(S(p))
      Vertex v = here;
      for (std::size_t j = i; j-- > 0;) v = letter_eval_inv(j, v);
      candidates.insert(v);
    }
  }
  std::set<Vertex> out;
  for (const Vertex& v : candidates)
    if (!ctx_->F.contains(local_action(v))) out.insert(v);
  std::lock_guard<std::mutex> lock(mu_);
  if (!singular_) singular_ = std::move(out);
  return *singular_;
}

int Elem::sing_depth() const {
  if (!is_hyperbolic()) throw invalid_input("sing_depth needs a hyperbolic element");
  int d = 0;
  for (const Vertex& s : singularities()) d = std::max(d, dist_to_axis(s));
  return d;
}

std::optional<long> Elem::max_sing_projection() const {
  std::optional<long> out;
  for (const Vertex& s : singularities()) {
    long p = axis_position(project_to_axis(s));
    if (!out || p > *out) out = p;
  }
  return out;
}

std::optional<long> Elem::min_sing_projection() const {
  std::optional<long> out;
  for (const Vertex& s : singularities()) {
    long p = axis_position(project_to_axis(s));
    if (!out || p < *out) out = p;
  }
  return out;
}

int Elem::forward_escape(const Vertex& v) const {
  auto maxpos = max_sing_projection();
  if (!maxpos) return 0;
  long pos = axis_position(project_to_axis(v));
  long l = length();
  if (pos > *maxpos) return 0;
  return static_cast<int>((*maxpos - pos) / l + 1);
}

int Elem::backward_escape(const Vertex& v) const {
  auto minpos = min_sing_projection();
  if (!minpos) return 0;
  long pos = axis_position(project_to_axis(v));
  long l = length();
  if (pos < *minpos) return 0;
  return static_cast<int>((pos - *minpos) / l + 1);
}

Elem::MembershipReport Elem::validate_membership() const {
  MembershipReport r;
  r.singular = singularities();
  r.singular_count = r.singular.size();
  for (const Vertex& s : r.singular)
    if (!ctx_->Fprime.contains(local_action(s))) r.member = false;
  return r;
}

bool Elem::equal_on_ball(const Elem& other, int radius) const {
  for (const Vertex& v : ball(ctx_->degree, start_vertex(), radius))
    if (eval(v) != other.eval(v)) return false;
  for (const Vertex& v : ball(ctx_->degree, other.start_vertex(), radius))
    if (eval(v) != other.eval(v)) return false;
  std::set<Vertex> joint = singularities();
  const auto& os = other.singularities();
  joint.insert(os.begin(), os.end());
  for (const Vertex& v : joint)
    if (local_action(v) != other.local_action(v)) return false;
  return true;
}

Elem from_consistent_set(GroupCtxPtr ctx, const CompleteSubtree& A,
                         const std::map<Vertex, Perm>& locals, const Vertex& u,
                         const Vertex& u_prime) {
  auto p = std::make_shared<Portrait>(ctx, u, u_prime, A, locals);
  return Elem::from_portrait(std::move(p));
}

Elem translation_along(GroupCtxPtr ctx, const std::vector<colour>& backward_cycle,
                       const std::vector<colour>& forward_cycle) {
  if (forward_cycle.empty() || backward_cycle.empty())
    throw invalid_input("translation cycles must be non-empty");
  // Edge colour between path position k and k+1.
  auto edge_col = [&](long k) -> colour {
    if (k >= 0) return forward_cycle[static_cast<std::size_t>(k) % forward_cycle.size()];
    std::size_t idx = static_cast<std::size_t>(-k - 1) % backward_cycle.size();
    return backward_cycle[idx];
  };
  long period = static_cast<long>(std::max(forward_cycle.size(), backward_cycle.size()));
  long m = 2 * period + 2;
  for (long k = -m - 2 * period; k < m + 2 * period; ++k)
    if (edge_col(k) == edge_col(k + 1))
      throw invalid_input("translation path not reduced");

  auto path_vertex = [&](long k) {
    Vertex v = Vertex::root();
    for (long i = 0; i < k; ++i) v = v.neighbour(edge_col(i));
    for (long i = -1; i >= k; --i) v = v.neighbour(edge_col(i));
    return v;
  };

  std::map<Vertex, Perm> locals;
  std::set<Vertex> span;
  for (long k = -m; k <= m; ++k) {
    // Pins: backward edge colour maps onto the shifted backward colour and
    // forward onto the shifted forward colour.
    colour cb = edge_col(k - 1), cf = edge_col(k);
    colour tb = edge_col(k), tf = edge_col(k + 1);
    std::vector<Perm> cands = ctx->F.pinned_elements({{cb, tb}, {cf, tf}});
    if (cands.empty())
      throw invalid_input("translation pins unrealisable in F (is F 2-transitive?)");
    locals[path_vertex(k)] = cands.front();
    span.insert(path_vertex(k));
  }
  CompleteSubtree support = CompleteSubtree::complete_hull(ctx->degree, span);
  auto portrait = std::make_shared<Portrait>(ctx, path_vertex(0), path_vertex(1),
                                             support, locals);
  Elem h = Elem::from_portrait(portrait);
  // Certify that the canonical defaults continue the cycles; by periodicity
  // of the default state, two extra periods beyond the support suffice.
  for (long k = -m - 2 * period; k <= m + 2 * period; ++k)
    if (h.eval(path_vertex(k)) != path_vertex(k + 1))
      throw invalid_input("translation path not realisable with canonical defaults");
  return h;
}

Elem standard_translation(GroupCtxPtr ctx) {
  return translation_along(ctx, {1, 0}, {0, 1});
}

Elem default_translation(GroupCtxPtr ctx) {
  try {
    return standard_translation(ctx);
  } catch (const invalid_input&) {
    std::vector<colour> fwd, bwd;
    for (int c = 0; c < ctx->degree; ++c) {
      fwd.push_back(static_cast<colour>(c));
      bwd.push_back(static_cast<colour>(ctx->degree - 1 - c));
    }
    return translation_along(std::move(ctx), bwd, fwd);
  }
}

Elem rotation_about(GroupCtxPtr ctx, const Vertex& center, const Perm& tau) {
  CompleteSubtree support = CompleteSubtree::star(ctx->degree, center);
  std::map<Vertex, Perm> locals{{center, tau}};
  auto p = std::make_shared<Portrait>(ctx, center, center, support, std::move(locals));
  return Elem::from_portrait(std::move(p));
}

} // namespace bmg
