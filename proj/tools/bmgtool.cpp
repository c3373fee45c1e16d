// Command-line front end: parse group and element files, dispatch the
// classification / scale / direction computations, run the verification
// suite.  Exit codes: 0 success, 1 failure, 2 resource cap exceeded,
// 3 unknown verdict.

#include <CLI11.hpp>

#include <iostream>
#include <random>
#include <sstream>

#include "bmg/directions.hpp"
#include "bmg/io.hpp"
#include "bmg/scale.hpp"
#include "bmg/semigroup.hpp"

using namespace bmg;

namespace {

struct Cli {
  std::string group_path;
  RunConfig config;
  bool unknown_seen = false;

  GroupSpec group() const {
    if (group_path.empty()) throw invalid_input("this command needs --group <file>");
    GroupSpec spec = parse_group(group_path);
    if (spec.trim_warning && !config.machine)
      std::cout << "warning: F' intersected with the Young subgroup of F\n";
    return spec;
  }
};

std::string kind_str(Kind k) { return k == Kind::Elliptic ? "elliptic" : "hyperbolic"; }

void cmd_classify(Cli& cli, const std::string& elem_path) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(elem_path, spec);
  const Classification& c = g.classify();
  std::cout << "kind=" << kind_str(c.kind) << " length=" << c.length;
  if (c.kind == Kind::Hyperbolic)
    std::cout << " axis_base=" << c.axis_base.str();
  else if (c.inverted_edge)
    std::cout << " inverted_edge=" << c.inverted_edge->origin.str() << ","
              << c.inverted_edge->target().str();
  else
    std::cout << " fixed=" << c.axis_base.str();
  std::cout << "\n";
}

void cmd_scale(Cli& cli, const std::string& elem_path) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(elem_path, spec);
  ScaleBreakdown b = scale_breakdown(g, cli.config.caps);
  std::cout << "scale=" << b.value.get_str() << " numerator=" << b.numerator.get_str()
            << " m_size=" << b.m_size.get_str() << " pando_int=" << b.pando_internal
            << "\n";
}

void cmd_sing(Cli& cli, const std::string& elem_path) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(elem_path, spec);
  auto report = g.validate_membership();
  std::cout << "member=" << (report.member ? "yes" : "no")
            << " sing_count=" << report.singular_count;
  if (g.is_hyperbolic()) std::cout << " depth=" << g.sing_depth();
  std::cout << "\n";
  for (const Vertex& s : report.singular)
    std::cout << "sing " << s.str() << " sigma=" << g.local_action(s).str() << "\n";
}

void cmd_lambda(Cli& cli, const std::string& elem_path) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(elem_path, spec);
  if (!g.is_hyperbolic()) throw invalid_input("lambda needs a hyperbolic element");
  std::set<Vertex> support = lambda_support(g);
  std::cout << "support_window=" << support.size() << "\n";
  for (const Vertex& v : support) {
    auto [coset, H] = lambda_coset(g, v);
    std::cout << "lambda " << v.str() << " rep=" << coset.representative().str()
              << " H=" << H << "\n";
  }
}

int cmd_asym(Cli& cli, const std::string& e1, const std::string& e2) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(e1, spec);
  Elem h = parse_element(e2, spec);
  ThreeValued v = asymptotic(g, h, cli.config.depth);
  std::cout << "asymptotic=" << verdict_str(v.verdict) << " depth=" << v.depth
            << " certificate=" << v.certificate << "\n";
  return v.is_unknown() ? 3 : 0;
}

void cmd_nlen(Cli& cli, const std::string& e1, const std::string& e2, int p, int q,
              int nmax) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(e1, spec);
  Elem h = parse_element(e2, spec);
  EdgeRef e{Vertex::root(), 0};
  auto seq = length_diagnostic(g, h, p, q, nmax, e);
  std::cout << "nlen";
  for (std::size_t n : seq) std::cout << " " << n;
  std::cout << "\n";
}

void cmd_pando(Cli& cli, const std::string& elem_path) {
  GroupSpec spec = cli.group();
  Elem g = parse_element(elem_path, spec);
  Pando p = make_pando(g, std::nullopt, cli.config.caps);
  CompleteSubtree P0 = initial_segment(p);
  std::cout << "pando_size=" << p.tree.size() << " pando_int=" << p.tree.internal().size()
            << " depth=" << p.depth << " window=" << p.axis_window.first.str() << ","
            << p.axis_window.second.str() << " initial_size=" << P0.size()
            << " initial_int=" << P0.internal().size() << "\n";
}

void cmd_semigroup(Cli& cli, const std::vector<std::string>& elems, int word_len,
                   std::size_t pairs) {
  GroupSpec spec = cli.group();
  std::vector<Elem> gens;
  for (const std::string& path : elems) gens.push_back(parse_element(path, spec));
  SemigroupSample S = SemigroupSample::generate(gens, word_len, cli.config.caps);
  MultReport report =
      check_scale_multiplicative(S, pairs, cli.config.seed, cli.config.caps);
  for (const auto& line : report.lines) std::cout << line.str() << "\n";
  std::cout << "multiplicative=" << (report.multiplicative ? "yes" : "no") << "\n";
}

// The seeded invariant battery behind `verify`.  Machine output only; byte
// identical for a fixed seed.
int cmd_verify(Cli& cli) {
  std::uint64_t seed = cli.config.seed;
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& extra = "") {
    std::cout << (ok ? "ok " : "FAIL ") << name;
    if (!extra.empty()) std::cout << " " << extra;
    std::cout << "\n";
    if (!ok) ++failures;
  };

  auto s3 = GroupContext::make(3, PermGroup::symmetric(3), PermGroup::symmetric(3));
  PermGroup a4g = PermGroup::enumerate(
      4, {Perm::from_images({1, 2, 0, 3}), Perm::from_images({0, 2, 3, 1})});
  auto a4 = GroupContext::make(4, a4g, PermGroup::symmetric(4));
  PermGroup c4g = PermGroup::enumerate(4, {Perm::from_images({1, 2, 3, 0})});
  auto c4 = GroupContext::make(4, c4g, PermGroup::symmetric(4));

  {
    bool ok = true;
    for (int d = 3; d <= 5 && ok; ++d)
      for (int k = 0; k <= 4 && ok; ++k)
        ok = sphere_around_edge(d, EdgeRef{Vertex::root(), 0}, k).size() ==
             sphere_size(d, k);
    report("sphere-formula", ok, "dmax=5 kmax=4");
  }
  {
    Elem h = standard_translation(s3);
    bool ok = true;
    Index expect = 1;
    for (int l = 1; l <= 3; ++l) {
      expect *= 2;
      ok = ok && scale(h.power(l)) == expect;
    }
    report("scale-translations", ok, "F=Sym3");
  }
  {
    std::mt19937_64 rng(seed);
    bool ok = true;
    std::ostringstream note;
    for (auto ctx : {s3, a4}) {
      Elem base = standard_translation(ctx);
      std::uniform_int_distribution<std::size_t> pick(0, ctx->F.order() - 1);
      for (int trial = 0; trial < 5 && ok; ++trial) {
        Elem x = rotation_about(ctx, Vertex::parse("12"), ctx->F.elements()[pick(rng)]);
        Elem g = base.power(1 + trial % 2).conjugated_by(x);
        ok = g.is_hyperbolic() && scale_closed_form_uf(g) == scale(g);
      }
    }
    report("closed-form-agreement", ok, "samples=10");
  }
  {
    Elem h = standard_translation(a4);
    Elem t = rotation_about(a4, h.classify().axis_base, Perm::from_images({0, 1, 3, 2}));
    Elem g = h.then(t);
    bool ok = g.is_hyperbolic();
    Index s = ok ? scale(g) : Index(0);
    if (ok) {
      long past = *g.max_sing_projection() + 1;
      ok = scale_flex(g, g.axis_vertex(past), g.sing_depth() + 1) == s &&
           scale_flex(g, g.axis_vertex(past + 2), g.sing_depth() + 2) == s &&
           scale(g.power(2)) == s * s;
    }
    report("pando-independence-and-powers", ok, "F=A4 scale=" + s.get_str());
  }
  {
    auto w = uniscalar_witness(c4);
    bool ok = w.has_value() && scale(*w) == 1 && !uniscalar_witness(s3).has_value();
    report("uniscalar-dichotomy", ok, "F=C4");
  }
  {
    std::mt19937_64 rng(seed + 1);
    Elem h = standard_translation(a4);
    Elem t = rotation_about(a4, h.classify().axis_base, Perm::from_images({0, 1, 3, 2}));
    Elem g = h.then(t);
    LambdaTable lam(g);
    bool ok = true;
    std::uniform_int_distribution<int> pos(-3, 3), off(0, 3), kk(1, 4);
    for (int i = 0; i < 50 && ok; ++i) {
      Vertex v = g.axis_vertex(pos(rng));
      for (int j = off(rng); j-- > 0;) v = v.neighbour(static_cast<colour>(off(rng)));
      int k = kk(rng);
      Vertex back = g.eval_power(-k, v);
      ok = lam.at(v).first == lam.at(back).first.left_mul(g.local_action_power(k, back));
      if (ok && g.dist_to_axis(v) > g.sing_depth()) ok = lam.at(v).first.is_trivial();
      if (ok) ok = lambda_coset(g.power(2), v).first == lam.at(v).first;
    }
    report("lambda-laws", ok, "samples=50");
  }
  {
    Elem g = standard_translation(a4);
    Elem t = rotation_about(a4, g.classify().axis_base, Perm::from_images({0, 1, 3, 2}));
    Elem tw = g.then(t);
    bool ok = asymptotic(tw, tw.power(2)).is_equal() && asymptotic(tw, g).is_not_equal();
    report("asymptotic-classification", ok, "F=A4");
  }
  {
    std::mt19937_64 rng(seed + 2);
    bool ok = true;
    std::uniform_int_distribution<std::size_t> pick(0, s3->F.order() - 1);
    for (int i = 0; i < 5 && ok; ++i) {
      Elem r = rotation_about(s3, Vertex::parse("01"), s3->F.elements()[pick(rng)]);
      ok = scale(r) == 1;
    }
    report("elliptic-scale", ok, "samples=5");
  }
  std::cout << "verify seed=" << seed << " failures=" << failures << "\n";
  return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact workbench for restricted Burger-Mozes groups on trees"};
  Cli cli;
  app.add_option("--group", cli.group_path, "group file (degree, [F], [Fprime])");
  app.add_option("--depth", cli.config.depth, "verdict depth budget");
  app.add_option("--seed", cli.config.seed, "random seed");
  app.add_flag("--machine", cli.config.machine, "machine-readable output only");
  app.add_option("--max-nodes", cli.config.caps.max_nodes, "enumeration node budget");
  app.add_option("--max-int", cli.config.caps.max_internal,
                 "interior-size cap for enumerated trees");

  std::string e1, e2;
  int p = 1, q = 1, nmax = 8, word_len = 3;
  std::size_t pairs = 16;
  std::vector<std::string> gens;

  auto* c_classify = app.add_subcommand("classify", "classify an element");
  c_classify->add_option("elem", e1)->required();
  auto* c_scale = app.add_subcommand("scale", "scale of an element");
  c_scale->add_option("elem", e1)->required();
  auto* c_sing = app.add_subcommand("sing", "singular set of an element");
  c_sing->add_option("elem", e1)->required();
  auto* c_lambda = app.add_subcommand("lambda", "lambda trajectory table");
  c_lambda->add_option("elem", e1)->required();
  auto* c_asym = app.add_subcommand("asym", "asymptotic comparison");
  c_asym->add_option("elem1", e1)->required();
  c_asym->add_option("elem2", e2)->required();
  auto* c_nlen = app.add_subcommand("nlen", "length diagnostic sequence");
  c_nlen->add_option("elem1", e1)->required();
  c_nlen->add_option("elem2", e2)->required();
  c_nlen->add_option("--p", p);
  c_nlen->add_option("--q", q);
  c_nlen->add_option("--nmax", nmax);
  auto* c_pando = app.add_subcommand("pando", "pando statistics");
  c_pando->add_option("elem", e1)->required();
  auto* c_semi = app.add_subcommand("semigroup-check", "scale multiplicativity");
  c_semi->add_option("elems", gens)->required()->expected(-1);
  c_semi->add_option("--word-len", word_len);
  c_semi->add_option("--pairs", pairs);
  auto* c_verify = app.add_subcommand("verify", "run the invariant suite");

  app.require_subcommand(1);
  app.fallthrough();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    if (c_classify->parsed()) cmd_classify(cli, e1);
    else if (c_scale->parsed()) cmd_scale(cli, e1);
    else if (c_sing->parsed()) cmd_sing(cli, e1);
    else if (c_lambda->parsed()) cmd_lambda(cli, e1);
    else if (c_asym->parsed()) return cmd_asym(cli, e1, e2);
    else if (c_nlen->parsed()) cmd_nlen(cli, e1, e2, p, q, nmax);
    else if (c_pando->parsed()) cmd_pando(cli, e1);
    else if (c_semi->parsed()) cmd_semigroup(cli, gens, word_len, pairs);
    else if (c_verify->parsed()) return cmd_verify(cli);
  } catch (const cap_exceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
