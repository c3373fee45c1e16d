#include "bmg/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace bmg {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& what) {
  throw invalid_input(origin + ":" + std::to_string(line) + ": " + what);
}

Perm parse_perm(const std::string& text, const std::string& origin, int line) {
  std::istringstream is(text);
  std::vector<int> images;
  int v;
  while (is >> v) images.push_back(v);
  if (images.empty()) fail_at(origin, line, "empty permutation");
  try {
    return Perm::from_images(images);
  } catch (const invalid_input& e) {
    fail_at(origin, line, e.what());
  }
}

} // namespace

GroupSpec parse_group_text(const std::string& text, const std::string& origin) {
  GroupSpec spec;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  enum Section { None, F, Fprime } section = None;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "degree") {
      if (!(ls >> spec.degree)) fail_at(origin, lineno, "degree wants a number");
      if (spec.degree < 3 || spec.degree > kMaxDegree)
        fail_at(origin, lineno, "tree degree must be between 3 and 12");
    } else if (first == "[F]") {
      section = F;
    } else if (first == "[Fprime]") {
      section = Fprime;
    } else {
      if (spec.degree == 0) fail_at(origin, lineno, "degree must come first");
      if (section == None) fail_at(origin, lineno, "permutation outside a section");
      Perm p = parse_perm(line, origin, lineno);
      if (p.degree() != spec.degree) fail_at(origin, lineno, "permutation degree mismatch");
      (section == F ? spec.f_generators : spec.fprime_generators).push_back(p);
    }
  }
  if (spec.degree == 0) throw invalid_input(origin + ": missing degree");
  PermGroup Fg = PermGroup::enumerate(spec.degree, spec.f_generators);
  PermGroup Fpg = spec.fprime_generators.empty()
                      ? Fg
                      : PermGroup::enumerate(spec.degree, spec.fprime_generators);
  if (!Fg.is_subgroup_of(Fpg)) throw invalid_input(origin + ": F is not contained in F'");
  spec.ctx = GroupContext::make(spec.degree, std::move(Fg), std::move(Fpg));
  spec.trim_warning = spec.ctx->fprime_trimmed;
  return spec;
}

GroupSpec parse_group(const std::string& path) {
  return parse_group_text(read_file(path), path);
}

namespace {

Elem parse_portrait_text(const std::string& text, const std::string& origin,
                         const GroupSpec& spec) {
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  bool have_base = false, have_image = false;
  Vertex base, image;
  std::map<Vertex, Perm> locals;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    try {
      if (key == "base") {
        std::string addr;
        ls >> addr;
        base = Vertex::parse(addr);
        have_base = true;
      } else if (key == "image") {
        std::string addr;
        ls >> addr;
        image = Vertex::parse(addr);
        have_image = true;
      } else if (key == "local") {
        std::string addr;
        ls >> addr;
        Vertex v = Vertex::parse(addr);
        std::string rest;
        std::getline(ls, rest);
        locals.emplace(v, parse_perm(rest, origin, lineno));
      } else {
        fail_at(origin, lineno, "unknown directive '" + key + "'");
      }
    } catch (const invalid_input& e) {
      std::string what = e.what();
      if (what.find(origin) == std::string::npos) fail_at(origin, lineno, what);
      throw;
    }
  }
  if (!have_base || !have_image)
    throw invalid_input(origin + ": portrait needs base and image");
  std::set<Vertex> span{base};
  for (const auto& [v, p] : locals) span.insert(v);
  CompleteSubtree support = CompleteSubtree::complete_hull(spec.degree, span);
  auto p = std::make_shared<Portrait>(spec.ctx, base, image, support, locals);
  return Elem::from_portrait(std::move(p));
}

} // namespace

Elem parse_element(const std::string& path, const GroupSpec& spec) {
  std::string text = read_file(path);
  // A word file's first directive is "use".
  std::istringstream probe(text);
  std::string raw, first;
  while (std::getline(probe, raw)) {
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    if (ls >> first) break;
    first.clear();
  }
  if (first != "use") return parse_portrait_text(text, path, spec);

  std::istringstream is(text);
  int lineno = 0;
  std::vector<Elem::Letter> reversed;
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string key, file, sign;
    if (!(ls >> key)) continue;
    if (key != "use") fail_at(path, lineno, "word files hold 'use' lines only");
    if (!(ls >> file >> sign)) fail_at(path, lineno, "use wants a file and a sign");
    int s = 0;
    if (sign == "+1") s = 1;
    else if (sign == "-1") s = -1;
    else fail_at(path, lineno, "sign must be +1 or -1");
    Elem part = parse_element((dir / file).string(), spec);
    check_internal(part.word().size() == 1, "portrait files produce single letters");
    reversed.push_back(Elem::Letter{part.word().front().portrait, s});
  }
  // Rightmost (last) line acts first.
  std::vector<Elem::Letter> word(reversed.rbegin(), reversed.rend());
  return Elem(spec.ctx, std::move(word));
}

std::string serialize_group(const GroupSpec& spec) {
  std::ostringstream os;
  os << "degree " << spec.degree << "\n[F]\n";
  for (const Perm& p : spec.f_generators) os << p.str() << "\n";
  if (!spec.fprime_generators.empty()) {
    os << "[Fprime]\n";
    for (const Perm& p : spec.fprime_generators) os << p.str() << "\n";
  }
  return os.str();
}

std::string serialize_portrait(const Portrait& p) {
  std::ostringstream os;
  os << "base " << p.base().str() << "\n";
  os << "image " << p.image().str() << "\n";
  for (const auto& [v, sigma] : p.locals())
    os << "local " << v.str() << " " << sigma.str() << "\n";
  return os.str();
}

} // namespace bmg
