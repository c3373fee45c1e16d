#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bmg/io.hpp"

using namespace bmg;

namespace {

std::filesystem::path write_tmp(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "bmg_io_test";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream out(path);
  out << text;
  return path;
}

const char* kGroupS3 =
    "degree 3\n"
    "[F]\n"
    "1 0 2\n"
    "0 2 1\n";

const char* kGroupC3Sym =
    "degree 3\n"
    "[F]\n"
    "1 2 0\n"
    "[Fprime]\n"
    "1 0 2\n"
    "1 2 0\n";

} // namespace

TEST_CASE("group files") {
  GroupSpec s3 = parse_group_text(kGroupS3, "<s3>");
  CHECK(s3.degree == 3);
  CHECK(s3.ctx->F.order() == 6);
  CHECK(s3.ctx->Fprime.order() == 6);
  CHECK(!s3.trim_warning);

  GroupSpec mixed = parse_group_text(kGroupC3Sym, "<c3>");
  CHECK(mixed.ctx->F.order() == 3);
  // C3 is transitive, its Young subgroup is Sym(3): no trimming.
  CHECK(mixed.ctx->Fprime.order() == 6);
  CHECK(!mixed.trim_warning);

  CHECK_THROWS_AS(parse_group_text("degree 2\n[F]\n1 0\n", "<bad>"), invalid_input);
  CHECK_THROWS_AS(parse_group_text("[F]\n1 0 2\n", "<bad>"), invalid_input);
  CHECK_THROWS_AS(parse_group_text("degree 3\n1 0 2\n", "<bad>"), invalid_input);
  CHECK_THROWS_AS(parse_group_text("degree 3\n[F]\n1 1 2\n", "<bad>"), invalid_input);
  // F must be contained in the given F'.
  CHECK_THROWS_AS(
      parse_group_text("degree 3\n[F]\n1 0 2\n0 2 1\n[Fprime]\n1 2 0\n", "<bad>"),
      invalid_input);
}

TEST_CASE("fprime trimming against the Young subgroup") {
  // F = <(0 1)> has orbits {0,1},{2}: F-hat has order 2, so a full Sym(3)
  // F' must be trimmed with a warning flag.
  const char* text =
      "degree 3\n"
      "[F]\n"
      "1 0 2\n"
      "[Fprime]\n"
      "1 0 2\n"
      "1 2 0\n";
  GroupSpec spec = parse_group_text(text, "<trim>");
  CHECK(spec.trim_warning);
  CHECK(spec.ctx->Fprime.order() == 2);
}

TEST_CASE("portrait files") {
  GroupSpec spec = parse_group_text(kGroupC3Sym, "<c3>");
  auto p = write_tmp("twist.portrait",
                     "base 01\n"
                     "image 01\n"
                     "local 01 0 2 1\n");
  Elem t = parse_element(p.string(), spec);
  CHECK(t.singularities() == std::set<Vertex>{Vertex::parse("01")});
  CHECK(t.validate_membership().member);

  auto bad = write_tmp("bad.portrait", "base 00\nimage -\n");
  CHECK_THROWS_AS(parse_element(bad.string(), spec), invalid_input);
  auto nospec = write_tmp("partial.portrait", "base -\n");
  CHECK_THROWS_AS(parse_element(nospec.string(), spec), invalid_input);
}

TEST_CASE("word files apply right to left") {
  GroupSpec spec = parse_group_text(kGroupS3, "<s3>");
  write_tmp("rot.portrait",
            "base -\n"
            "image -\n"
            "local - 1 2 0\n");
  write_tmp("shift.portrait",
            "base -\n"
            "image 0\n"
            "local - 0 1 2\n");
  auto w = write_tmp("word.elem",
                     "use rot.portrait +1\n"
                     "use shift.portrait +1\n");
  Elem g = parse_element(w.string(), spec);
  // The shift acts first (rightmost line), then the rotation.
  Vertex v = Vertex::parse("1");
  Elem shift = parse_element(write_tmp("shift.portrait", "base -\nimage 0\nlocal - 0 1 2\n").string(), spec);
  Elem rot = parse_element(write_tmp("rot.portrait", "base -\nimage -\nlocal - 1 2 0\n").string(), spec);
  CHECK(g.eval(v) == rot.eval(shift.eval(v)));
  // Inverse signs round-trip.
  auto w2 = write_tmp("word2.elem",
                      "use shift.portrait -1\n"
                      "use shift.portrait +1\n");
  Elem idish = parse_element(w2.string(), spec);
  CHECK(idish.eval(Vertex::parse("012")) == Vertex::parse("012"));
}

TEST_CASE("serialization round trip") {
  GroupSpec spec = parse_group_text(kGroupC3Sym, "<c3>");
  GroupSpec again = parse_group_text(serialize_group(spec), "<round>");
  CHECK(again.ctx->F.same_elements(spec.ctx->F));
  CHECK(again.ctx->Fprime.same_elements(spec.ctx->Fprime));

  Elem t = rotation_about(spec.ctx, Vertex::parse("0"), Perm::from_images({0, 2, 1}));
  std::string text = serialize_portrait(*t.word().front().portrait);
  auto p = write_tmp("round.portrait", text);
  Elem t2 = parse_element(p.string(), spec);
  CHECK(t.equal_on_ball(t2, 4));
}
