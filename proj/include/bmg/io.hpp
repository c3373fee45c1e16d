#ifndef BMG_IO_HPP
#define BMG_IO_HPP

#include <string>
#include <vector>

#include "bmg/element.hpp"
#include "bmg/scale.hpp"

namespace bmg {

// Parsed group file: degree plus generator lists for F and F'.  The context
// carries F' intersected with the Young subgroup of F; `trim_warning` is set
// when that intersection removed generators' closure elements.
struct GroupSpec {
  int degree = 0;
  std::vector<Perm> f_generators;
  std::vector<Perm> fprime_generators;
  GroupCtxPtr ctx;
  bool trim_warning = false;
};

struct RunConfig {
  int depth = 0;  // 0 = operation defaults
  std::uint64_t seed = 1;
  bool machine = false;
  Caps caps;
};

// Group file grammar:
//   degree <d>
//   [F]
//   <one permutation per line, space-separated image list>
//   [Fprime]           (optional; defaults to F)
//   ...
GroupSpec parse_group(const std::string& path);
GroupSpec parse_group_text(const std::string& text, const std::string& origin);

// Element files.  A portrait file:
//   base <addr>
//   image <addr>
//   local <addr> <image list>     (repeatable)
// A word file (detected by its first directive):
//   use <portrait-file> <+1|-1>   (rightmost/last line acts first)
Elem parse_element(const std::string& path, const GroupSpec& spec);

std::string serialize_group(const GroupSpec& spec);
std::string serialize_portrait(const Portrait& p);

} // namespace bmg

#endif
