#ifndef BMG_ERRORS_HPP
#define BMG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bmg {

// Input data violates a documented precondition or file grammar.
class invalid_input : public std::runtime_error {
public:
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// A configured resource cap was hit.  Never downgraded to an approximation.
class cap_exceeded : public std::runtime_error {
public:
  explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// An invariant that is guaranteed by construction failed; always a bug.
class internal_error : public std::logic_error {
public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

inline void check_internal(bool ok, const char* msg) {
  if (!ok) throw internal_error(msg);
}

} // namespace bmg

#endif
