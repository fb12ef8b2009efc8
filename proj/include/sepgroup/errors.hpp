#ifndef SEPGROUP_ERRORS_HPP
#define SEPGROUP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sepg {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-canonical literal / scenario input.
class parse_error : public error {
 public:
  using error::error;
};

/// A value violates a structural precondition (invalid ladder, gcd != 1, ...).
class validation_error : public error {
 public:
  using error::error;
};

/// An index, generator or ordinal lies outside the scope of the object it was
/// applied to.
class scope_error : public error {
 public:
  using error::error;
};

/// The explored prefix of a ladder (or a coloring) is too short for the
/// requested computation. Remedy: increase depth.
class depth_error : public error {
 public:
  explicit depth_error(const std::string& what)
      : error(what + " (increase depth)") {}
};

}  // namespace sepg

#endif  // SEPGROUP_ERRORS_HPP
