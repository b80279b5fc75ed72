#pragma once

#include <stdexcept>
#include <string>

namespace lipfree {

// Construction of an operator with f(0) != 0 and w(0) != 0.
class admissibility_error : public std::invalid_argument {
 public:
  explicit admissibility_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// Iterative kernel failed to converge (QR, SVD, inverse iteration, simplex).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Problem file does not match the input schema.
class schema_error : public std::runtime_error {
 public:
  explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lipfree
