#pragma once

#include <stdexcept>
#include <string>

namespace fbm {

/// Malformed or missing input data (files, headers, payloads).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric degeneracy: rank-deficient estimation problems, points at
/// infinity, non-invertible transforms, consensus failure.
class DegenerateGeometry : public std::runtime_error {
 public:
  explicit DegenerateGeometry(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace fbm
