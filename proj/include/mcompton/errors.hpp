#ifndef MCOMPTON_ERRORS_HPP
#define MCOMPTON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcompton {

// Raised when a kinematic denominator is degenerate (collinear photon
// directions, vanishing Jacobian) and the requested point has no usable value.
class KinematicsError : public std::runtime_error {
 public:
  explicit KinematicsError(const std::string& what) : std::runtime_error(what) {}
};

// Raised on malformed scenario input or out-of-domain configuration values.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an iterative numerical routine cannot reach its contract
// (non-finite intermediates, factorization breakdown).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a scenario or output file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcompton

#endif
