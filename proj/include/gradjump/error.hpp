#pragma once

#include <stdexcept>
#include <string>

#include "gradjump/tensor.hpp"

namespace gradjump {

enum class ErrorKind {
  Dimension,
  DegeneratePair,
  IncompatiblePair,
  NonsmoothPoint,
  Quadrature,
  OutOfRegion,
  BinodalEmpty,
  Nonconvergence,
  Config,
  Unsupported,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::Dimension, w) {}
};
struct DegeneratePairError : Error {
  explicit DegeneratePairError(const std::string& w) : Error(ErrorKind::DegeneratePair, w) {}
};
struct IncompatiblePairError : Error {
  IncompatiblePairError(const std::string& w, double ratio)
      : Error(ErrorKind::IncompatiblePair, w), singular_ratio(ratio) {}
  double singular_ratio;  // sigma_2 / sigma_1 of the jump
};

/// Thrown when a gradient is requested on the tie set of a min-of-wells
/// energy. Carries the gradients of the two competing branches.
struct NonsmoothPointError : Error {
  NonsmoothPointError(const std::string& w, std::size_t a, std::size_t b, Mat ga, Mat gb)
      : Error(ErrorKind::NonsmoothPoint, w),
        branch_a(a), branch_b(b), grad_a(std::move(ga)), grad_b(std::move(gb)) {}
  std::size_t branch_a, branch_b;
  Mat grad_a, grad_b;
};

struct QuadratureError : Error {
  explicit QuadratureError(const std::string& w) : Error(ErrorKind::Quadrature, w) {}
};
struct OutOfRegionError : Error {
  explicit OutOfRegionError(const std::string& w) : Error(ErrorKind::OutOfRegion, w) {}
};
struct BinodalEmptyError : Error {
  explicit BinodalEmptyError(const std::string& w) : Error(ErrorKind::BinodalEmpty, w) {}
};
struct NonconvergenceError : Error {
  explicit NonconvergenceError(const std::string& w) : Error(ErrorKind::Nonconvergence, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& w) : Error(ErrorKind::Unsupported, w) {}
};

}  // namespace gradjump
