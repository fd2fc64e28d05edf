#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsqa {

/// Raised when an input lies outside the domain of an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative numerical method fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { stoquastic, nonstoquastic };

/// Mean-field annealing problem: -s*lambda*N*mz^p + s*(1-lambda)*N*mx^k - (1-s)*N*mx.
/// The stoquastic variant ignores lambda (it always behaves as lambda = 1).
struct ModelSpec {
  int p = 5;
  int k = 2;
  Variant variant = Variant::nonstoquastic;

  void validate() const;
};

struct AnnealPoint {
  double s = 0.0;
  double lambda = 1.0;

  void validate() const;
};

/// Lambda actually seen by the Hamiltonian for a given model.
inline double effective_lambda(const ModelSpec& spec, const AnnealPoint& pt) {
  return spec.variant == Variant::stoquastic ? 1.0 : pt.lambda;
}

/// Piecewise-linear path in the (s, lambda) plane with strictly increasing s
/// from s = 0 to s = 1.
class AnnealPath {
 public:
  explicit AnnealPath(std::vector<AnnealPoint> waypoints);

  /// Constant-lambda path from s = 0 to s = 1.
  static AnnealPath constant(double lambda);

  /// Parses "s:lambda,s:lambda,..."; throws ParameterError on malformed input.
  static AnnealPath parse(const std::string& text);

  double lambda_at(double s) const;
  AnnealPoint at(double s) const { return {s, lambda_at(s)}; }
  const std::vector<AnnealPoint>& waypoints() const { return waypoints_; }
  std::string to_string() const;

 private:
  std::vector<AnnealPoint> waypoints_;
};

}  // namespace nsqa
