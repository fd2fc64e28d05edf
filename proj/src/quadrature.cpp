#include "nsqa/quadrature.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "nsqa/model.hpp"

namespace nsqa {

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mass,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolver failed");
  const int n = static_cast<int>(diag.size());
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    weights[i] = mass * v * v;
  }
}

}  // namespace

GaussQuadrature::GaussQuadrature(int n) {
  if (n < 1 || n > 4000) throw ParameterError("quadrature node count must lie in [1, 4000]");
  // Probabilists' Hermite recurrence: off-diagonal sqrt(i).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) off[i - 1] = std::sqrt(static_cast<double>(i));
  golub_welsch(diag, off, 1.0, nodes_, weights_);
}

double GaussQuadrature::expectation(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
  return acc;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ParameterError("quadrature node count must be positive");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) off[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
  golub_welsch(diag, off, 2.0, nodes, weights);
}

KinkedGaussian::KinkedGaussian(int n, double cutoff) : cutoff_(cutoff) {
  if (n < 2 || n > 4000) throw ParameterError("quadrature node count must lie in [2, 4000]");
  gauss_legendre(n, x_, w_);
}

}  // namespace nsqa
