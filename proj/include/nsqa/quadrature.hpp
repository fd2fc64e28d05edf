#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace nsqa {

/// Gauss-Hermite rule for the standard normal weight Dz = exp(-z^2/2) dz / sqrt(2 pi).
/// Weights sum to one.
class GaussQuadrature {
 public:
  explicit GaussQuadrature(int n = 120);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  double expectation(const std::function<double(double)>& f) const;

 private:
  std::vector<double> nodes_, weights_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gaussian expectations of integrands with a kink (or a sharp feature of
/// width `width`) at z0. Each side of z0 is split into a unit piece mapped by
/// z = z0 +- width*sinh(u), which crowds nodes at the kink, and a plain
/// remainder; every piece gets an n-point Gauss-Legendre rule. The line is
/// truncated at |z| <= cutoff, where the normal density is below 1e-17.
class KinkedGaussian {
 public:
  explicit KinkedGaussian(int n = 120, double cutoff = 9.0);

  int size() const { return static_cast<int>(x_.size()); }

  /// Calls visit(z, w) for every node; w includes the normal density.
  template <class Visit>
  void for_each(double z0, double width, Visit&& visit) const {
    z0 = std::min(std::max(z0, -cutoff_), cutoff_);
    if (!(width > 0.0)) width = 1e-3;  // pure |h| kink: each side is smooth
    half(z0, width, cutoff_ - z0, +1.0, visit);
    half(z0, width, z0 + cutoff_, -1.0, visit);
  }

 private:
  static double density(double z) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
  }

  template <class Visit>
  void half(double z0, double c, double length, double dir, Visit& visit) const {
    if (length <= 0.0) return;
    const double near = std::min(length, 1.0);
    const double umax = std::asinh(near / c);
    const double su = 0.5 * umax;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double u = su * (x_[i] + 1.0);
      const double z = z0 + dir * c * std::sinh(u);
      visit(z, w_[i] * su * c * std::cosh(u) * density(z));
    }
    if (length <= near) return;
    const double sl = 0.5 * (length - near);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double z = z0 + dir * (near + sl * (x_[i] + 1.0));
      visit(z, w_[i] * sl * density(z));
    }
  }

  double cutoff_;
  std::vector<double> x_, w_;
};

}  // namespace nsqa
