#pragma once

#include <vector>

#include "nsqa/minimize.hpp"
#include "nsqa/model.hpp"

namespace nsqa {

/// x^n for small non-negative integer n by repeated multiplication.
inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

namespace landscape {

/// Result of minimizing a one-dimensional energy landscape. For the spin
/// landscapes the coordinate is the polar angle theta in [0, pi]; for the
/// classical free energy it is the magnetization m in [0, 1].
struct LandscapeSolution {
  double minimizer = 0.0;
  double value = 0.0;
  std::vector<LocalMinimum> minima;  // sorted by value, minima.front() is the global one
  double curvature_at_origin = 0.0;  // second derivative at theta = 0 (or m = 0)
};

/// Coefficients of the semiclassical energy per site
///   e(theta) = -target*sin^p + multi_x*cos^k - field*cos - bath_x*cos^2 - bath_z*sin^2.
struct EnergyTerms {
  double target = 0.0;   // s*lambda
  double multi_x = 0.0;  // s*(1-lambda)
  double field = 0.0;    // 1-s
  double bath_x = 0.0;   // reorganization constant for x coupling
  double bath_z = 0.0;   // reorganization constant for z coupling
};

EnergyTerms terms_for(const AnnealPoint& point, const ModelSpec& spec);

double evaluate(const EnergyTerms& t, double theta, int p, int k);

/// Second derivative of the landscape at theta = 0 (at_pi = false) or theta = pi.
double boundary_curvature(const EnergyTerms& t, int p, int k, bool at_pi);

/// Landau free energy per site (p-1) m^p - T ln(2 cosh(p m^{p-1} / T)).
double classical_free_energy(double m, double T, int p);

/// -s sin^p(theta) - (1-s) cos(theta).
double stoquastic_energy(double theta, double s, int p);

/// -s*lambda sin^p(theta) + s(1-lambda) cos^k(theta) - (1-s) cos(theta).
double nonstoquastic_energy(double theta, const AnnealPoint& point, const ModelSpec& spec);

/// Coefficient of theta^2 in the expansion of the non-stoquastic energy about
/// theta = 0: ((1-s) - k s (1-lambda)) / 2. Rejects p = 2, whose target term
/// contributes its own quadratic piece.
double landau_quadratic_coefficient(const AnnealPoint& point, const ModelSpec& spec);

/// Grid scan over theta in [0, pi] plus golden-section refinement of every basin.
LandscapeSolution minimize_landscape(const AnnealPoint& point, const ModelSpec& spec,
                                     int grid_points = 4096);

/// Global minimization of the classical free energy over m in [0, 1].
LandscapeSolution minimize_classical_free_energy(double T, int p, int grid_points = 4096);

/// Precomputes sin^p, cos^k, cos on a fixed theta grid so that many landscapes
/// with different coefficients can be minimized cheaply.
class ThetaGrid {
 public:
  ThetaGrid(int p, int k, int grid_points = 4096);

  LandscapeSolution minimize(const EnergyTerms& t) const;
  double energy(const EnergyTerms& t, double theta) const { return evaluate(t, theta, p_, k_); }
  int p() const { return p_; }
  int k() const { return k_; }
  int size() const { return static_cast<int>(theta_.size()); }

 private:
  int p_;
  int k_;
  std::vector<double> theta_, sin_p_, cos_k_, cos_, cos2_;
};

}  // namespace landscape
}  // namespace nsqa
