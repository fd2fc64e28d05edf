#include "nsqa/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nsqa::landscape {

EnergyTerms terms_for(const AnnealPoint& point, const ModelSpec& spec) {
  const double lam = effective_lambda(spec, point);
  EnergyTerms t;
  t.target = point.s * lam;
  t.multi_x = point.s * (1.0 - lam);
  t.field = 1.0 - point.s;
  return t;
}

double evaluate(const EnergyTerms& t, double theta, int p, int k) {
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  double e = -t.target * ipow(sn, p) + t.multi_x * ipow(c, k) - t.field * c;
  if (t.bath_x != 0.0) e -= t.bath_x * c * c;
  if (t.bath_z != 0.0) e -= t.bath_z * sn * sn;
  return e;
}

double boundary_curvature(const EnergyTerms& t, int p, int k, bool at_pi) {
  // d2/dtheta2 of sin^p is 2 at both ends for p = 2 and 0 for p >= 3.
  const double target = p == 2 ? -2.0 * t.target : 0.0;
  // cos^k ~ (+-1)^k (1 - k phi^2 / 2).
  const double kx = (at_pi && k % 2 == 1) ? 1.0 : -1.0;
  const double multi = t.multi_x * kx * k;
  const double field = at_pi ? -t.field : t.field;
  return target + multi + field + 2.0 * t.bath_x - 2.0 * t.bath_z;
}

double classical_free_energy(double m, double T, int p) {
  if (!(m >= 0.0 && m <= 1.0)) throw ParameterError("m must lie in [0, 1]");
  if (!(T > 0.0)) throw ParameterError("temperature must be positive");
  if (p < 2) throw ParameterError("p must be >= 2");
  const double x = p * ipow(m, p - 1) / T;
  // ln(2 cosh x) = |x| + ln(1 + exp(-2|x|)), stable for large x.
  const double ax = std::abs(x);
  const double log2cosh = ax + std::log1p(std::exp(-2.0 * ax));
  return (p - 1) * ipow(m, p) - T * log2cosh;
}

double stoquastic_energy(double theta, double s, int p) {
  return -s * ipow(std::sin(theta), p) - (1.0 - s) * std::cos(theta);
}

double nonstoquastic_energy(double theta, const AnnealPoint& point, const ModelSpec& spec) {
  return evaluate(terms_for(point, spec), theta, spec.p, spec.k);
}

double landau_quadratic_coefficient(const AnnealPoint& point, const ModelSpec& spec) {
  if (spec.p < 3) throw ParameterError("Landau coefficient requires p >= 3");
  const double lam = effective_lambda(spec, point);
  const double s = point.s;
  if (spec.k == 2) return (1.0 - 3.0 * s + 2.0 * s * lam) / 2.0;
  return ((1.0 - s) - spec.k * s * (1.0 - lam)) / 2.0;
}

LandscapeSolution minimize_landscape(const AnnealPoint& point, const ModelSpec& spec,
                                     int grid_points) {
  point.validate();
  spec.validate();
  const ThetaGrid grid(spec.p, spec.k, grid_points);
  return grid.minimize(terms_for(point, spec));
}

LandscapeSolution minimize_classical_free_energy(double T, int p, int grid_points) {
  auto f = [&](double m) { return classical_free_energy(m, T, p); };
  LandscapeSolution sol;
  sol.minima = scan_minima(f, 0.0, 1.0, grid_points);
  sol.minimizer = sol.minima.front().location;
  sol.value = sol.minima.front().value;
  // f''(0): only p = 2 has a quadratic term, 2 - 4/T.
  sol.curvature_at_origin = p == 2 ? 2.0 - 4.0 / T : 0.0;
  return sol;
}

ThetaGrid::ThetaGrid(int p, int k, int grid_points) : p_(p), k_(k) {
  const int n = std::max(grid_points, 2);
  theta_.resize(n);
  sin_p_.resize(n);
  cos_k_.resize(n);
  cos_.resize(n);
  cos2_.resize(n);
  const double h = std::numbers::pi / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double th = i == n - 1 ? std::numbers::pi : i * h;
    theta_[i] = th;
    const double c = std::cos(th);
    sin_p_[i] = ipow(std::sin(th), p);
    cos_k_[i] = ipow(c, k);
    cos_[i] = c;
    cos2_[i] = c * c;
  }
}

LandscapeSolution ThetaGrid::minimize(const EnergyTerms& t) const {
  const int n = size();
  std::vector<double> samples(n);
  // sin^2 = 1 - cos^2 on the grid.
  for (int i = 0; i < n; ++i) {
    double e = -t.target * sin_p_[i] + t.multi_x * cos_k_[i] - t.field * cos_[i];
    if (t.bath_x != 0.0) e -= t.bath_x * cos2_[i];
    if (t.bath_z != 0.0) e -= t.bath_z * (1.0 - cos2_[i]);
    samples[i] = e;
  }
  auto f = [&](double th) { return evaluate(t, th, p_, k_); };
  // Re-evaluate grid samples through f so reported values reproduce exactly.
  samples.front() = f(0.0);
  samples.back() = f(std::numbers::pi);

  LandscapeSolution sol;
  sol.minima = refine_grid_minima(f, 0.0, std::numbers::pi, samples);
  for (auto& m : sol.minima) m.value = f(m.location);
  std::sort(sol.minima.begin(), sol.minima.end(),
            [](const LocalMinimum& a, const LocalMinimum& b) { return a.value < b.value; });
  sol.minimizer = sol.minima.front().location;
  sol.value = sol.minima.front().value;
  sol.curvature_at_origin = boundary_curvature(t, p_, k_, false);
  return sol;
}

}  // namespace nsqa::landscape
