#include "nsqa/environment.hpp"

#include <cmath>

namespace nsqa::environment {

Axis parse_axis(const std::string& text) {
  if (text == "x") return Axis::x;
  if (text == "z") return Axis::z;
  throw ParameterError("bath axis must be x or z, got '" + text + "'");
}

std::string to_string(Axis a) { return a == Axis::x ? "x" : "z"; }

void BathSpec::validate() const {
  if (!(s_b > 0.0)) throw ParameterError("Ohmic exponent s_b must be positive");
  if (!(a >= 0.0)) throw ParameterError("coupling prefactor must be non-negative");
  if (!(omega_c > 0.0)) throw ParameterError("cutoff frequency must be positive");
}

double spectral_density(const BathSpec& bath, double w) {
  if (w <= 0.0) return 0.0;
  return bath.a * std::pow(w, bath.s_b) * std::exp(-w / bath.omega_c) /
         std::pow(bath.omega_c, bath.s_b - 1.0);
}

double reorganization_constant(const BathSpec& bath) {
  bath.validate();
  return bath.a * bath.omega_c * std::tgamma(bath.s_b);
}

landscape::EnergyTerms bath_terms(const AnnealPoint& point, const ModelSpec& spec, Axis axis,
                                  double Lambda) {
  auto t = landscape::terms_for(point, spec);
  if (axis == Axis::x) t.bath_x = Lambda; else t.bath_z = Lambda;
  return t;
}

double effective_energy(double theta, const AnnealPoint& point, const ModelSpec& spec,
                        const BathSpec& bath) {
  const double Lambda = reorganization_constant(bath);
  const double m = bath.axis == Axis::x ? std::cos(theta) : std::sin(theta);
  return landscape::nonstoquastic_energy(theta, point, spec) - Lambda * m * m;
}

std::vector<phase::Transition> bath_shifted_phase_scan(const ModelSpec& spec, Axis axis, double Lambda,
                                                       double lambda, const phase::ScanOptions& opts) {
  if (spec.k != 2) throw ParameterError("bath-shifted scans support k = 2 only");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (!(Lambda >= 0.0)) throw ParameterError("reorganization constant must be non-negative");
  return phase::locate_transition(
      [&](double s) { return bath_terms({s, lambda}, spec, axis, Lambda); }, spec, {0.0, 1.0}, opts);
}

std::vector<phase::Transition> bath_shifted_phase_scan(const ModelSpec& spec, const BathSpec& bath,
                                                       double lambda, const phase::ScanOptions& opts) {
  return bath_shifted_phase_scan(spec, bath.axis, reorganization_constant(bath), lambda, opts);
}

}  // namespace nsqa::environment
