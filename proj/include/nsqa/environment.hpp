#pragma once

#include <string>
#include <vector>

#include "nsqa/landscape.hpp"
#include "nsqa/model.hpp"
#include "nsqa/phase_diagram.hpp"

namespace nsqa::environment {

enum class Axis { x, z };

Axis parse_axis(const std::string& text);
std::string to_string(Axis a);

/// Harmonic bath with spectral density J(w) = a w^s_b exp(-w/w_c) / w_c^(s_b-1),
/// coupled to the total spin along `axis`.
struct BathSpec {
  Axis axis = Axis::x;
  double s_b = 1.0;      // Ohmic exponent
  double a = 0.0;        // coupling prefactor
  double omega_c = 1.0;  // cutoff frequency

  void validate() const;
};

/// Spectral density at frequency w.
double spectral_density(const BathSpec& bath, double w);

/// Lambda = integral_0^inf J(w)/w dw = a * w_c * Gamma(s_b).
double reorganization_constant(const BathSpec& bath);

/// Landscape coefficients with the bath term -Lambda * m_axis^2 added.
landscape::EnergyTerms bath_terms(const AnnealPoint& point, const ModelSpec& spec, Axis axis,
                                  double Lambda);

/// Bare energy minus Lambda * (m_axis)^2, with m_x = cos(theta), m_z = sin(theta).
double effective_energy(double theta, const AnnealPoint& point, const ModelSpec& spec,
                        const BathSpec& bath);

/// Transition scan at fixed lambda with the bath-shifted landscape. k = 2 only.
std::vector<phase::Transition> bath_shifted_phase_scan(const ModelSpec& spec, const BathSpec& bath,
                                                       double lambda,
                                                       const phase::ScanOptions& opts = {});

/// Same scan with Lambda given directly (for sweeps over the reorganization constant).
std::vector<phase::Transition> bath_shifted_phase_scan(const ModelSpec& spec, Axis axis, double Lambda,
                                                       double lambda,
                                                       const phase::ScanOptions& opts = {});

}  // namespace nsqa::environment
