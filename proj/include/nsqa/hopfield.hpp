#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsqa/model.hpp"
#include "nsqa/phase_diagram.hpp"
#include "nsqa/quadrature.hpp"

namespace nsqa::hopfield {

enum class Regime { finite_r, extensive_p2, extensive_p_ge3 };
enum class Label { QP, SG, R };

Regime parse_regime(const std::string& text);
std::string to_string(Regime r);
std::string to_string(Label l);

/// Quantum Hopfield model with binary patterns and a quadratic
/// antiferromagnetic XX term. `r` is used in the finite_r regime,
/// `alpha_load` (r = alpha N^(p-1)) in the extensive ones.
struct HopfieldSpec {
  int p = 2;
  int r = 1;
  double alpha_load = 0.04;
  Regime regime = Regime::finite_r;

  void validate() const;
};

struct OrderParameterSet {
  std::vector<double> overlaps;  // finite_r: one entry per pattern
  double m = 0.0;                // retrieved overlap (extensive) or largest overlap (finite_r)
  double q = 0.0;
  double mx = 1.0;
  double q_tilde = 0.0;          // p = 2 only
  double C = 0.0;
  double energy = 0.0;
  Label phase = Label::QP;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

/// Label from the order parameters (R if m > 1e-8, SG if q > 1e-8, else QP).
Label classify(const OrderParameterSet& x);

/// Quadrature bundle: the Gauss-Hermite rule defines the node count n; the
/// Gaussian integrals themselves use the kink-aware rule with the same n.
struct Quadrature {
  explicit Quadrature(int n = 120) : gauss(n), kinked(n) {}
  int size() const { return gauss.size(); }
  GaussQuadrature gauss;
  KinkedGaussian kinked;
};

// ---- finite number of patterns ----

/// Energy per site averaged over all 2^r pattern sign vectors. Uses
/// x.overlaps and x.mx. r <= 20.
double finite_r_energy(const OrderParameterSet& x, const AnnealPoint& point, const HopfieldSpec& spec);

/// Minimum over the overlap magnitude of the maximum over m^x, for the
/// single-pattern state and (r <= 3) the symmetric mixtures.
OrderParameterSet minimize_finite_r(const AnnealPoint& point, const HopfieldSpec& spec);

/// QP-exit transitions of the finite-r model along s at fixed lambda.
std::vector<phase::Transition> finite_r_transitions(double lambda, const HopfieldSpec& spec,
                                                    phase::Interval range = {},
                                                    const phase::ScanOptions& opts = {});

// ---- extensive number of patterns ----

double p2_energy(const OrderParameterSet& x, const AnnealPoint& point, double alpha_load,
                 const Quadrature& quad);

double p_ge3_energy(const OrderParameterSet& x, const AnnealPoint& point, const HopfieldSpec& spec,
                    const Quadrature& quad);

/// Canonical QP, SG and R starting points.
std::vector<OrderParameterSet> canonical_seeds();

struct SolverOptions {
  double tolerance = 1e-12;  // max-norm residual of the self-consistent equations
  int max_iterations = 400;
  double max_step = 0.1;  // max-norm cap on a Newton step
  double merge_distance = 1e-6;
};

/// Converged, distinct solutions of the p = 2 saddle-point equations. Seeds
/// that fail (budget exhausted or 1 - s*lambda*C <= 0) are dropped.
std::vector<OrderParameterSet> solve_p2(const AnnealPoint& point, double alpha_load, const Quadrature& quad,
                                        const std::vector<OrderParameterSet>& seeds,
                                        const SolverOptions& opts = {});

std::vector<OrderParameterSet> solve_p_ge3(const AnnealPoint& point, const HopfieldSpec& spec,
                                           const Quadrature& quad,
                                           const std::vector<OrderParameterSet>& seeds,
                                           const SolverOptions& opts = {});

/// Dispatch on spec.regime (extensive regimes only).
std::vector<OrderParameterSet> solve_extensive(const AnnealPoint& point, const HopfieldSpec& spec,
                                               const Quadrature& quad,
                                               const std::vector<OrderParameterSet>& seeds,
                                               const SolverOptions& opts = {});

/// Lowest-energy converged solution, if any.
std::optional<OrderParameterSet> ground_state(const std::vector<OrderParameterSet>& solutions);

struct HopfieldTransition {
  double s_c = 0.0;
  phase::Order order = phase::Order::first;
  Label below = Label::QP;
  Label above = Label::SG;
};

struct HopfieldScanOptions {
  double s_step = 5e-3;
  double s_tolerance = 1e-6;
  /// The upper branch is followed downward from s_c (step halving from
  /// `track_step` to 1e-9) until it ends. Second order: its order parameters
  /// have shrunk below `onset_amplitude` there and it never became metastable.
  /// Otherwise first order (a fold at finite amplitude, or coexistence).
  double track_step = 1e-4;
  double onset_amplitude = 0.02;
  /// lambda below which the target term is too weak to order the spins; rows
  /// at smaller lambda are evaluated at this value (lambda -> 0+ limit).
  double lambda_floor = 1e-3;
  /// At s = 1 the retrieval state sits on B = 0, where C is discontinuous and
  /// Newton stalls; the last grid point is taken at this value instead (s -> 1-).
  double s_ceiling = 1.0 - 1e-6;
  SolverOptions solver;
};

struct HopfieldGridPoint {
  double s = 0.0;
  OrderParameterSet state;  // lowest-energy converged solution
};

/// Ground state on a uniform s grid at fixed lambda, by forward and backward
/// continuation from the canonical seeds.
std::vector<HopfieldGridPoint> hopfield_sweep(double lambda, const HopfieldSpec& spec, const Quadrature& quad,
                                              const HopfieldScanOptions& opts = {});

/// Transitions of the ground-state branch along s at fixed lambda.
std::vector<HopfieldTransition> hopfield_transitions(double lambda, const HopfieldSpec& spec,
                                                     const Quadrature& quad,
                                                     const HopfieldScanOptions& opts = {});

struct HopfieldBoundary {
  std::vector<AnnealPoint> points;  // ordered by lambda
  phase::Order order = phase::Order::first;
  Label low = Label::QP;
  Label high = Label::SG;
};

struct HopfieldDiagram {
  HopfieldSpec spec;
  std::vector<double> lambdas;
  std::vector<std::vector<HopfieldTransition>> rows;
  std::vector<HopfieldBoundary> boundaries;
};

/// Sweep lambda over `lambdas` and stitch transitions with equal order and
/// equal phase labels into boundaries.
HopfieldDiagram hopfield_phase_diagram(const HopfieldSpec& spec, const Quadrature& quad,
                                       const std::vector<double>& lambdas,
                                       const HopfieldScanOptions& opts = {});

/// Uniform lambda grid with the given step.
HopfieldDiagram hopfield_phase_diagram(const HopfieldSpec& spec, const Quadrature& quad, double lambda_step,
                                       const HopfieldScanOptions& opts = {});

/// Boundaries as generic segments (for the path search).
std::vector<phase::BoundarySegment> as_segments(const HopfieldDiagram& d);

}  // namespace nsqa::hopfield
