#include "nsqa/hopfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "nsqa/landscape.hpp"
#include "nsqa/minimize.hpp"

namespace nsqa::hopfield {

Regime parse_regime(const std::string& text) {
  if (text == "finite_r" || text == "finite-r") return Regime::finite_r;
  if (text == "extensive_p2" || text == "extensive-p2") return Regime::extensive_p2;
  if (text == "extensive_p_ge3" || text == "extensive-p-ge3") return Regime::extensive_p_ge3;
  throw ParameterError("unknown Hopfield regime '" + text + "'");
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::finite_r: return "finite_r";
    case Regime::extensive_p2: return "extensive_p2";
    case Regime::extensive_p_ge3: return "extensive_p_ge3";
  }
  return "?";
}

std::string to_string(Label l) {
  switch (l) {
    case Label::QP: return "QP";
    case Label::SG: return "SG";
    case Label::R: return "R";
  }
  return "?";
}

void HopfieldSpec::validate() const {
  if (p < 2) throw ParameterError("p must be >= 2");
  switch (regime) {
    case Regime::finite_r:
      if (r < 1) throw ParameterError("pattern count r must be >= 1");
      break;
    case Regime::extensive_p2:
      if (p != 2) throw ParameterError("extensive_p2 regime requires p = 2");
      if (!(alpha_load > 0.0)) throw ParameterError("pattern load must be positive");
      break;
    case Regime::extensive_p_ge3:
      if (p < 3) throw ParameterError("extensive_p_ge3 regime requires p >= 3");
      if (!(alpha_load > 0.0)) throw ParameterError("pattern load must be positive");
      break;
  }
}

Label classify(const OrderParameterSet& x) {
  if (x.m > 1e-8) return Label::R;
  if (x.q > 1e-8) return Label::SG;
  return Label::QP;
}

// ---------------------------------------------------------------------------
// finite r

namespace {

double transverse_field(const AnnealPoint& pt, double mx) {
  return 1.0 - pt.s - 2.0 * pt.s * (1.0 - pt.lambda) * mx;
}

// n equal overlaps m: the pattern field p*s*lambda*m^(p-1)*(n - 2j) occurs
// with binomial weight C(n, j) / 2^n.
struct Mixture {
  int p;
  int n;
  AnnealPoint pt;
  std::vector<double> weight;

  Mixture(int p_, int n_, AnnealPoint pt_) : p(p_), n(n_), pt(pt_), weight(n_ + 1) {
    double c = 1.0;
    for (int j = 0; j <= n; ++j) {
      weight[j] = c / std::ldexp(1.0, n);
      c = c * (n - j) / (j + 1);
    }
  }

  double field_unit(double m) const { return p * pt.s * pt.lambda * ipow(m, p - 1); }

  // g(mx) = mx - E[B/R] and its derivative.
  void stationarity(double m, double mx, double& g, double& dg) const {
    const double h1 = field_unit(m);
    const double B = transverse_field(pt, mx);
    const double sx = pt.s * (1.0 - pt.lambda);
    double avg = 0.0, davg = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double H = h1 * (n - 2 * j);
      const double R2 = H * H + B * B;
      if (R2 == 0.0) continue;
      const double R = std::sqrt(R2);
      avg += weight[j] * B / R;
      davg += weight[j] * H * H / (R2 * R);
    }
    g = mx - avg;
    dg = 1.0 + 2.0 * sx * davg;
  }

  // Maximizer over m^x: g is increasing with g(-1) <= 0 <= g(1). Bisection;
  // Newton oscillates badly when the pattern field is small.
  double best_mx(double m) const {
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 64 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      double g, dg;
      stationarity(m, mid, g, dg);
      if (g > 0.0) hi = mid;
      else if (g < 0.0) lo = mid;
      else return mid;
    }
    return 0.5 * (lo + hi);
  }

  double energy(double m, double mx) const {
    const double h1 = field_unit(m);
    const double B = transverse_field(pt, mx);
    double avg = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double H = h1 * (n - 2 * j);
      avg += weight[j] * std::sqrt(H * H + B * B);
    }
    return (p - 1) * pt.s * pt.lambda * n * ipow(m, p) - pt.s * (1.0 - pt.lambda) * mx * mx - avg;
  }

  double reduced(double m) const { return energy(m, best_mx(m)); }
};

constexpr int kOverlapGrid = 512;

struct FiniteRCandidate {
  int n;
  LocalMinimum best;
  std::vector<LocalMinimum> minima;
};

std::vector<FiniteRCandidate> finite_r_candidates(const AnnealPoint& pt, const HopfieldSpec& spec) {
  std::vector<FiniteRCandidate> out;
  const int n_max = spec.r <= 3 ? spec.r : 1;
  for (int n = 1; n <= n_max; ++n) {
    const Mixture mix(spec.p, n, pt);
    // Scan in u = sqrt(m) so shallow wells close to m = 0 are resolved.
    auto minima = scan_minima([&](double u) { return mix.reduced(u * u); }, 0.0, 1.0, kOverlapGrid);
    for (auto& m : minima) m.location *= m.location;
    out.push_back({n, minima.front(), std::move(minima)});
  }
  return out;
}

}  // namespace

double finite_r_energy(const OrderParameterSet& x, const AnnealPoint& point, const HopfieldSpec& spec) {
  point.validate();
  if (spec.r < 1 || spec.r > 20) throw ParameterError("finite-r energy needs 1 <= r <= 20");
  if (static_cast<int>(x.overlaps.size()) != spec.r)
    throw ParameterError("overlap count must equal r");
  const int p = spec.p;
  const double sl = point.s * point.lambda;
  const double B = transverse_field(point, x.mx);

  double e = -point.s * (1.0 - point.lambda) * x.mx * x.mx;
  std::vector<double> field(spec.r);
  for (int mu = 0; mu < spec.r; ++mu) {
    e += (p - 1) * sl * ipow(x.overlaps[mu], p);
    field[mu] = p * sl * ipow(x.overlaps[mu], p - 1);
  }
  const unsigned long count = 1ul << spec.r;
  double avg = 0.0;
  for (unsigned long mask = 0; mask < count; ++mask) {
    double H = 0.0;
    for (int mu = 0; mu < spec.r; ++mu) H += (mask >> mu & 1ul) ? -field[mu] : field[mu];
    avg += std::sqrt(H * H + B * B);
  }
  return e - avg / static_cast<double>(count);
}

OrderParameterSet minimize_finite_r(const AnnealPoint& point, const HopfieldSpec& spec) {
  point.validate();
  spec.validate();
  if (spec.regime != Regime::finite_r) throw ParameterError("minimize_finite_r requires the finite_r regime");
  const auto cands = finite_r_candidates(point, spec);
  const auto best = *std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    return a.best.value < b.best.value;
  });
  OrderParameterSet x;
  x.overlaps.assign(spec.r, 0.0);
  for (int mu = 0; mu < best.n; ++mu) x.overlaps[mu] = best.best.location;
  x.m = best.best.location;
  x.mx = Mixture(spec.p, best.n, point).best_mx(x.m);
  x.energy = best.best.value;
  x.phase = classify(x);
  x.converged = true;
  return x;
}

std::vector<phase::Transition> finite_r_transitions(double lambda, const HopfieldSpec& spec,
                                                    phase::Interval range, const phase::ScanOptions& opts) {
  spec.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  phase::LandscapeFamily family;
  family.solve = [&](double s) {
    const auto cands = finite_r_candidates({s, lambda}, spec);
    landscape::LandscapeSolution sol;
    sol.value = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
      sol.minima.insert(sol.minima.end(), c.minima.begin(), c.minima.end());
      if (c.best.value < sol.value) {
        sol.value = c.best.value;
        sol.minimizer = c.best.location;
      }
    }
    return sol;
  };
  // QP+ is stable while the transverse field at m^x = 1 stays positive.
  family.curvature = [&](double s, bool) { return transverse_field({s, lambda}, 1.0); };
  family.x_lo = 0.0;
  family.x_hi = 1.0;
  family.upper_is_phase = false;
  return phase::scan_transitions(family, range, opts);
}

// ---------------------------------------------------------------------------
// extensive number of patterns

namespace {

struct Moments {
  double m = 0.0;  // E[h/R]
  double q = 0.0;  // E[h^2/R^2]
  double x = 0.0;  // E[B/R]
  double C = 0.0;  // E[B^2/R^3]
  double R = 0.0;  // E[R]
};

// Gaussian averages over z with h = a + b z and R = sqrt(h^2 + B^2).
Moments gaussian_moments(double a, double b, double B, const KinkedGaussian& kg) {
  Moments out;
  if (!(b > 0.0)) {
    const double R = std::sqrt(a * a + B * B);
    if (R == 0.0) return out;
    return {a / R, a * a / (R * R), B / R, B * B / (R * R * R), R};
  }
  const double B2 = B * B;
  kg.for_each(-a / b, std::abs(B) / b, [&](double z, double w) {
    const double h = a + b * z;
    const double R2 = h * h + B2;
    if (R2 == 0.0) return;
    const double R = std::sqrt(R2);
    out.m += w * h / R;
    out.q += w * h * h / R2;
    out.x += w * B / R;
    out.C += w * B2 / (R2 * R);
    out.R += w * R;
  });
  return out;
}

// Unknowns: p = 2 -> (m, q, mx, t) with t = sqrt(q_tilde); p >= 3 -> (m, q, mx).
// In t the auxiliary equation reads t (1 - s lambda C) = s lambda sqrt(q),
// which has no root with 1 - s lambda C < 0 (the squared form does).
class SaddleSystem {
 public:
  SaddleSystem(const AnnealPoint& pt, int p, double alpha, const KinkedGaussian& kg)
      : pt_(pt), p_(p), alpha_(alpha), kg_(kg), sl_(pt.s * pt.lambda) {}

  int size() const { return p_ == 2 ? 4 : 3; }

  Moments moments(const Eigen::VectorXd& v) const {
    const double B = transverse_field(pt_, v[2]);
    if (p_ == 2) return gaussian_moments(sl_ * v[0], std::sqrt(alpha_) * std::max(v[3], 0.0), B, kg_);
    const double a = sl_ * p_ * ipow(v[0], p_ - 1);
    const double b = sl_ * std::sqrt(alpha_ * p_ * ipow(std::max(v[1], 0.0), p_ - 1));
    return gaussian_moments(a, b, B, kg_);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& v) const {
    const Moments mo = moments(v);
    Eigen::VectorXd r(size());
    r[0] = v[0] - mo.m;
    r[1] = v[1] - mo.q;
    r[2] = v[2] - mo.x;
    if (p_ == 2) {
      const double d = 1.0 - sl_ * mo.C;
      r[3] = v[3] * d - sl_ * std::sqrt(std::max(v[1], 0.0));
    }
    return r;
  }

  // Plain fixed-point image of v.
  Eigen::VectorXd image(const Eigen::VectorXd& v) const {
    const Moments mo = moments(v);
    Eigen::VectorXd w(size());
    w[0] = mo.m;
    w[1] = mo.q;
    w[2] = mo.x;
    if (p_ == 2) {
      const double d = 1.0 - sl_ * mo.C;
      w[3] = d > 1e-8 ? sl_ * std::sqrt(std::max(v[1], 0.0)) / d : v[3];
    }
    return w;
  }

  void clamp(Eigen::VectorXd& v) const {
    v[0] = std::clamp(v[0], 0.0, 1.0);
    v[1] = std::clamp(v[1], 0.0, 1.0);
    v[2] = std::clamp(v[2], -1.0, 1.0);
    if (p_ == 2) v[3] = std::max(v[3], 0.0);
  }

  double upper(int j) const { return j == 3 ? std::numeric_limits<double>::infinity() : 1.0; }

  double sl() const { return sl_; }

 private:
  AnnealPoint pt_;
  int p_;
  double alpha_;
  const KinkedGaussian& kg_;
  double sl_;
};

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

// Newton iteration with a forward-difference Jacobian and backtracking;
// falls back to a half-damped fixed-point step when Newton stalls.
bool solve_saddle(const SaddleSystem& sys, Eigen::VectorXd& v, const SolverOptions& opts, int& iterations,
                  double& residual) {
  const int n = sys.size();
  sys.clamp(v);
  Eigen::VectorXd F = sys.residual(v);
  residual = max_abs(F);
  for (iterations = 0; iterations < opts.max_iterations; ++iterations) {
    if (!std::isfinite(residual)) return false;
    if (residual < opts.tolerance) return true;

    Eigen::MatrixXd J(n, n);
    for (int j = 0; j < n; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(v[j]));
      if (v[j] + h > sys.upper(j)) h = -h;
      Eigen::VectorXd vh = v;
      vh[j] += h;
      J.col(j) = (sys.residual(vh) - F) / h;
    }
    Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
    // Capped steps keep a cold start in the basin it begins in; full steps
    // from the retrieval seed often jump to the unstable retrieval branch.
    if (step.allFinite() && max_abs(step) > opts.max_step) step *= opts.max_step / max_abs(step);

    bool accepted = false;
    if (step.allFinite()) {
      double t = 1.0;
      for (int k = 0; k < 30; ++k, t *= 0.5) {
        Eigen::VectorXd trial = v + t * step;
        sys.clamp(trial);
        const Eigen::VectorXd Ft = sys.residual(trial);
        const double rt = max_abs(Ft);
        if (rt < (1.0 - 1e-4 * t) * residual) {
          v = trial;
          F = Ft;
          residual = rt;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      v = 0.5 * v + 0.5 * sys.image(v);
      sys.clamp(v);
      F = sys.residual(v);
      residual = max_abs(F);
    }
  }
  return residual < opts.tolerance;
}

Eigen::VectorXd seed_vector(const OrderParameterSet& seed, int p, double sl) {
  Eigen::VectorXd v(p == 2 ? 4 : 3);
  v[0] = seed.m;
  v[1] = seed.q;
  v[2] = seed.mx;
  if (p == 2) v[3] = seed.q_tilde > 0.0 ? std::sqrt(seed.q_tilde) : sl * std::sqrt(std::max(seed.q, 0.0));
  return v;
}

// Inner damped fixed point for t at frozen (m, q, m^x). The plain start
// t = s lambda sqrt(q) assumes C = 0 and can sit far from the root.
void settle_q_tilde(const SaddleSystem& sys, Eigen::VectorXd& v) {
  const double sl = sys.sl();
  for (int i = 0; i < 200; ++i) {
    const double d = 1.0 - sl * sys.moments(v).C;
    const double target = d > 1e-8 ? sl * std::sqrt(std::max(v[1], 0.0)) / d : 2.0 * v[3] + 1e-3;
    const double next = 0.5 * v[3] + 0.5 * target;
    if (std::abs(next - v[3]) < 1e-12 * std::max(1.0, v[3])) {
      v[3] = next;
      return;
    }
    v[3] = next;
  }
}

bool same_solution(const OrderParameterSet& a, const OrderParameterSet& b, double tol) {
  return std::abs(a.m - b.m) < tol && std::abs(a.q - b.q) < tol && std::abs(a.mx - b.mx) < tol;
}

std::vector<OrderParameterSet> solve_common(const AnnealPoint& point, int p, double alpha,
                                            const Quadrature& quad,
                                            const std::vector<OrderParameterSet>& seeds,
                                            const SolverOptions& opts, const HopfieldSpec& spec) {
  point.validate();
  const SaddleSystem sys(point, p, alpha, quad.kinked);
  std::vector<OrderParameterSet> out;
  if (p >= 3) {
    // Paramagnet pinned at B = 0: the m^x maximum sits on the kink of |B|,
    // where the smooth residual has no root. Its energy is closed form.
    const double sx = point.s * (1.0 - point.lambda);
    if (sx > 0.0 && 1.0 - point.s < 2.0 * sx) {
      OrderParameterSet x;
      x.mx = (1.0 - point.s) / (2.0 * sx);
      x.C = std::numeric_limits<double>::infinity();
      x.energy = -sx * x.mx * x.mx;
      x.converged = true;
      x.phase = Label::QP;
      out.push_back(x);
    }
  }
  for (const auto& seed : seeds) {
    Eigen::VectorXd v = seed_vector(seed, p, sys.sl());
    if (p == 2 && !(seed.q_tilde > 0.0)) settle_q_tilde(sys, v);
    int its = 0;
    double res = 0.0;
    if (!solve_saddle(sys, v, opts, its, res)) continue;
    const Moments mo = sys.moments(v);
    if (p == 2 && !(1.0 - sys.sl() * mo.C > 1e-8)) continue;  // denominator guard
    if (!(mo.R > 0.0)) continue;                                 // kink point, handled above
    OrderParameterSet x;
    x.m = v[0];
    x.q = v[1];
    x.mx = v[2];
    x.q_tilde = p == 2 ? v[3] * v[3] : 0.0;
    x.C = mo.C;
    x.converged = true;
    x.iterations = its;
    x.residual = res;
    x.energy = p == 2 ? p2_energy(x, point, alpha, quad) : p_ge3_energy(x, point, spec, quad);
    x.phase = classify(x);
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const auto& y) { return same_solution(x, y, opts.merge_distance); });
    if (!dup) out.push_back(x);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return out;
}

}  // namespace

double p2_energy(const OrderParameterSet& x, const AnnealPoint& point, double alpha_load,
                 const Quadrature& quad) {
  point.validate();
  if (!(alpha_load > 0.0)) throw ParameterError("pattern load must be positive");
  const double sl = point.s * point.lambda;
  const double B = transverse_field(point, x.mx);
  const Moments mo = gaussian_moments(sl * x.m, std::sqrt(alpha_load * std::max(x.q_tilde, 0.0)), B, quad.kinked);
  const double d = 1.0 - sl * mo.C;
  if (std::abs(x.q_tilde * d * d - sl * sl * x.q) > 1e-8 * std::max(1.0, x.q_tilde))
    throw ParameterError("auxiliary q_tilde is not consistent with q and C");
  return 0.5 * sl * x.m * x.m - point.s * (1.0 - point.lambda) * x.mx * x.mx - 0.5 * alpha_load * sl +
         0.5 * alpha_load * x.q_tilde * mo.C - mo.R;
}

double p_ge3_energy(const OrderParameterSet& x, const AnnealPoint& point, const HopfieldSpec& spec,
                    const Quadrature& quad) {
  point.validate();
  if (spec.p < 3) throw ParameterError("p_ge3 energy requires p >= 3");
  const int p = spec.p;
  const double sl = point.s * point.lambda;
  const double B = transverse_field(point, x.mx);
  const double qp1 = ipow(std::max(x.q, 0.0), p - 1);
  const Moments mo = gaussian_moments(sl * p * ipow(x.m, p - 1), sl * std::sqrt(spec.alpha_load * p * qp1), B,
                                      quad.kinked);
  return sl * (p - 1) * ipow(x.m, p) - point.s * (1.0 - point.lambda) * x.mx * x.mx +
         0.5 * spec.alpha_load * p * (p - 1) * sl * sl * mo.C * qp1 - mo.R;
}

std::vector<OrderParameterSet> canonical_seeds() {
  OrderParameterSet qp;
  qp.m = 0.0;
  qp.q = 0.0;
  qp.mx = 1.0;
  OrderParameterSet sg;
  sg.m = 0.0;
  sg.q = 0.9;
  sg.mx = 0.1;
  OrderParameterSet r;
  r.m = 1.0;
  r.q = 1.0;
  r.mx = 0.0;
  return {qp, sg, r};
}

std::vector<OrderParameterSet> solve_p2(const AnnealPoint& point, double alpha_load, const Quadrature& quad,
                                        const std::vector<OrderParameterSet>& seeds, const SolverOptions& opts) {
  if (!(alpha_load > 0.0)) throw ParameterError("pattern load must be positive");
  HopfieldSpec spec;
  spec.p = 2;
  spec.alpha_load = alpha_load;
  spec.regime = Regime::extensive_p2;
  return solve_common(point, 2, alpha_load, quad, seeds, opts, spec);
}

std::vector<OrderParameterSet> solve_p_ge3(const AnnealPoint& point, const HopfieldSpec& spec,
                                           const Quadrature& quad, const std::vector<OrderParameterSet>& seeds,
                                           const SolverOptions& opts) {
  spec.validate();
  if (spec.p < 3) throw ParameterError("solve_p_ge3 requires p >= 3");
  return solve_common(point, spec.p, spec.alpha_load, quad, seeds, opts, spec);
}

std::vector<OrderParameterSet> solve_extensive(const AnnealPoint& point, const HopfieldSpec& spec,
                                               const Quadrature& quad, const std::vector<OrderParameterSet>& seeds,
                                               const SolverOptions& opts) {
  spec.validate();
  switch (spec.regime) {
    case Regime::extensive_p2: return solve_p2(point, spec.alpha_load, quad, seeds, opts);
    case Regime::extensive_p_ge3: return solve_p_ge3(point, spec, quad, seeds, opts);
    default: throw ParameterError("extensive solver called with the finite_r regime");
  }
}

std::optional<OrderParameterSet> ground_state(const std::vector<OrderParameterSet>& solutions) {
  std::optional<OrderParameterSet> best;
  for (const auto& x : solutions)
    if (x.converged && (!best || x.energy < best->energy)) best = x;
  return best;
}

namespace {

std::optional<OrderParameterSet> best_with(double s, double lam, const HopfieldSpec& spec, const Quadrature& quad,
                                           const SolverOptions& opts, const std::vector<OrderParameterSet>& extra) {
  auto seeds = canonical_seeds();
  seeds.insert(seeds.end(), extra.begin(), extra.end());
  return ground_state(solve_extensive({s, lam}, spec, quad, seeds, opts));
}

void check_scan_args(double lambda, const HopfieldSpec& spec, const HopfieldScanOptions& opts) {
  spec.validate();
  if (spec.regime == Regime::finite_r) throw ParameterError("Hopfield scans need an extensive regime");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (!(opts.s_step > 0.0 && opts.s_step <= 0.1)) throw ParameterError("s step must lie in (0, 0.1]");
  if (!(opts.s_ceiling > 1.0 - opts.s_step && opts.s_ceiling <= 1.0))
    throw ParameterError("s ceiling must lie in (1 - s_step, 1]");
}

}  // namespace

std::vector<HopfieldGridPoint> hopfield_sweep(double lambda, const HopfieldSpec& spec, const Quadrature& quad,
                                              const HopfieldScanOptions& opts) {
  check_scan_args(lambda, spec, opts);
  const double lam = std::max(lambda, opts.lambda_floor);
  const int n = std::max(2, static_cast<int>(std::lround(1.0 / opts.s_step)) + 1);
  auto s_at = [&](int i) { return std::min(static_cast<double>(i) / (n - 1), opts.s_ceiling); };

  // Forward and backward continuation: a branch born between grid points is
  // picked up by whichever sweep runs into it first.
  std::vector<std::optional<OrderParameterSet>> grid(n);
  std::vector<OrderParameterSet> carry;
  for (int i = 0; i < n; ++i) {
    grid[i] = best_with(s_at(i), lam, spec, quad, opts.solver, carry);
    if (grid[i]) carry = {*grid[i]};
  }
  carry.clear();
  for (int i = n - 1; i >= 0; --i) {
    auto seeds = carry;
    if (grid[i]) seeds.push_back(*grid[i]);
    auto back = best_with(s_at(i), lam, spec, quad, opts.solver, seeds);
    if (back && (!grid[i] || back->energy < grid[i]->energy)) grid[i] = back;
    if (grid[i]) carry = {*grid[i]};
  }
  std::vector<HopfieldGridPoint> out;
  for (int i = 0; i < n; ++i)
    if (grid[i]) out.push_back({s_at(i), *grid[i]});
  return out;
}

std::vector<HopfieldTransition> hopfield_transitions(double lambda, const HopfieldSpec& spec,
                                                     const Quadrature& quad, const HopfieldScanOptions& opts) {
  const auto sweep = hopfield_sweep(lambda, spec, quad, opts);
  const double lam = std::max(lambda, opts.lambda_floor);
  auto best_at = [&](double s, const std::vector<OrderParameterSet>& extra) {
    return best_with(s, lam, spec, quad, opts.solver, extra);
  };
  auto lower_energy = [&](double s, const OrderParameterSet& seed, Label phase) -> std::optional<double> {
    for (const auto& x : solve_extensive({s, lam}, spec, quad, {seed}, opts.solver))
      if (x.phase == phase) return x.energy;
    return std::nullopt;
  };
  // Follow branch b (found at hi) down to where it ends. Returns true for a
  // first-order transition; for a continuous onset s_c moves to the end point.
  auto first_order = [&](OrderParameterSet b, const OrderParameterSet& a, double hi, double& s_c) {
    auto amplitude = [&](const OrderParameterSet& x) {
      return std::max(std::abs(x.m - a.m), std::abs(x.q - a.q));
    };
    double s = hi, ds = opts.track_step;
    for (int it = 0; it < 2000 && ds > 1e-9 && s - ds >= 0.0; ++it) {
      std::optional<OrderParameterSet> cont;
      for (const auto& x : solve_extensive({s - ds, lam}, spec, quad, {b}, opts.solver))
        if (x.phase == b.phase) cont = x;
      if (!cont) {
        ds *= 0.5;
        continue;
      }
      s -= ds;
      b = *cont;
      if (s < s_c && amplitude(b) >= opts.onset_amplitude) {
        const auto ea = lower_energy(s, a, a.phase);
        if (ea && b.energy > *ea + 1e-9) return true;
      }
    }
    if (amplitude(b) >= opts.onset_amplitude) return true;
    s_c = std::min(s_c, s);
    return false;
  };

  std::vector<HopfieldTransition> out;
  std::optional<OrderParameterSet> prev;
  double prev_s = 0.0;
  for (const auto& g : sweep) {
    const double s = g.s;
    const std::optional<OrderParameterSet> cur = g.state;
    if (prev && prev->phase != cur->phase) {
      double lo = prev_s, hi = s;
      OrderParameterSet a = *prev, b = *cur;
      while (hi - lo > opts.s_tolerance) {
        const double mid = 0.5 * (lo + hi);
        auto x = best_at(mid, {a, b});
        if (!x) break;
        if (x->phase == a.phase) {
          lo = mid;
          a = *x;
        } else {
          hi = mid;
          b = *x;
        }
      }
      double s_c = 0.5 * (lo + hi);
      const bool first = first_order(b, a, hi, s_c);
      out.push_back({s_c, first ? phase::Order::first : phase::Order::second, a.phase, b.phase});
    }
    prev = cur;
    prev_s = s;
  }
  return out;
}

HopfieldDiagram hopfield_phase_diagram(const HopfieldSpec& spec, const Quadrature& quad,
                                       const std::vector<double>& lambdas, const HopfieldScanOptions& opts) {
  HopfieldDiagram d;
  d.spec = spec;
  d.lambdas = lambdas;
  std::sort(d.lambdas.begin(), d.lambdas.end());
  for (double lam : d.lambdas) d.rows.push_back(hopfield_transitions(lam, spec, quad, opts));

  std::vector<std::size_t> last_row;
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    const double join = r == 0 ? 0.0 : 5.0 * (d.lambdas[r] - d.lambdas[r - 1]);
    std::vector<char> used(d.boundaries.size(), 0);
    for (const auto& t : d.rows[r]) {
      std::size_t best = d.boundaries.size();
      double best_dist = join;
      for (std::size_t b = 0; b < d.boundaries.size(); ++b) {
        const auto& bd = d.boundaries[b];
        if (used[b] || r == 0 || last_row[b] != r - 1) continue;
        if (bd.order != t.order || bd.low != t.below || bd.high != t.above) continue;
        const double dist = std::abs(bd.points.back().s - t.s_c);
        if (dist < best_dist) {
          best_dist = dist;
          best = b;
        }
      }
      if (best == d.boundaries.size()) {
        d.boundaries.push_back({{{t.s_c, d.lambdas[r]}}, t.order, t.below, t.above});
        last_row.push_back(r);
        used.push_back(1);
      } else {
        d.boundaries[best].points.push_back({t.s_c, d.lambdas[r]});
        last_row[best] = r;
        used[best] = 1;
      }
    }
  }
  return d;
}

HopfieldDiagram hopfield_phase_diagram(const HopfieldSpec& spec, const Quadrature& quad, double lambda_step,
                                       const HopfieldScanOptions& opts) {
  if (!(lambda_step > 0.0 && lambda_step <= 0.5)) throw ParameterError("lambda step must lie in (0, 0.5]");
  const int n = static_cast<int>(std::lround(1.0 / lambda_step)) + 1;
  std::vector<double> lambdas(n);
  for (int i = 0; i < n; ++i) lambdas[i] = i == n - 1 ? 1.0 : static_cast<double>(i) / (n - 1);
  return hopfield_phase_diagram(spec, quad, lambdas, opts);
}

std::vector<phase::BoundarySegment> as_segments(const HopfieldDiagram& d) {
  std::vector<phase::BoundarySegment> out;
  for (const auto& b : d.boundaries) {
    phase::BoundarySegment seg;
    seg.order = b.order;
    for (const auto& p : b.points) seg.points.push_back({p, phase::Phase::qp_plus, phase::Phase::ferro});
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace nsqa::hopfield
