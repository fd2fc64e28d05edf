#include "nsqa/gap_scan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/mpfr.hpp>

#include "nsqa/detail/band.hpp"
#include "nsqa/landscape.hpp"
#include "nsqa/minimize.hpp"
#include "nsqa/spin_sector.hpp"

namespace nsqa::gap {

namespace {

using mp = boost::multiprecision::mpfr_float;

bool in_ferro_phase(const ModelSpec& spec, const AnnealPoint& pt) {
  const auto sol = landscape::minimize_landscape(pt, spec, 1024);
  return sol.minimizer > 1e-6;
}

int digits_for(int N) { return 40 + N / 8; }

// Guard for MPFR's global default precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(int digits) : saved_(mp::default_precision()) { mp::default_precision(digits); }
  ~PrecisionScope() { mp::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

mp mp_gap01(const ModelSpec& spec, const mp& s, const mp& lambda, int N, int digits) {
  const mp lam = spec.variant == Variant::stoquastic ? mp(1) : lambda;
  const auto H = detail::hamiltonian_diagonals<mp>(N, spec.p, spec.k, s, lam);
  const mp tiny = pow(mp(10), -digits);
  auto [a, b] = detail::gershgorin(H);
  a -= 1;
  b += 1;
  // Narrow [a, b] until one shift separates E0 from E1.
  const mp floor_width = pow(mp(10), -(digits - 5)) * N;
  mp split;
  for (;;) {
    const mp mid = (a + b) / 2;
    const int c = detail::count_below(H, mid, tiny);
    if (c == 0) {
      a = mid;
    } else if (c >= 2) {
      b = mid;
    } else {
      split = mid;
      break;
    }
    if (b - a < floor_width) return mp(0);
  }
  const mp tol0 = (split - a) * mp(1e-15);
  const mp tol1 = (b - split) * mp(1e-15);
  const mp e0 = detail::bisect_eigenvalue(H, 0, a, split, tol0, tiny);
  const mp e1 = detail::bisect_eigenvalue(H, 1, split, b, tol1, tiny);
  return e1 - e0;
}

mp mp_lambda_at(const AnnealPath& path, const mp& s) {
  const auto& w = path.waypoints();
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (s <= mp(w[i].s) || i + 1 == w.size()) {
      const mp t = (s - mp(w[i - 1].s)) / (mp(w[i].s) - mp(w[i - 1].s));
      mp l = mp(w[i - 1].lambda) + t * (mp(w[i].lambda) - mp(w[i - 1].lambda));
      if (l < 0) l = 0;
      if (l > 1) l = 1;
      return l;
    }
  }
  return mp(w.back().lambda);
}

// Vertex search on gap^2(s), which is locally a parabola through an avoided
// crossing. Starts from a double-precision estimate s0.
double refine_multiprecision(const ModelSpec& spec, const AnnealPath& path, int N, double s0, double& s_out) {
  const int digits = digits_for(N);
  PrecisionScope scope(digits);
  auto g2 = [&](const mp& s) -> mp {
    const mp g = mp_gap01(spec, s, mp_lambda_at(path, s), N, digits);
    return g * g;
  };
  mp c(s0);
  mp h(1e-6);
  for (int it = 0; it < 40; ++it) {
    const mp fm = g2(c - h), f0 = g2(c), fp = g2(c + h);
    const mp A = (fp + fm - 2 * f0) / (2 * h * h);
    const mp Bc = (fp - fm) / (2 * h);
    if (!(A > 0)) break;
    mp v = c - Bc / (2 * A);
    if (v < c - 4 * h) v = c - 4 * h;
    if (v > c + 4 * h) v = c + 4 * h;
    mp fmin = f0 - Bc * Bc / (4 * A);
    if (fmin < 0) fmin = 0;
    const mp core = sqrt(fmin / A);  // half-width of the avoided crossing
    const mp moved = abs(v - c);
    c = v;
    if (h <= core && moved < core * mp(1e-6)) break;
    h = std::max(mp(h * mp(1e-3)), mp(core / 4));
    if (h == 0) break;
  }
  if (c < 0) c = 0;
  if (c > 1) c = 1;
  s_out = static_cast<double>(c);
  return static_cast<double>(mp_gap01(spec, c, mp_lambda_at(path, c), N, digits));
}

}  // namespace

GapRecord gap_at(const ModelSpec& spec, const AnnealPoint& point, int N) {
  if (N < 2) throw ParameterError("N must be >= 2");
  const auto h = sector::build_sector_hamiltonian(spec, point, N);
  const auto e = sector::lowest_eigenvalues(h, 3);
  GapRecord r;
  r.N = N;
  r.point = point;
  r.E0 = e[0];
  r.E1 = e[1];
  r.E2 = e[2];
  r.gap01 = std::max(0.0, e[1] - e[0]);
  r.gap02 = std::max(0.0, e[2] - e[0]);
  r.ferro = spec.p % 2 == 0 && in_ferro_phase(spec, point);
  return r;
}

double gap01_multiprecision(const ModelSpec& spec, const std::string& s, const std::string& lambda, int N,
                            int digits) {
  spec.validate();
  if (N < 2) throw ParameterError("N must be >= 2");
  if (digits < 20) throw ParameterError("multiprecision needs at least 20 digits");
  PrecisionScope scope(digits);
  const mp ms(s), ml(lambda);
  if (!(ms >= 0 && ms <= 1 && ml >= 0 && ml <= 1)) throw ParameterError("s and lambda must lie in [0, 1]");
  return static_cast<double>(mp_gap01(spec, ms, ml, N, digits));
}

std::vector<GapRecord> gap_profile(const ModelSpec& spec, const AnnealPath& path, int N, int s_grid) {
  spec.validate();
  if (N < 2) throw ParameterError("N must be >= 2");
  if (s_grid < 64) throw ParameterError("s grid needs at least 64 points");
  std::vector<GapRecord> out;
  out.reserve(s_grid);
  for (int i = 0; i < s_grid; ++i) {
    const double s = i == s_grid - 1 ? 1.0 : static_cast<double>(i) / (s_grid - 1);
    out.push_back(gap_at(spec, path.at(s), N));
  }
  return out;
}

GapRecord minimum_gap(const ModelSpec& spec, const AnnealPath& path, int N, const GapOptions& opts) {
  auto prof = gap_profile(spec, path, N, opts.s_grid);

  // Avoided crossings inside an ordered phase come in trains spaced ~1/N,
  // finer than the coarse grid. Resample four cells either side of the
  // coarse minimum.
  std::size_t at_min = 1;
  for (std::size_t i = 2; i < prof.size(); ++i)
    if (prof[i].relevant(spec) < prof[at_min].relevant(spec)) at_min = i;
  const double fine_h = 1.0 / (16.0 * N);
  std::vector<GapRecord> fine;
  for (std::size_t i = 1; i < prof.size(); ++i) {
    fine.push_back(prof[i - 1]);
    const bool near = i + 4 > at_min && i <= at_min + 4;
    const double lo = prof[i - 1].point.s, hi = prof[i].point.s;
    const int extra = near ? static_cast<int>(std::ceil((hi - lo) / fine_h)) - 1 : 0;
    for (int j = 1; j <= extra; ++j) fine.push_back(gap_at(spec, path.at(lo + (hi - lo) * j / (extra + 1)), N));
  }
  fine.push_back(prof.back());
  prof = std::move(fine);

  const int n = static_cast<int>(prof.size());
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = prof[i].relevant(spec);

  auto metric = [&](double s) { return gap_at(spec, path.at(s), N).relevant(spec); };

  GapRecord best = prof[1];
  double best_gap = g[1];
  for (int i = 1; i < n; ++i) {
    const bool left = g[i] <= g[i - 1];
    const bool right = i == n - 1 || g[i] <= g[i + 1];
    if (!(left && right)) continue;
    const double lo = prof[i - 1].point.s;
    const double hi = i == n - 1 ? 1.0 : prof[i + 1].point.s;
    const auto m = golden_section(metric, lo, hi, opts.s_tolerance);
    GapRecord r = m.value < g[i] ? gap_at(spec, path.at(m.location), N) : prof[i];
    if (r.relevant(spec) < best_gap) {
      best_gap = r.relevant(spec);
      best = r;
    }
  }

  const bool odd_or_para = !(spec.p % 2 == 0 && best.ferro);
  if (odd_or_para) {
    // An avoided crossing is a V narrower than s_tolerance once the gap is
    // exponentially small; chase its vertex down to double resolution.
    const double w = 4.0 * opts.s_tolerance;
    const auto m = golden_section([&](double s) { return gap_at(spec, path.at(s), N).gap01; },
                                  std::max(0.0, best.point.s - w), std::min(1.0, best.point.s + w), 1e-15);
    if (m.value < best.gap01) best = gap_at(spec, path.at(m.location), N);
  }
  if (opts.multiprecision && odd_or_para && best.gap01 < opts.mp_threshold * N) {
    double s_mp = best.point.s;
    const double g_mp = refine_multiprecision(spec, path, N, best.point.s, s_mp);
    if (g_mp > 0.0) {
      best = gap_at(spec, path.at(s_mp), N);
      best.gap01 = g_mp;
      best.multiprecision = true;
    }
  }
  return best;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::exponential: return "exponential";
    case Verdict::polynomial: return "polynomial";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ParameterError("least squares needs >= 2 matching points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("least squares needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.rss += r * r;
  }
  return f;
}

ScalingFit fit_scaling(const std::vector<int>& N, const std::vector<double>& gap_min) {
  if (N.size() != gap_min.size()) throw ParameterError("N and gap lists differ in length");
  if (N.size() < 4) throw ParameterError("scaling fit needs at least 4 system sizes");
  for (std::size_t i = 1; i < N.size(); ++i)
    if (N[i] <= N[i - 1]) throw ParameterError("N list must be strictly increasing");
  std::vector<double> n(N.size()), logn(N.size()), logg(N.size());
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(gap_min[i] > 0.0)) throw NumericalError("non-positive minimum gap cannot be fitted");
    n[i] = N[i];
    logn[i] = std::log(static_cast<double>(N[i]));
    logg[i] = std::log(gap_min[i]);
  }
  ScalingFit f;
  f.N = N;
  f.gap_min = gap_min;
  f.exponential = least_squares(n, logg);
  f.polynomial = least_squares(logn, logg);
  const double a = f.exponential.rss, b = f.polynomial.rss;
  if (std::abs(a - b) < 0.1 * std::max(a, b)) f.verdict = Verdict::undetermined;
  else f.verdict = a < b ? Verdict::exponential : Verdict::polynomial;
  return f;
}

ScalingFit min_gap_vs_N(const ModelSpec& spec, const AnnealPath& path, const std::vector<int>& N_list,
                        const GapOptions& opts) {
  if (N_list.size() < 4) throw ParameterError("N list needs at least 4 values");
  std::vector<double> gaps, locs;
  for (int N : N_list) {
    const auto r = minimum_gap(spec, path, N, opts);
    gaps.push_back(r.relevant(spec));
    locs.push_back(r.point.s);
  }
  auto f = fit_scaling(N_list, gaps);
  f.s_min = locs;
  return f;
}

std::vector<PathGapRow> path_gap_compare(const ModelSpec& spec, const std::vector<AnnealPath>& paths, int N,
                                         const GapOptions& opts) {
  if (paths.size() < 2) throw ParameterError("path comparison needs at least two paths");
  std::vector<PathGapRow> out;
  for (const auto& p : paths) {
    const auto r = minimum_gap(spec, p, N, opts);
    out.push_back({p.to_string(), N, r.point.s, r.point.lambda, r.relevant(spec)});
  }
  return out;
}

std::vector<int> default_N_list() {
  std::vector<int> out;
  for (int N = 40; N <= 400; N += 40) out.push_back(N);
  return out;
}

}  // namespace nsqa::gap
