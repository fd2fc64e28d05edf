#pragma once

#include <string>
#include <vector>

#include "nsqa/model.hpp"

namespace nsqa::gap {

struct GapRecord {
  int N = 0;
  AnnealPoint point;
  double E0 = 0.0, E1 = 0.0, E2 = 0.0;
  double gap01 = 0.0;
  double gap02 = 0.0;
  bool ferro = false;           // landscape minimizer away from theta = 0 at this point
  bool multiprecision = false;  // gap01 resolved with MPFR arithmetic

  /// gap02 for even p inside the ferromagnetic phase, gap01 otherwise.
  double relevant(const ModelSpec& spec) const { return spec.p % 2 == 0 && ferro ? gap02 : gap01; }
};

struct GapOptions {
  int s_grid = 256;
  double s_tolerance = 1e-6;
  /// A minimum below mp_threshold * N is re-resolved in multiprecision,
  /// where double eigenvalues carry too few significant digits.
  double mp_threshold = 1e-8;
  bool multiprecision = true;
};

/// Three lowest sector levels at one point (double precision).
GapRecord gap_at(const ModelSpec& spec, const AnnealPoint& point, int N);

/// E1 - E0 at one point by inertia bisection in MPFR arithmetic with `digits`
/// decimal digits. s is given as a decimal string so it is not rounded to double.
double gap01_multiprecision(const ModelSpec& spec, const std::string& s, const std::string& lambda, int N,
                            int digits);

/// Samples at s_grid uniform s values along the path.
std::vector<GapRecord> gap_profile(const ModelSpec& spec, const AnnealPath& path, int N, int s_grid);

/// Minimum of the relevant gap along the path: grid scan, golden-section
/// refinement of every grid-local dip to s_tolerance, and a multiprecision
/// pass for exponentially small gaps.
GapRecord minimum_gap(const ModelSpec& spec, const AnnealPath& path, int N, const GapOptions& opts = {});

enum class Verdict { exponential, polynomial, undetermined };
std::string to_string(Verdict v);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;  // residual sum of squares
};

/// Least-squares y = a + b x.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingFit {
  std::vector<int> N;
  std::vector<double> gap_min;
  std::vector<double> s_min;
  LinearFit exponential;  // ln gap = a + b N
  LinearFit polynomial;   // ln gap = a + b ln N
  Verdict verdict = Verdict::undetermined;
};

/// Fit both models; the one with smaller RSS wins unless the two RSS differ
/// by less than 10% of the larger.
ScalingFit fit_scaling(const std::vector<int>& N, const std::vector<double>& gap_min);

ScalingFit min_gap_vs_N(const ModelSpec& spec, const AnnealPath& path, const std::vector<int>& N_list,
                        const GapOptions& opts = {});

struct PathGapRow {
  std::string path;
  int N = 0;
  double s_min = 0.0;
  double lambda_min = 0.0;
  double gap_min = 0.0;
};

std::vector<PathGapRow> path_gap_compare(const ModelSpec& spec, const std::vector<AnnealPath>& paths, int N,
                                         const GapOptions& opts = {});

/// Default N list {40, 80, ..., 400}.
std::vector<int> default_N_list();

}  // namespace nsqa::gap
