#include "nsqa/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsqa {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;

bool strictly_below(double candidate, double reference) {
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(reference));
  return candidate < reference - slack;
}

}  // namespace

LocalMinimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    // Interval can no longer shrink in floating point.
    if (c <= a || d >= b || c >= d) break;
  }
  return fc < fd ? LocalMinimum{c, fc} : LocalMinimum{d, fd};
}

std::vector<LocalMinimum> refine_grid_minima(const std::function<double(double)>& f, double lo,
                                             double hi, const std::vector<double>& samples,
                                             double tol) {
  const int n = static_cast<int>(samples.size());
  std::vector<LocalMinimum> out;
  if (n == 0) return out;
  if (n == 1) {
    out.push_back({lo, samples[0]});
    return out;
  }
  const double h = (hi - lo) / (n - 1);
  auto x_of = [&](int i) { return i == n - 1 ? hi : lo + i * h; };

  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || samples[i] <= samples[i - 1];
    const bool right_ok = i == n - 1 || samples[i] <= samples[i + 1];
    if (!left_ok || !right_ok) continue;
    // Plateaus: keep only the first index of a run of equal values.
    if (i > 0 && samples[i] == samples[i - 1]) continue;

    const double a = x_of(std::max(i - 1, 0));
    const double b = x_of(std::min(i + 1, n - 1));
    LocalMinimum best{x_of(i), samples[i]};
    const LocalMinimum refined = golden_section(f, a, b, tol);
    if (i == 0 || i == n - 1) {
      if (strictly_below(refined.value, best.value)) best = refined;
    } else if (refined.value <= best.value) {
      best = refined;
    }
    out.push_back(best);
  }

  std::sort(out.begin(), out.end(), [](const LocalMinimum& l, const LocalMinimum& r) {
    return l.value < r.value || (l.value == r.value && l.location < r.location);
  });
  // Neighbouring brackets may refine onto the same basin.
  std::vector<LocalMinimum> unique;
  for (const auto& m : out) {
    bool dup = false;
    for (const auto& u : unique) {
      if (std::abs(u.location - m.location) < 2.0 * h) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(m);
  }
  return unique;
}

std::vector<LocalMinimum> scan_minima(const std::function<double(double)>& f, double lo,
                                      double hi, int grid_points, double tol) {
  std::vector<double> samples(static_cast<std::size_t>(std::max(grid_points, 2)));
  const int n = static_cast<int>(samples.size());
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) samples[i] = f(i == n - 1 ? hi : lo + i * h);
  return refine_grid_minima(f, lo, hi, samples, tol);
}

}  // namespace nsqa
