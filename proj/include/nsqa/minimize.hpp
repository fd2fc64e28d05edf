#pragma once

#include <functional>
#include <vector>

namespace nsqa {

struct LocalMinimum {
  double location = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of `f` inside [lo, hi].
LocalMinimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol);

/// Grid scan of `f` over [lo, hi] with `grid_points` samples followed by a
/// golden-section refinement of every grid-local minimum. Endpoint minima are
/// kept at the endpoint unless the refinement finds a strictly lower interior
/// value. Result is sorted by value (lowest first).
std::vector<LocalMinimum> scan_minima(const std::function<double(double)>& f, double lo,
                                      double hi, int grid_points = 4096, double tol = 1e-12);

/// Same as scan_minima, but on pre-sampled grid values (grid[i] = lo + i*h).
std::vector<LocalMinimum> refine_grid_minima(const std::function<double(double)>& f, double lo,
                                             double hi, const std::vector<double>& samples,
                                             double tol = 1e-12);

}  // namespace nsqa
