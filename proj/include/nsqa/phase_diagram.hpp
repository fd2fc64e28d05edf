#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsqa/landscape.hpp"
#include "nsqa/model.hpp"

namespace nsqa::phase {

enum class Order { first, second };

/// QP+ : theta = 0, QP- : theta = pi, F / F' : ferromagnetic (0 < theta < pi).
enum class Phase { qp_plus, qp_minus, ferro, ferro_prime };

std::string to_string(Order o);
std::string to_string(Phase p);

struct Transition {
  double s_c = 0.0;
  Order order = Order::first;
  Phase below = Phase::qp_plus;
  Phase above = Phase::ferro;
  double x_below = 0.0;  // global minimizer just below s_c
  double x_above = 0.0;  // global minimizer just above s_c
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Tuning of the transition scan along s.
struct ScanOptions {
  double s_step = 1e-3;
  double jump_tolerance = 1e-6;     // bisection width for first-order points
  double root_tolerance = 1e-12;    // bisection width for curvature roots
  int grid_points = 4096;           // landscape grid
};

/// One-parameter family of landscapes, parameterised by s, with order
/// parameter x in [x_lo, x_hi]. `curvature(s, upper)` is the second
/// derivative of the landscape at x_lo (upper = false) or x_hi (upper = true);
/// it may be empty, in which case onset points are bisected on the
/// boundary-membership of the minimizer instead.
struct LandscapeFamily {
  std::function<landscape::LandscapeSolution(double s)> solve;
  std::function<double(double s, bool upper)> curvature;
  double x_lo = 0.0;
  double x_hi = 1.0;
  bool upper_is_phase = false;  // whether x_hi is a distinct paramagnetic phase (QP-)
};

/// Scan s over `range`, detect minimizer jumps (first order) and continuous
/// departures from a boundary phase (second order), and refine each point.
std::vector<Transition> scan_transitions(const LandscapeFamily& family, Interval range,
                                         const ScanOptions& opts = {});

/// Transitions of the semiclassical landscape at fixed lambda.
std::vector<Transition> locate_transition(double lambda, const ModelSpec& spec,
                                          Interval s_range = {}, const ScanOptions& opts = {});

/// Same, for an arbitrary coefficient map s -> EnergyTerms (used by the bath module).
std::vector<Transition> locate_transition(const std::function<landscape::EnergyTerms(double)>& terms,
                                          const ModelSpec& spec, Interval s_range,
                                          const ScanOptions& opts = {});

struct BoundaryPoint {
  AnnealPoint point;
  Phase low = Phase::qp_plus;   // phase at smaller s
  Phase high = Phase::ferro;    // phase at larger s
};

struct BoundarySegment {
  std::vector<BoundaryPoint> points;  // ordered by lambda
  Order order = Order::first;
  double s_tolerance = 1e-6;
};

struct PhaseDiagram {
  ModelSpec spec;
  double lambda_step = 0.01;
  std::vector<BoundarySegment> segments;
  /// Point where the second-order line meets the first-order line, if any.
  std::optional<AnnealPoint> branch_point;
};

/// Sweep lambda over [0, 1] with the given step and stitch per-lambda
/// transitions into boundary segments.
PhaseDiagram trace_diagram(const ModelSpec& spec, double lambda_step,
                           const ScanOptions& opts = {});

/// Stitch per-lambda transitions (sorted by lambda) into segments. A row joins
/// a segment when order and both phase labels agree and s_c moved by less
/// than five lambda steps.
std::vector<BoundarySegment> stitch(const std::vector<std::pair<double, std::vector<Transition>>>& rows,
                                    double lambda_step);

/// Occupancy raster of the (lambda, s) square with first-order segments drawn
/// as obstacles, grown by `dilation` cells. cell(col, row) with col ~ lambda, row ~ s.
/// Segment ends are extended by one lambda step, the resolution of the sweep.
class ObstacleRaster {
 public:
  ObstacleRaster(const std::vector<BoundarySegment>& segments, double lambda_step, int size = 512,
                 int dilation = 1);
  bool blocked(int col, int row) const { return cells_[static_cast<std::size_t>(row) * size_ + col]; }
  /// True if the straight segment a-b touches no blocked cell.
  bool clear(AnnealPoint a, AnnealPoint b) const;
  int size() const { return size_; }
  double lambda_of(int col) const { return static_cast<double>(col) / (size_ - 1); }
  double s_of(int row) const { return static_cast<double>(row) / (size_ - 1); }

 private:
  void mark_line(double l0, double s0, double l1, double s1);
  int size_;
  std::vector<char> cells_;
};

/// Path from s = 0 to (s, lambda) = (1, 1) that crosses no first-order segment,
/// or nullopt if none exists. A wide clearance around the obstacles is tried
/// first, then the minimal one-cell clearance.
std::optional<AnnealPath> find_annealing_path(const ModelSpec& spec, const PhaseDiagram& diagram,
                                              int raster_size = 512);

std::optional<AnnealPath> find_annealing_path(const std::vector<BoundarySegment>& segments,
                                              double lambda_step, int raster_size = 512);

/// True if the segment p1-p2 intersects q1-q2 (closed segments).
bool segments_intersect(AnnealPoint p1, AnnealPoint p2, AnnealPoint q1, AnnealPoint q2);

/// True if the path crosses any first-order boundary polyline.
bool path_crosses_first_order(const AnnealPath& path, const std::vector<BoundarySegment>& segments);

}  // namespace nsqa::phase
