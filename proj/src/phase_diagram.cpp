#include "nsqa/phase_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nsqa::phase {

std::string to_string(Order o) { return o == Order::first ? "first" : "second"; }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::qp_plus: return "QP+";
    case Phase::qp_minus: return "QP-";
    case Phase::ferro: return "F";
    case Phase::ferro_prime: return "F'";
  }
  return "?";
}

namespace {

enum class Region { lower, upper, interior };

struct RawEvent {
  double s_c;
  Order order;
  double x_below;
  double x_above;
};

bool is_qp(Phase p) { return p == Phase::qp_plus || p == Phase::qp_minus; }

}  // namespace

std::vector<Transition> scan_transitions(const LandscapeFamily& family, Interval range,
                                         const ScanOptions& opts) {
  if (!(range.lo >= 0.0 && range.hi <= 1.0 && range.lo < range.hi))
    throw ParameterError("s range must be a non-empty subinterval of [0, 1]");

  const double span = family.x_hi - family.x_lo;
  const double jump_threshold = 10.0 * span / 4096.0;
  const double btol = 1e-9 * span;

  auto region = [&](double x) {
    if (x <= family.x_lo + btol) return Region::lower;
    if (family.upper_is_phase && x >= family.x_hi - btol) return Region::upper;
    return Region::interior;
  };
  auto solve_x = [&](double s) { return family.solve(s).minimizer; };

  const int n = std::max(2, static_cast<int>(std::lround((range.hi - range.lo) / opts.s_step)) + 1);
  const double h = (range.hi - range.lo) / (n - 1);
  std::vector<double> s_grid(n), x_grid(n);
  for (int i = 0; i < n; ++i) {
    s_grid[i] = i == n - 1 ? range.hi : range.lo + i * h;
    x_grid[i] = solve_x(s_grid[i]);
  }

  std::vector<RawEvent> events;
  for (int i = 1; i < n; ++i) {
    double a = s_grid[i - 1], b = s_grid[i];
    double xa = x_grid[i - 1], xb = x_grid[i];

    if (std::abs(xb - xa) > jump_threshold) {
      while (b - a > opts.jump_tolerance) {
        const double c = 0.5 * (a + b);
        const double xc = solve_x(c);
        if (std::abs(xc - xa) >= std::abs(xb - xc)) {
          b = c;
          xb = xc;
        } else {
          a = c;
          xa = xc;
        }
      }
      if (std::abs(xb - xa) > jump_threshold) {
        // Step 99 bracket widths into the interior side. A sqrt onset grows
        // there by about 10x; a genuine jump barely moves. Shrinking the
        // bracket instead runs into roundoff once the well is ~width^2 deep.
        const double jump = std::abs(xb - xa);
        const double w = b - a;
        bool steep = false;
        // Between two ferromagnetic minimizers a genuine jump leaves the
        // losing branch behind as a second local minimum.
        auto coexists = [&](double s, double x_other, double x_self) {
          for (const auto& m : family.solve(s).minima)
            if (std::abs(m.location - x_other) < std::abs(m.location - x_self)) return true;
          return false;
        };
        if (region(xa) == Region::interior && region(xb) == Region::interior) {
          steep = !coexists(a, xb, xa) && !coexists(b, xa, xb);
        } else if (region(xa) != Region::interior && region(xb) == Region::interior) {
          const double t = std::min(range.hi, b + 99.0 * w);
          steep = std::abs(solve_x(t) - xa) > 3.0 * jump;
        } else if (region(xb) != Region::interior && region(xa) == Region::interior) {
          const double t = std::max(range.lo, a - 99.0 * w);
          steep = std::abs(solve_x(t) - xb) > 3.0 * jump;
        }
        if (!steep) {
          events.push_back({0.5 * (a + b), Order::first, xa, xb});
          continue;
        }
      }
      // Steep but continuous; fall through with the original cell.
      a = s_grid[i - 1];
      b = s_grid[i];
      xa = x_grid[i - 1];
      xb = x_grid[i];
    }

    const Region ra = region(xa);
    const Region rb = region(xb);
    if (ra == rb) continue;
    if (ra != Region::interior && rb != Region::interior) {
      // Boundary to boundary without a resolved jump cannot be continuous.
      events.push_back({0.5 * (a + b), Order::first, xa, xb});
      continue;
    }
    const Region edge = ra == Region::interior ? rb : ra;
    const bool upper = edge == Region::upper;

    double s_c = 0.5 * (a + b);
    bool rooted = false;
    if (family.curvature) {
      double ca = family.curvature(a, upper);
      const double cb = family.curvature(b, upper);
      if ((ca > 0.0) != (cb > 0.0)) {
        double lo = a, hi = b;
        while (hi - lo > opts.root_tolerance) {
          const double mid = 0.5 * (lo + hi);
          const double cm = family.curvature(mid, upper);
          if ((cm > 0.0) == (ca > 0.0)) {
            lo = mid;
            ca = cm;
          } else {
            hi = mid;
          }
          if (mid == lo && mid == hi) break;
        }
        s_c = 0.5 * (lo + hi);
        rooted = true;
      }
    }
    if (!rooted) {
      double lo = a, hi = b;
      const bool lo_edge = region(xa) != Region::interior;
      while (hi - lo > opts.jump_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const bool mid_edge = region(solve_x(mid)) != Region::interior;
        if (mid_edge == lo_edge) lo = mid; else hi = mid;
      }
      s_c = 0.5 * (lo + hi);
    }
    events.push_back({s_c, Order::second, xa, xb});
  }

  // Phase labels along s.
  auto boundary_phase = [&](double x, Phase interior) {
    switch (region(x)) {
      case Region::lower: return Phase::qp_plus;
      case Region::upper: return Phase::qp_minus;
      default: return interior;
    }
  };
  std::vector<Transition> out;
  Phase current = boundary_phase(x_grid.front(), Phase::ferro);
  for (const auto& e : events) {
    Transition t;
    t.s_c = e.s_c;
    t.order = e.order;
    t.x_below = e.x_below;
    t.x_above = e.x_above;
    t.below = current;
    if (region(e.x_above) != Region::interior) {
      t.above = boundary_phase(e.x_above, Phase::ferro);
    } else if (is_qp(current)) {
      t.above = e.order == Order::second ? Phase::ferro_prime : Phase::ferro;
    } else {
      t.above = Phase::ferro;
      if (current == Phase::ferro) {
        t.below = Phase::ferro_prime;
        if (!out.empty() && out.back().above == Phase::ferro) out.back().above = Phase::ferro_prime;
      }
    }
    current = t.above;
    out.push_back(t);
  }
  return out;
}

std::vector<Transition> locate_transition(const std::function<landscape::EnergyTerms(double)>& terms,
                                          const ModelSpec& spec, Interval s_range,
                                          const ScanOptions& opts) {
  spec.validate();
  const landscape::ThetaGrid grid(spec.p, spec.k, opts.grid_points);
  LandscapeFamily family;
  family.solve = [&](double s) { return grid.minimize(terms(s)); };
  family.curvature = [&](double s, bool upper) {
    return landscape::boundary_curvature(terms(s), spec.p, spec.k, upper);
  };
  family.x_lo = 0.0;
  family.x_hi = std::numbers::pi;
  family.upper_is_phase = true;
  return scan_transitions(family, s_range, opts);
}

std::vector<Transition> locate_transition(double lambda, const ModelSpec& spec, Interval s_range,
                                          const ScanOptions& opts) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  return locate_transition(
      [&](double s) { return landscape::terms_for({s, lambda}, spec); }, spec, s_range, opts);
}

std::vector<BoundarySegment> stitch(const std::vector<std::pair<double, std::vector<Transition>>>& rows,
                                    double lambda_step) {
  struct Open {
    BoundarySegment seg;
    std::size_t last_row;
  };
  std::vector<Open> segs;
  const double join = 5.0 * lambda_step;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double lambda = rows[r].first;
    const auto& trans = rows[r].second;
    struct Cand {
      double dist;
      std::size_t seg;
      std::size_t tr;
    };
    std::vector<Cand> cands;
    for (std::size_t si = 0; si < segs.size(); ++si) {
      if (r == 0 || segs[si].last_row != r - 1) continue;
      const double s_last = segs[si].seg.points.back().point.s;
      for (std::size_t ti = 0; ti < trans.size(); ++ti) {
        const auto& last = segs[si].seg.points.back();
        if (trans[ti].order != segs[si].seg.order) continue;
        if (trans[ti].below != last.low || trans[ti].above != last.high) continue;
        const double d = std::abs(trans[ti].s_c - s_last);
        if (d < join) cands.push_back({d, si, ti});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
    std::vector<char> seg_used(segs.size(), 0), tr_used(trans.size(), 0);
    for (const auto& c : cands) {
      if (seg_used[c.seg] || tr_used[c.tr]) continue;
      seg_used[c.seg] = tr_used[c.tr] = 1;
      const auto& t = trans[c.tr];
      segs[c.seg].seg.points.push_back({{t.s_c, lambda}, t.below, t.above});
      segs[c.seg].last_row = r;
    }
    for (std::size_t ti = 0; ti < trans.size(); ++ti) {
      if (tr_used[ti]) continue;
      const auto& t = trans[ti];
      Open o;
      o.seg.order = t.order;
      o.seg.points.push_back({{t.s_c, lambda}, t.below, t.above});
      o.last_row = r;
      segs.push_back(std::move(o));
    }
  }
  std::vector<BoundarySegment> out;
  out.reserve(segs.size());
  for (auto& o : segs) out.push_back(std::move(o.seg));
  return out;
}

PhaseDiagram trace_diagram(const ModelSpec& spec, double lambda_step, const ScanOptions& opts) {
  if (!(lambda_step > 0.0 && lambda_step <= 0.1))
    throw ParameterError("lambda step must lie in (0, 0.1]");
  spec.validate();

  const int n = static_cast<int>(std::lround(1.0 / lambda_step)) + 1;
  const double step = 1.0 / (n - 1);
  std::vector<std::pair<double, std::vector<Transition>>> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double lambda = i == n - 1 ? 1.0 : i * step;
    rows.emplace_back(lambda, locate_transition(lambda, spec, {0.0, 1.0}, opts));
  }

  PhaseDiagram d;
  d.spec = spec;
  d.lambda_step = step;
  d.segments = stitch(rows, step);
  for (auto& seg : d.segments) seg.s_tolerance = opts.jump_tolerance;

  // Branch point: top end of a second-order line that runs into a first-order one.
  auto has_second = [&](double lambda) {
    for (const auto& t : locate_transition(lambda, spec, {0.0, 1.0}, opts))
      if (t.order == Order::second) return true;
    return false;
  };
  for (const auto& seg : d.segments) {
    if (seg.order != Order::second) continue;
    const auto& top = seg.points.back();
    if (top.point.lambda >= 1.0) continue;
    bool meets_first = false;
    for (const auto& other : d.segments) {
      if (other.order != Order::first) continue;
      for (const auto& bp : other.points) {
        if (std::abs(bp.point.lambda - top.point.lambda) <= 1.5 * step &&
            std::abs(bp.point.s - top.point.s) < 5.0 * step)
          meets_first = true;
      }
    }
    if (!meets_first) continue;
    double lo = top.point.lambda, hi = std::min(1.0, lo + step);
    for (int it = 0; it < 12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (has_second(mid)) lo = mid; else hi = mid;
    }
    const double lambda_b = 0.5 * (lo + hi);
    double s_b = top.point.s;
    for (const auto& t : locate_transition(lo, spec, {0.0, 1.0}, opts))
      if (t.order == Order::second) s_b = t.s_c;
    if (!d.branch_point || lambda_b > d.branch_point->lambda) d.branch_point = AnnealPoint{s_b, lambda_b};
  }
  return d;
}

ObstacleRaster::ObstacleRaster(const std::vector<BoundarySegment>& segments, double lambda_step,
                               int size, int dilation)
    : size_(size), cells_(static_cast<std::size_t>(size) * size, 0) {
  if (size < 8) throw ParameterError("raster needs at least 8 cells per side");
  if (dilation < 1) throw ParameterError("raster dilation must be >= 1");
  for (const auto& seg : segments) {
    if (seg.order != Order::first) continue;
    const auto& pts = seg.points;
    if (pts.size() == 1) mark_line(pts[0].point.lambda, pts[0].point.s, pts[0].point.lambda, pts[0].point.s);
    for (std::size_t i = 1; i < pts.size(); ++i)
      mark_line(pts[i - 1].point.lambda, pts[i - 1].point.s, pts[i].point.lambda, pts[i].point.s);
    // A line still present one step above lambda = 0 is continued to the edge:
    // the sweep cannot resolve it below its first positive lambda.
    const auto lowest = std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.point.lambda < b.point.lambda;
    });
    const double reach = lowest->point.lambda <= 1.5 * lambda_step ? 0.0 : lowest->point.lambda - lambda_step;
    if (lowest->point.lambda > 0.0) mark_line(lowest->point.lambda, lowest->point.s, reach, lowest->point.s);
    const auto highest = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.point.lambda < b.point.lambda;
    });
    if (highest->point.lambda < 1.0)
      mark_line(highest->point.lambda, highest->point.s, std::min(1.0, highest->point.lambda + lambda_step),
                highest->point.s);
  }
  // Dilate so that diagonal steps cannot cut corners.
  std::vector<char> grown = cells_;
  for (int r = 0; r < size_; ++r)
    for (int c = 0; c < size_; ++c) {
      if (!blocked(c, r)) continue;
      for (int dr = -dilation; dr <= dilation; ++dr)
        for (int dc = -dilation; dc <= dilation; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr >= 0 && rr < size_ && cc >= 0 && cc < size_)
            grown[static_cast<std::size_t>(rr) * size_ + cc] = 1;
        }
    }
  cells_ = std::move(grown);
}

void ObstacleRaster::mark_line(double l0, double s0, double l1, double s1) {
  const double scale = size_ - 1;
  const double len = std::max(std::abs(l1 - l0), std::abs(s1 - s0)) * scale;
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const int c = static_cast<int>(std::lround((l0 + t * (l1 - l0)) * scale));
    const int r = static_cast<int>(std::lround((s0 + t * (s1 - s0)) * scale));
    if (c >= 0 && c < size_ && r >= 0 && r < size_) cells_[static_cast<std::size_t>(r) * size_ + c] = 1;
  }
}

bool ObstacleRaster::clear(AnnealPoint a, AnnealPoint b) const {
  const double scale = size_ - 1;
  const double len = std::max(std::abs(b.lambda - a.lambda), std::abs(b.s - a.s)) * scale;
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const int c = static_cast<int>(std::lround((a.lambda + t * (b.lambda - a.lambda)) * scale));
    const int r = static_cast<int>(std::lround((a.s + t * (b.s - a.s)) * scale));
    if (blocked(std::clamp(c, 0, size_ - 1), std::clamp(r, 0, size_ - 1))) return false;
  }
  return true;
}

namespace {

std::optional<AnnealPath> raster_path(const ObstacleRaster& raster) {
  const int n = raster.size();

  bool edge_free = true;
  for (int r = 0; r < n && edge_free; ++r) edge_free = !raster.blocked(n - 1, r);
  if (edge_free) return AnnealPath::constant(1.0);

  // entry[r][c]: column at which the path climbed into row r, or -1 if unreachable.
  std::vector<std::vector<int>> entry(n, std::vector<int>(n, -1));
  for (int c = 0; c < n; ++c)
    if (!raster.blocked(c, 0)) entry[0][c] = c;

  for (int r = 1; r < n; ++r) {
    const auto& below = entry[r - 1];
    auto& row = entry[r];
    int c = 0;
    while (c < n) {
      if (raster.blocked(c, r)) {
        ++c;
        continue;
      }
      int end = c;
      while (end < n && !raster.blocked(end, r)) ++end;
      // Free run [c, end): nearest climbing column for every cell.
      int last = -1;
      for (int j = c; j < end; ++j) {
        if (below[j] >= 0) last = j;
        row[j] = last;
      }
      last = -1;
      for (int j = end - 1; j >= c; --j) {
        if (below[j] >= 0) last = j;
        if (last >= 0 && (row[j] < 0 || last - j < j - row[j])) row[j] = last;
      }
      c = end;
    }
  }
  if (entry[n - 1][n - 1] < 0) return std::nullopt;

  // Walk back from the goal collecting (entry, exit) columns per row.
  std::vector<int> enter(n), leave(n);
  int col = n - 1;
  for (int r = n - 1; r >= 0; --r) {
    leave[r] = col;
    enter[r] = entry[r][col];
    col = enter[r];
  }

  const double ds = 1.0 / (n - 1);
  std::vector<AnnealPoint> pts;
  pts.push_back({0.0, raster.lambda_of(leave[0])});
  for (int r = 1; r < n; ++r) {
    if (enter[r] == leave[r]) continue;
    pts.push_back({raster.s_of(r) - 0.5 * ds, raster.lambda_of(enter[r])});
    pts.push_back({raster.s_of(r), raster.lambda_of(leave[r])});
  }
  if (pts.back().s < 1.0) pts.push_back({1.0, raster.lambda_of(leave[n - 1])});
  pts.back().s = 1.0;
  pts.back().lambda = 1.0;

  // Greedy line of sight: jump to the farthest waypoint reachable in a straight
  // line. s stays increasing because the raster path is monotone in s.
  std::vector<AnnealPoint> simple{pts.front()};
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    std::size_t j = pts.size() - 1;
    while (j > i + 1 && !(pts[j].s > simple.back().s && raster.clear(simple.back(), pts[j]))) --j;
    simple.push_back(pts[j]);
    i = j;
  }
  for (std::size_t k = 1; k < simple.size(); ++k)
    if (!(simple[k].s > simple[k - 1].s)) simple[k].s = std::nextafter(simple[k - 1].s, 2.0);
  if (simple.back().s > 1.0) return std::nullopt;
  return AnnealPath(std::move(simple));
}

}  // namespace

std::optional<AnnealPath> find_annealing_path(const std::vector<BoundarySegment>& segments,
                                              double lambda_step, int raster_size) {
  for (int dilation : {8, 1}) {
    if (auto p = raster_path(ObstacleRaster(segments, lambda_step, raster_size, dilation))) return p;
  }
  return std::nullopt;
}

std::optional<AnnealPath> find_annealing_path(const ModelSpec& /*spec*/, const PhaseDiagram& diagram,
                                              int raster_size) {
  return find_annealing_path(diagram.segments, diagram.lambda_step, raster_size);
}

bool segments_intersect(AnnealPoint p1, AnnealPoint p2, AnnealPoint q1, AnnealPoint q2) {
  auto orient = [](AnnealPoint a, AnnealPoint b, AnnealPoint c) {
    const double v = (b.lambda - a.lambda) * (c.s - a.s) - (b.s - a.s) * (c.lambda - a.lambda);
    return (v > 0) - (v < 0);
  };
  auto on_seg = [](AnnealPoint a, AnnealPoint b, AnnealPoint c) {
    return std::min(a.lambda, b.lambda) <= c.lambda && c.lambda <= std::max(a.lambda, b.lambda) &&
           std::min(a.s, b.s) <= c.s && c.s <= std::max(a.s, b.s);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_seg(p1, p2, q1)) return true;
  if (o2 == 0 && on_seg(p1, p2, q2)) return true;
  if (o3 == 0 && on_seg(q1, q2, p1)) return true;
  if (o4 == 0 && on_seg(q1, q2, p2)) return true;
  return false;
}

bool path_crosses_first_order(const AnnealPath& path, const std::vector<BoundarySegment>& segments) {
  const auto& w = path.waypoints();
  for (const auto& seg : segments) {
    if (seg.order != Order::first) continue;
    const auto& pts = seg.points;
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (pts.size() == 1 && segments_intersect(w[i - 1], w[i], pts[0].point, pts[0].point)) return true;
      for (std::size_t j = 1; j < pts.size(); ++j)
        if (segments_intersect(w[i - 1], w[i], pts[j - 1].point, pts[j].point)) return true;
    }
  }
  return false;
}

}  // namespace nsqa::phase
