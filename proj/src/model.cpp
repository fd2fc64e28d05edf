#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsqa/model.hpp"

namespace nsqa {

void ModelSpec::validate() const {
  if (p < 2) throw ParameterError("p must be >= 2");
  if (variant == Variant::nonstoquastic && k < 2) throw ParameterError("k must be >= 2");
}

void AnnealPoint::validate() const {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("s must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
}

AnnealPath::AnnealPath(std::vector<AnnealPoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) throw ParameterError("path needs at least two waypoints");
  if (waypoints_.front().s != 0.0) throw ParameterError("path must start at s = 0");
  if (waypoints_.back().s != 1.0) throw ParameterError("path must end at s = 1");
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    waypoints_[i].validate();
    if (i > 0 && !(waypoints_[i].s > waypoints_[i - 1].s))
      throw ParameterError("path waypoints must have strictly increasing s");
  }
}

AnnealPath AnnealPath::constant(double lambda) {
  return AnnealPath({{0.0, lambda}, {1.0, lambda}});
}

AnnealPath AnnealPath::parse(const std::string& text) {
  std::vector<AnnealPoint> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ParameterError("waypoint '" + item + "' is not s:lambda");
    try {
      std::size_t used = 0;
      const std::string s_txt = item.substr(0, colon);
      const std::string l_txt = item.substr(colon + 1);
      const double s = std::stod(s_txt, &used);
      if (used != s_txt.size()) throw ParameterError("bad number");
      const double l = std::stod(l_txt, &used);
      if (used != l_txt.size()) throw ParameterError("bad number");
      pts.push_back({s, l});
    } catch (const std::logic_error&) {
      throw ParameterError("waypoint '" + item + "' is not s:lambda");
    }
  }
  return AnnealPath(std::move(pts));
}

double AnnealPath::lambda_at(double s) const {
  if (s <= waypoints_.front().s) return waypoints_.front().lambda;
  if (s >= waypoints_.back().s) return waypoints_.back().lambda;
  const auto it = std::upper_bound(waypoints_.begin(), waypoints_.end(), s,
                                   [](double v, const AnnealPoint& p) { return v < p.s; });
  const AnnealPoint& b = *it;
  const AnnealPoint& a = *(it - 1);
  const double t = (s - a.s) / (b.s - a.s);
  return std::clamp(a.lambda + t * (b.lambda - a.lambda), 0.0, 1.0);
}

std::string AnnealPath::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (i) os << ',';
    os << waypoints_[i].s << ':' << waypoints_[i].lambda;
  }
  return os.str();
}

}  // namespace nsqa
