#include "imoca/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace imoca::metrics {

namespace {

using Point = Eigen::VectorXd;

double inclusive_hv(const Point& p, const Point& ref) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) v *= p[i] - ref[i];
  return v;
}

// drop points dominated within the set (weak dominance removes duplicates)
std::vector<Point> prune(std::vector<Point> pts) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j) {
      if (i == j) continue;
      const bool geq = (pts[j].array() >= pts[i].array()).all();
      if (geq && (pareto::dominates(pts[j], pts[i]) || j < i)) keep = false;
    }
    if (keep) out.push_back(pts[i]);
  }
  return out;
}

double hv_2d(std::vector<Point> pts, const Point& ref) {
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a[0] > b[0]; });
  double volume = 0.0;
  double prev_y = ref[1];
  for (const auto& p : pts) {
    if (p[1] > prev_y) {
      volume += (p[0] - ref[0]) * (p[1] - prev_y);
      prev_y = p[1];
    }
  }
  return volume;
}

// WFG-style exclusive-hypervolume recursion (maximization).
double hv_wfg(const std::vector<Point>& pts, const Point& ref);

double exclusive_hv(const Point& p, const std::vector<Point>& rest, const Point& ref) {
  if (rest.empty()) return inclusive_hv(p, ref);
  std::vector<Point> limited;
  limited.reserve(rest.size());
  for (const auto& q : rest) limited.push_back(q.cwiseMin(p));
  return inclusive_hv(p, ref) - hv_wfg(prune(std::move(limited)), ref);
}

double hv_wfg(const std::vector<Point>& pts, const Point& ref) {
  if (pts.empty()) return 0.0;
  if (pts.size() == 1) return inclusive_hv(pts[0], ref);
  if (pts[0].size() == 2) return hv_2d(pts, ref);
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    total += exclusive_hv(pts[i], {pts.begin() + i + 1, pts.end()}, ref);
  }
  return total;
}

}  // namespace

double hypervolume(const pareto::ParetoFrontSample& front,
                   const HypervolumeConfig& config) {
  const Eigen::Index k = config.reference_point.size();
  if (k < 2 || k > 9) {
    throw std::invalid_argument("hypervolume: supports 2 to 9 objectives");
  }
  if (front.points.empty()) {
    throw std::invalid_argument("hypervolume: empty front");
  }
  for (const auto& p : front.points) {
    if (p.size() != k) {
      throw std::invalid_argument("hypervolume: point/reference dimension mismatch");
    }
    if (!(p.array() > config.reference_point.array()).all()) {
      std::ostringstream msg;
      msg << "hypervolume: point (";
      for (Eigen::Index i = 0; i < k; ++i) msg << (i ? "," : "") << p[i];
      msg << ") does not dominate the reference point";
      throw std::invalid_argument(msg.str());
    }
  }
  // dominated points contribute nothing; prune for speed and correctness
  std::vector<Point> pts = prune(front.points);
  // descending first objective improves WFG limit-set pruning
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a[0] > b[0]; });
  return hv_wfg(pts, config.reference_point);
}

double r2_distance(const pareto::ParetoFrontSample& reference_front,
                   const pareto::ParetoFrontSample& recovered_front) {
  if (reference_front.points.empty() || recovered_front.points.empty()) {
    throw std::invalid_argument("r2_distance: fronts must be nonempty");
  }
  const Eigen::Index k = reference_front.points.front().size();
  if (recovered_front.points.front().size() != k) {
    throw std::invalid_argument("r2_distance: objective count mismatch");
  }
  double total = 0.0;
  for (const auto& r : reference_front.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : recovered_front.points) {
      best = std::min(best, (r - p).norm());
    }
    total += best;
  }
  return total / static_cast<double>(reference_front.points.size());
}

namespace {

std::optional<double> earliest_cost(const std::vector<CostPhvPoint>& curve,
                                    double target) {
  for (const auto& pt : curve) {
    if (pt.phv >= target) return pt.cost;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> cost_reduction(const std::vector<CostPhvPoint>& curve_a,
                                     const std::vector<CostPhvPoint>& curve_b,
                                     double target_phv) {
  const auto ca = earliest_cost(curve_a, target_phv);
  const auto cb = earliest_cost(curve_b, target_phv);
  if (!ca || !cb) return std::nullopt;
  return 1.0 - *ca / *cb;
}

}  // namespace imoca::metrics
