#ifndef IMOCA_METRICS_METRICS_HPP
#define IMOCA_METRICS_METRICS_HPP

#include <optional>
#include <vector>

#include "imoca/pareto/pareto.hpp"

namespace imoca::metrics {

struct HypervolumeConfig {
  // must be componentwise strictly below every front point (maximization)
  Eigen::VectorXd reference_point;
};

// Exact Lebesgue measure of the region dominated by the front above the
// reference point. Supports 2 to 9 objectives.
double hypervolume(const pareto::ParetoFrontSample& front,
                   const HypervolumeConfig& config);

// Mean over reference-front points of the minimum Euclidean distance to the
// recovered front. Zero iff every reference point is covered exactly.
double r2_distance(const pareto::ParetoFrontSample& reference_front,
                   const pareto::ParetoFrontSample& recovered_front);

struct CostPhvPoint {
  double cost = 0.0;
  double phv = 0.0;
};

// G = 1 - C_a/C_b where each C is the earliest cost at which the series
// reaches target_phv; nullopt when either series never reaches the target.
std::optional<double> cost_reduction(const std::vector<CostPhvPoint>& curve_a,
                                     const std::vector<CostPhvPoint>& curve_b,
                                     double target_phv);

}  // namespace imoca::metrics

#endif
