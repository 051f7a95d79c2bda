#include "imoca/fidelity/reduction.hpp"

#include <cmath>
#include <stdexcept>

namespace imoca::fidelity {

void FidelityReductionConfig::validate() const {
  if (!(bandwidth_z > 0.0)) {
    throw std::invalid_argument("FidelityReductionConfig: bandwidth must be > 0");
  }
  if (candidate_grid.empty() || candidate_grid.back() != 1.0) {
    throw std::invalid_argument("FidelityReductionConfig: grid must end at 1.0");
  }
  for (std::size_t i = 0; i < candidate_grid.size(); ++i) {
    const double z = candidate_grid[i];
    if (z < 0.0 || z > 1.0 || (i > 0 && z <= candidate_grid[i - 1])) {
      throw std::invalid_argument(
          "FidelityReductionConfig: grid must be strictly increasing in [0,1]");
    }
  }
}

double info_gap(double z, double bandwidth_z) {
  const double xi = std::fabs(z - 1.0) / bandwidth_z;
  return std::min(1.0, xi);
}

double gamma_threshold(double z, const Eigen::VectorXd& x,
                       const FidelityReductionConfig& config) {
  const double cost_z = config.cost(x, z);
  const double cost_top = config.cost(x, 1.0);
  if (!(cost_z > 0.0) || !(cost_top > 0.0)) {
    throw std::invalid_argument("gamma_threshold: cost curve must be positive");
  }
  return info_gap(z, config.bandwidth_z) *
         std::pow(cost_z / cost_top, config.exponent_q());
}

double beta_t(int t, double bandwidth_z) {
  const double arg = (2.0 * t + 1.0) / bandwidth_z;
  if (arg <= 1.0) return 0.0;
  return std::sqrt(0.5 * std::log(arg));
}

std::vector<double> reduced_set_from_stds(const Eigen::VectorXd& x, int t,
                                          const Eigen::VectorXd& stds,
                                          const FidelityReductionConfig& config) {
  config.validate();
  if (stds.size() != static_cast<Eigen::Index>(config.candidate_grid.size())) {
    throw std::invalid_argument("reduced_set: stds/grid size mismatch");
  }
  double sup_xi = 0.0;
  for (double z : config.candidate_grid) {
    sup_xi = std::max(sup_xi, info_gap(z, config.bandwidth_z));
  }
  const double bar = beta_t(t, config.bandwidth_z) * sup_xi;

  std::vector<double> out;
  for (std::size_t i = 0; i < config.candidate_grid.size(); ++i) {
    const double z = config.candidate_grid[i];
    if (z == 1.0) continue;
    const double xi = info_gap(z, config.bandwidth_z);
    if (xi <= bar) continue;
    if (stds[static_cast<Eigen::Index>(i)] <= gamma_threshold(z, x, config)) continue;
    out.push_back(z);
  }
  out.push_back(1.0);
  return out;
}

std::vector<double> reduced_set(const Eigen::VectorXd& x, int t,
                                const cfgp::CfGpModel& model,
                                const FidelityReductionConfig& config) {
  if (t < 1) throw std::invalid_argument("reduced_set: iteration must be >= 1");
  Eigen::VectorXd stds(static_cast<Eigen::Index>(config.candidate_grid.size()));
  for (std::size_t i = 0; i < config.candidate_grid.size(); ++i) {
    stds[static_cast<Eigen::Index>(i)] =
        model.posterior(x, config.candidate_grid[i]).second;
  }
  return reduced_set_from_stds(x, t, stds, config);
}

}  // namespace imoca::fidelity
