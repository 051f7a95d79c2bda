#ifndef IMOCA_CFGP_HYPERFIT_HPP
#define IMOCA_CFGP_HYPERFIT_HPP

#include "imoca/cfgp/model.hpp"

namespace imoca::cfgp {

struct HyperfitConfig {
  // search box (applied to standardized data in the engine)
  double amplitude_min = 0.2, amplitude_max = 5.0;
  double lengthscale_min = 0.03, lengthscale_max = 3.0;
  double bandwidth_min = 0.1, bandwidth_max = 5.0;
  double noise_min = 1e-8, noise_max = 1e-2;
  int num_starts = 4;        // random restarts in addition to the defaults
  int max_evals = 220;       // Nelder-Mead budget per start
  std::uint64_t seed = 0;
};

struct HyperfitResult {
  KernelParams params;
  double log_likelihood = 0.0;
  bool fell_back_to_defaults = false;
};

// Log marginal likelihood of the records under the product SE kernel.
double log_marginal_likelihood(const std::vector<TrainingPoint>& points,
                               const Eigen::VectorXd& values,
                               const KernelParams& params);

// Maximize the log marginal likelihood over the box via multi-start
// Nelder-Mead in log space. The default parameters are always one of the
// starts, so the result is never worse than the defaults.
HyperfitResult fit_hyperparams(const std::vector<TrainingPoint>& points,
                               const Eigen::VectorXd& values,
                               const HyperfitConfig& config = {});

}  // namespace imoca::cfgp

#endif
