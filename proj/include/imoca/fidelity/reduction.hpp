#ifndef IMOCA_FIDELITY_REDUCTION_HPP
#define IMOCA_FIDELITY_REDUCTION_HPP

#include <functional>
#include <vector>

#include "imoca/cfgp/model.hpp"

namespace imoca::fidelity {

// Cost of evaluating one objective at (x, z). Must be strictly positive.
using CostFn = std::function<double(const Eigen::VectorXd&, double)>;

struct FidelityReductionConfig {
  double bandwidth_z = 0.5;  // h for this objective
  CostFn cost;               // per-objective cost curve
  int input_dim = 1;         // d, fixes exponent_q = 1/(d+3)
  std::vector<double> candidate_grid;  // sorted, in [0,1], contains 1.0

  double exponent_q() const { return 1.0 / (input_dim + 3.0); }

  // default grid: 64 evenly spaced points plus the top fidelity
  static std::vector<double> default_grid() {
    std::vector<double> g;
    g.reserve(65);
    for (int i = 0; i < 64; ++i) g.push_back(i / 64.0);
    g.push_back(1.0);
    return g;
  }

  void validate() const;
};

// Information gap |z - 1|/h, clamped to [0, 1].
double info_gap(double z, double bandwidth_z);

// gamma(z) = xi(z) * (C(x,z)/C(x,1))^q; zero at z = 1.
double gamma_threshold(double z, const Eigen::VectorXd& x,
                       const FidelityReductionConfig& config);

// beta_t = sqrt(0.5 ln((2t+1)/h)), clamped to 0 when the log argument is <= 1.
double beta_t(int t, double bandwidth_z);

// Admissible fidelities at iteration t for one objective:
// {z != 1 on the grid : sigma_g(x,z) > gamma(z) and xi(z) > beta_t * sup xi}
// union {1.0}. sup xi is taken over the candidate grid.
std::vector<double> reduced_set(const Eigen::VectorXd& x, int t,
                                const cfgp::CfGpModel& model,
                                const FidelityReductionConfig& config);

// Same rule evaluated from a precomputed posterior profile over the grid
// (engine hot path); the grid in the profile cache must match config.
std::vector<double> reduced_set_from_stds(const Eigen::VectorXd& x, int t,
                                          const Eigen::VectorXd& stds,
                                          const FidelityReductionConfig& config);

}  // namespace imoca::fidelity

#endif
