#ifndef IMOCA_ACQUISITION_SCORES_HPP
#define IMOCA_ACQUISITION_SCORES_HPP

#include <functional>
#include <vector>

#include "imoca/acquisition/entropy.hpp"
#include "imoca/cfgp/model.hpp"
#include "imoca/pareto/pareto.hpp"

namespace imoca::acq {

// Normalized evaluation cost C(x, z-vector) = sum_j C_j(x,z_j)/C_j(x,1);
// equals K when every fidelity is at its top value.
using CostEvaluator =
    std::function<double(const Eigen::VectorXd&, const std::vector<double>&)>;

struct AcquisitionContext {
  const std::vector<cfgp::CfGpModel>* models = nullptr;
  const std::vector<pareto::ParetoFrontSample>* front_samples = nullptr;
  CostEvaluator cost_evaluator;
  QuadConfig quad;
  double std_floor = 1e-9;
  // incremented whenever a posterior std had to be floored
  mutable long std_floor_hits = 0;

  int num_objectives() const { return static_cast<int>(models->size()); }
  int num_samples() const { return static_cast<int>(front_samples->size()); }
  void validate() const;
};

// Sum over front samples of the truncated entropy summand for objective j at
// the given posterior moments.
double truncated_entropy_sum(const std::vector<pareto::ParetoFrontSample>& fronts,
                             int j, double mean, double std);

// Sum over front samples of the extended-skew summand for objective j.
double esg_entropy_sum(const std::vector<pareto::ParetoFrontSample>& fronts, int j,
                       double tau, double mean_f, double std_f,
                       const QuadConfig& quad);

// clamp to [-1+eps, 1-eps]; the boundary values route esg_entropy_term into
// its truncated limit.
double clamp_tau(double tau);

// iMOCA-T: (1/(C S)) sum_j sum_s truncated summand at (x, z_j).
double imoca_t_score(const AcquisitionContext& ctx, const Eigen::VectorXd& x,
                     const std::vector<double>& z_vector);

// iMOCA-E: (1/(C S)) sum_j sum_s extended-skew summand with the predictive
// correlation tau_j between g_j(x, z_j) and f_j(x).
double imoca_e_score(const AcquisitionContext& ctx, const Eigen::VectorXd& x,
                     const std::vector<double>& z_vector);

// MESMO: (1/S) sum_j sum_s truncated summand at the top fidelity; no cost
// normalization.
double mesmo_score(const AcquisitionContext& ctx, const Eigen::VectorXd& x);

}  // namespace imoca::acq

#endif
