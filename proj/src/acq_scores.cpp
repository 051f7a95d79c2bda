#include "imoca/acquisition/scores.hpp"

#include <cmath>
#include <stdexcept>

namespace imoca::acq {

void AcquisitionContext::validate() const {
  if (models == nullptr || front_samples == nullptr || models->empty() ||
      front_samples->empty() || !cost_evaluator) {
    throw std::invalid_argument("AcquisitionContext: incomplete context");
  }
  const int k = num_objectives();
  for (const auto& f : *front_samples) {
    if (f.num_objectives() != k) {
      throw std::invalid_argument(
          "AcquisitionContext: front sample objective count mismatch");
    }
  }
}

double truncated_entropy_sum(const std::vector<pareto::ParetoFrontSample>& fronts,
                             int j, double mean, double std) {
  double total = 0.0;
  for (const auto& front : fronts) {
    total += truncated_entropy_term((front.per_objective_max[j] - mean) / std);
  }
  return total;
}

double esg_entropy_sum(const std::vector<pareto::ParetoFrontSample>& fronts, int j,
                       double tau, double mean_f, double std_f,
                       const QuadConfig& quad) {
  double total = 0.0;
  for (const auto& front : fronts) {
    total += esg_entropy_term(tau, (front.per_objective_max[j] - mean_f) / std_f, quad);
  }
  return total;
}

double clamp_tau(double tau) {
  return std::min(1.0 - kTauEpsilon, std::max(-1.0 + kTauEpsilon, tau));
}

namespace {

double floored_std(const AcquisitionContext& ctx, double std) {
  if (std > ctx.std_floor) return std;
  ++ctx.std_floor_hits;
  return ctx.std_floor;
}

}  // namespace

double imoca_t_score(const AcquisitionContext& ctx, const Eigen::VectorXd& x,
                     const std::vector<double>& z_vector) {
  ctx.validate();
  const int k = ctx.num_objectives();
  if (static_cast<int>(z_vector.size()) != k) {
    throw std::invalid_argument("imoca_t_score: fidelity vector length mismatch");
  }
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const auto [mean, sd] = (*ctx.models)[j].posterior(x, z_vector[j]);
    total += truncated_entropy_sum(*ctx.front_samples, j, mean, floored_std(ctx, sd));
  }
  const double cost = ctx.cost_evaluator(x, z_vector);
  return total / (cost * ctx.num_samples());
}

double imoca_e_score(const AcquisitionContext& ctx, const Eigen::VectorXd& x,
                     const std::vector<double>& z_vector) {
  ctx.validate();
  const int k = ctx.num_objectives();
  if (static_cast<int>(z_vector.size()) != k) {
    throw std::invalid_argument("imoca_e_score: fidelity vector length mismatch");
  }
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const auto& model = (*ctx.models)[j];
    const auto [mean_g, raw_std_g] = model.posterior(x, z_vector[j]);
    const auto [mean_f, raw_std_f] = model.posterior(x, 1.0);
    const double std_g = floored_std(ctx, raw_std_g);
    const double std_f = floored_std(ctx, raw_std_f);
    const double cov = model.cross_cov(x, z_vector[j], 1.0);
    const double tau = clamp_tau(cov / (std_g * std_f));
    total += esg_entropy_sum(*ctx.front_samples, j, tau, mean_f, std_f, ctx.quad);
  }
  const double cost = ctx.cost_evaluator(x, z_vector);
  return total / (cost * ctx.num_samples());
}

double mesmo_score(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  ctx.validate();
  double total = 0.0;
  for (int j = 0; j < ctx.num_objectives(); ++j) {
    const auto [mean_f, std_f] = (*ctx.models)[j].posterior(x, 1.0);
    total += truncated_entropy_sum(*ctx.front_samples, j, mean_f, floored_std(ctx, std_f));
  }
  return total / ctx.num_samples();
}

}  // namespace imoca::acq
