#ifndef IMOCA_CFGP_MODEL_HPP
#define IMOCA_CFGP_MODEL_HPP

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "imoca/rng.hpp"

namespace imoca::cfgp {

// Product squared-exponential kernel over input x in [0,1]^d and fidelity
// z in [0,1].
struct KernelParams {
  double amplitude = 1.0;
  Eigen::VectorXd lengthscales_x;  // one per input dimension
  double bandwidth_z = 0.5;
  double noise_var = 1e-6;

  static KernelParams defaults(int dim) {
    KernelParams p;
    p.lengthscales_x = Eigen::VectorXd::Constant(dim, 0.2);
    return p;
  }

  void validate() const;
};

// k([x,z],[x',z']) = amplitude^2 * exp(-sum((x-x')^2/(2 lx^2))) * exp(-(z-z')^2/(2 h^2))
double kernel_value(const KernelParams& params, const Eigen::VectorXd& x1, double z1,
                    const Eigen::VectorXd& x2, double z2);

struct TrainingPoint {
  Eigen::VectorXd x;
  double z = 1.0;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Approximate posterior draw built from random Fourier features; evaluation is
// a deterministic function of (x, z).
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(Eigen::MatrixXd frequencies, Eigen::VectorXd phases,
                  Eigen::VectorXd weights, double feature_scale)
      : frequencies_(std::move(frequencies)),
        phases_(std::move(phases)),
        weights_(std::move(weights)),
        feature_scale_(feature_scale) {}

  double operator()(const Eigen::VectorXd& x, double z) const;
  int num_features() const { return static_cast<int>(weights_.size()); }

 private:
  Eigen::MatrixXd frequencies_;  // M x (d+1), fidelity is the last column
  Eigen::VectorXd phases_;       // M
  Eigen::VectorXd weights_;      // M
  double feature_scale_ = 0.0;
};

// Continuous-fidelity GP posterior for one objective. Immutable after
// construction; safe to share across threads.
class CfGpModel {
 public:
  // Prior model (no observations).
  static CfGpModel prior(KernelParams params);

  // Exact GP conditioning on the given records. The Gram matrix gets jitter
  // escalation (1e-10, x10 per retry, up to 1e-4) if the factorization fails.
  static CfGpModel fit(const std::vector<TrainingPoint>& points,
                       const Eigen::VectorXd& values, KernelParams params);

  // Posterior mean and standard deviation at (x, z).
  std::pair<double, double> posterior(const Eigen::VectorXd& x, double z) const;

  // Mean only; skips the variance solve.
  double posterior_mean(const Eigen::VectorXd& x, double z) const;

  // Posterior covariance between g(x, z_low) and g(x, z_high).
  double cross_cov(const Eigen::VectorXd& x, double z_low, double z_high) const;

  // Draw a deterministic approximate posterior function; restricting to z=1
  // gives a sample of the highest-fidelity objective.
  SampledFunction sample_posterior_function(int num_features, std::uint64_t rng_seed) const;

  const KernelParams& params() const { return params_; }
  int num_points() const { return static_cast<int>(points_.size()); }
  int input_dim() const { return static_cast<int>(params_.lengthscales_x.size()); }
  double jitter_used() const { return jitter_; }

  // Debug dump of training points and parameters (not load-bearing).
  void dump_state(const std::string& path) const;

  // --- batched evaluation used by the engine hot path ---

  // Per-model per-iteration cache: fidelity-kernel columns for a fixed z grid.
  struct ZGridCache {
    std::vector<double> grid;      // queried fidelities
    Eigen::MatrixXd z_kernel;      // n x m, k_Z(z_i, grid_j)
    Eigen::VectorXd z_kernel_top;  // n, k_Z(z_i, 1.0)
  };

  ZGridCache make_zgrid_cache(const std::vector<double>& grid) const;

  // Posterior over the whole grid at one x, plus the z*=1 marginal and the
  // cross covariance of every grid fidelity with z*=1. Matches posterior()/
  // cross_cov() to floating-point roundoff (verified by tests).
  struct Profile {
    Eigen::VectorXd mean;       // per grid point
    Eigen::VectorXd std;        // per grid point
    Eigen::VectorXd cross_top;  // cov(g(x,z_j), g(x,1))
    double mean_top = 0.0;      // at z*=1
    double std_top = 0.0;
  };

  Profile profile(const ZGridCache& cache, const Eigen::VectorXd& x) const;

 private:
  CfGpModel() = default;

  Eigen::VectorXd kernel_row(const Eigen::VectorXd& x, double z) const;
  Eigen::VectorXd x_kernel_col(const Eigen::VectorXd& x) const;

  KernelParams params_;
  std::vector<TrainingPoint> points_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd chol_lower_;  // L with L L^T = K + (noise+jitter) I
  Eigen::VectorXd alpha_;       // (K + noise I)^{-1} y
  double jitter_ = 0.0;
};

}  // namespace imoca::cfgp

#endif
