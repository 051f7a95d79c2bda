#include <cmath>
#include <iostream>

#include "imoca/acquisition/entropy.hpp"
#include "imoca/cli/experiment.hpp"
#include "imoca/metrics/metrics.hpp"
#include "imoca/normal.hpp"
#include "imoca/rng.hpp"

namespace imoca::cli {

namespace {

bool report(const std::string& name, bool pass, double err = 0.0) {
  std::cout << (pass ? "PASS " : "FAIL ") << name;
  if (!pass) std::cout << " (error " << err << ")";
  std::cout << "\n";
  return pass;
}

// Dense joint-Gaussian conditioning with explicit inversion; independent of
// the Cholesky path inside CfGpModel.
bool check_gp_conditioning() {
  Rng rng(11);
  const int n = 8, d = 2;
  cfgp::KernelParams params = cfgp::KernelParams::defaults(d);
  params.noise_var = 1e-4;
  std::vector<cfgp::TrainingPoint> pts(n);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    pts[i].x = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return rng.uniform(); });
    pts[i].z = rng.uniform();
    y[i] = rng.normal();
  }
  const auto model = cfgp::CfGpModel::fit(pts, y, params);

  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram(i, j) = cfgp::kernel_value(params, pts[i].x, pts[i].z, pts[j].x, pts[j].z);
    }
  }
  gram.diagonal().array() += params.noise_var;
  const Eigen::MatrixXd inv = gram.inverse();

  double max_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x =
        Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return rng.uniform(); });
    const double z = rng.uniform();
    Eigen::VectorXd kvec(n);
    for (int i = 0; i < n; ++i) {
      kvec[i] = cfgp::kernel_value(params, pts[i].x, pts[i].z, x, z);
    }
    const double mean = kvec.dot(inv * y);
    const double var =
        params.amplitude * params.amplitude - kvec.dot(inv * kvec);
    const auto [m, s] = model.posterior(x, z);
    max_err = std::max(max_err, std::fabs(m - mean));
    max_err = std::max(max_err, std::fabs(s - std::sqrt(std::max(0.0, var))));
  }
  return report("gp-conditioning-vs-dense-oracle", max_err < 1e-8, max_err);
}

bool check_truncated_entropy_mc() {
  Rng rng(12);
  double max_err = 0.0;
  for (double gamma : {-1.0, 0.0, 1.0}) {
    const double cdf = norm_cdf(gamma);
    double sum_sq = 0.0;
    const int samples = 1000000;
    for (int i = 0; i < samples; ++i) {
      const double u = norm_quantile(rng.uniform() * cdf);
      sum_sq += u * u;
    }
    // entropy gap of the upper-truncated standard normal
    const double mc_gap = 0.5 - 0.5 * (sum_sq / samples) - std::log(cdf);
    max_err = std::max(max_err,
                       std::fabs(acq::truncated_entropy_term(gamma) - mc_gap));
  }
  return report("truncated-entropy-vs-mc", max_err < 5e-3, max_err);
}

bool check_esg_quadrature() {
  double max_err = 0.0;
  for (double tau : {0.3, 0.7}) {
    for (double gamma : {-1.0, 0.5}) {
      // dense composite-trapezoid oracle over an 8-sigma window
      const auto m = acq::esg_moments(tau, gamma);
      const double denom = std::sqrt(1.0 - tau * tau);
      const double lo = m.mean - 8.0 * std::sqrt(m.variance);
      const double hi = m.mean + 8.0 * std::sqrt(m.variance);
      const int nodes = 20001;
      const double step = (hi - lo) / (nodes - 1);
      double integral = 0.0;
      for (int i = 0; i < nodes; ++i) {
        const double u = lo + step * i;
        const double w = (gamma - tau * u) / denom;
        const double log_skew = norm_logcdf(w);
        const double pdf = std::exp(-0.5 * u * u - kLogSqrt2Pi + log_skew -
                                    norm_logcdf(gamma));
        const double weight = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        integral += weight * pdf * log_skew;
      }
      integral *= step;
      const double oracle = tau * tau * 0.5 * gamma * norm_hazard(gamma) -
                            norm_logcdf(gamma) + integral;
      max_err = std::max(max_err,
                         std::fabs(acq::esg_entropy_term(tau, gamma) - oracle));
    }
  }
  return report("esg-entropy-vs-quadrature", max_err < 1e-4, max_err);
}

bool check_hypervolume() {
  using pareto::ObjectiveVector;
  metrics::HypervolumeConfig cfg;
  cfg.reference_point = Eigen::Vector2d(0.0, 0.0);
  pareto::ParetoFrontSample unit;
  unit.points = {Eigen::Vector2d(1.0, 1.0)};
  unit.per_objective_max = Eigen::Vector2d(1.0, 1.0);
  double err = std::fabs(metrics::hypervolume(unit, cfg) - 1.0);

  pareto::ParetoFrontSample two;
  two.points = {Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d(1.0, 2.0)};
  two.per_objective_max = Eigen::Vector2d(2.0, 2.0);
  err = std::max(err, std::fabs(metrics::hypervolume(two, cfg) - 3.0));
  if (err > 0.0) return report("hypervolume-exact", false, err);

  // Monte-Carlo volume oracle on a random 3-objective front
  Rng rng(13);
  std::vector<ObjectiveVector> pts;
  for (int i = 0; i < 6; ++i) {
    pts.push_back(Eigen::Vector3d(rng.uniform(), rng.uniform(), rng.uniform()));
  }
  const auto front = pareto::nondominated_filter(pts);
  metrics::HypervolumeConfig cfg3;
  cfg3.reference_point = Eigen::Vector3d(-0.01, -0.01, -0.01);
  const double exact = metrics::hypervolume(front, cfg3);
  Eigen::Vector3d hi = front.per_objective_max;
  double box = 1.0;
  for (int i = 0; i < 3; ++i) box *= hi[i] + 0.01;
  const int samples = 2000000;
  long hits = 0;
  for (int i = 0; i < samples; ++i) {
    Eigen::Vector3d p;
    for (int j = 0; j < 3; ++j) p[j] = -0.01 + (hi[j] + 0.01) * rng.uniform();
    for (const auto& q : front.points) {
      if ((p.array() <= q.array()).all()) {
        ++hits;
        break;
      }
    }
  }
  const double mc = box * hits / samples;
  const double rel = std::fabs(exact - mc) / mc;
  return report("hypervolume-vs-mc", rel < 0.02, rel);
}

bool check_esg_moments_rejection() {
  Rng rng(14);
  const double tau = 0.5, gamma = 1.0;
  const double denom = std::sqrt(1.0 - tau * tau);
  double sum = 0.0, sum_sq = 0.0;
  long accepted = 0;
  while (accepted < 200000) {
    const double u = rng.normal();
    if (rng.uniform() < norm_cdf((gamma - tau * u) / denom)) {
      sum += u;
      sum_sq += u * u;
      ++accepted;
    }
  }
  const double mean = sum / accepted;
  const double var = sum_sq / accepted - mean * mean;
  const auto m = acq::esg_moments(tau, gamma);
  const double err =
      std::max(std::fabs(m.mean - mean), std::fabs(m.variance - var));
  return report("esg-moments-vs-rejection-sampling", err < 1e-2, err);
}

}  // namespace

int cmd_selftest() {
  bool ok = true;
  ok &= check_gp_conditioning();
  ok &= check_truncated_entropy_mc();
  ok &= check_esg_quadrature();
  ok &= check_esg_moments_rejection();
  ok &= check_hypervolume();
  std::cout << (ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
  return ok ? kExitOk : kExitRunFailure;
}

}  // namespace imoca::cli
