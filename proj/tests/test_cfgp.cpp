#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "imoca/cfgp/hyperfit.hpp"
#include "imoca/cfgp/model.hpp"
#include "test_util.hpp"

using namespace imoca;
using cfgp::CfGpModel;
using cfgp::KernelParams;
using cfgp::TrainingPoint;
using testutil::DenseGpOracle;

namespace {

std::vector<TrainingPoint> random_points(Rng& rng, int n, int d) {
  std::vector<TrainingPoint> pts(n);
  for (auto& p : pts) {
    p.x = testutil::random_unit_vector(rng, d);
    p.z = rng.uniform();
  }
  return pts;
}

Eigen::VectorXd random_values(Rng& rng, int n) {
  return Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
}

}  // namespace

TEST_CASE("kernel is a product of squared exponentials with unit diagonal") {
  KernelParams params = KernelParams::defaults(3);
  params.amplitude = 1.7;
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = testutil::random_unit_vector(rng, 3);
    const double z = rng.uniform();
    CHECK(cfgp::kernel_value(params, x, z, x, z) ==
          doctest::Approx(params.amplitude * params.amplitude).epsilon(1e-14));
  }
  // symmetry of the Gram construction
  const auto pts = random_points(rng, 6, 3);
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      CHECK(cfgp::kernel_value(params, a.x, a.z, b.x, b.z) ==
            cfgp::kernel_value(params, b.x, b.z, a.x, a.z));
    }
  }
}

TEST_CASE("single-record fit reproduces the scalar formula") {
  KernelParams params = KernelParams::defaults(2);
  params.noise_var = 0.25;
  std::vector<TrainingPoint> pts = {{Eigen::Vector2d(0.3, 0.7), 0.5}};
  Eigen::VectorXd y(1);
  y << 2.0;
  const auto model = CfGpModel::fit(pts, y, params);
  // posterior mean at the training point: k y / (amp^2 + noise)
  const auto [mean, sd] = model.posterior(pts[0].x, pts[0].z);
  CHECK(mean == doctest::Approx(1.0 * 2.0 / 1.25).epsilon(1e-12));
  CHECK(sd == doctest::Approx(std::sqrt(1.0 - 1.0 / 1.25)).epsilon(1e-9));
}

TEST_CASE("one training point, unit kernel mean at a test point") {
  KernelParams params = KernelParams::defaults(1);
  params.noise_var = 0.1;
  std::vector<TrainingPoint> pts = {{Eigen::VectorXd::Constant(1, 0.2), 1.0}};
  Eigen::VectorXd y(1);
  y << -1.5;
  const auto model = CfGpModel::fit(pts, y, params);
  const Eigen::VectorXd xq = Eigen::VectorXd::Constant(1, 0.6);
  const double k = cfgp::kernel_value(params, xq, 1.0, pts[0].x, 1.0);
  CHECK(model.posterior(xq, 1.0).first ==
        doctest::Approx(k * (-1.5) / 1.1).epsilon(1e-12));
}

TEST_CASE("duplicate points with zero noise succeed via jitter escalation") {
  KernelParams params = KernelParams::defaults(2);
  params.noise_var = 0.0;
  std::vector<TrainingPoint> pts = {{Eigen::Vector2d(0.5, 0.5), 0.5},
                                    {Eigen::Vector2d(0.5, 0.5), 0.5}};
  Eigen::VectorXd y(2);
  y << 1.0, 1.0;
  const auto model = CfGpModel::fit(pts, y, params);
  CHECK(model.jitter_used() > 0.0);
  CHECK(std::isfinite(model.posterior(pts[0].x, 0.5).first));
}

TEST_CASE("near-noiseless posterior interpolates the data") {
  Rng rng(4);
  KernelParams params = KernelParams::defaults(2);
  params.noise_var = 1e-8;
  const auto pts = random_points(rng, 5, 2);
  const auto y = random_values(rng, 5);
  const auto model = CfGpModel::fit(pts, y, params);
  for (int i = 0; i < 5; ++i) {
    const auto [mean, sd] = model.posterior(pts[i].x, pts[i].z);
    CHECK(mean == doctest::Approx(y[i]).epsilon(1e-6));
    CHECK(sd <= 1e-3);
  }
}

TEST_CASE("prior queries return the process moments") {
  const auto model = CfGpModel::prior(KernelParams::defaults(2));
  const auto [mean, sd] = model.posterior(Eigen::Vector2d(0.1, 0.9), 0.3);
  CHECK(mean == 0.0);
  CHECK(sd == doctest::Approx(1.0));
  // prior cross covariance between fidelities is the kernel value
  const double h = model.params().bandwidth_z;
  const double expected = std::exp(-0.5 * (0.2 - 0.9) * (0.2 - 0.9) / (h * h));
  CHECK(model.cross_cov(Eigen::Vector2d(0.1, 0.9), 0.2, 0.9) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("posterior and cross covariance match the dense conditioning oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + static_cast<int>(rng.index(8));
    KernelParams params = KernelParams::defaults(2);
    params.amplitude = 0.5 + rng.uniform();
    params.bandwidth_z = 0.3 + rng.uniform();
    params.noise_var = 1e-4;
    const auto pts = random_points(rng, n, 2);
    const auto y = random_values(rng, n);
    const auto model = CfGpModel::fit(pts, y, params);
    DenseGpOracle oracle(pts, y, params);
    for (int q = 0; q < 8; ++q) {
      const Eigen::VectorXd x = testutil::random_unit_vector(rng, 2);
      const double z1 = rng.uniform(), z2 = rng.uniform();
      const auto [mean, sd] = model.posterior(x, z1);
      CHECK(std::fabs(mean - oracle.mean(x, z1)) < 1e-8);
      CHECK(std::fabs(sd * sd - oracle.cov(x, z1, x, z1)) < 1e-8);
      CHECK(std::fabs(model.cross_cov(x, z1, z2) - oracle.cov(x, z1, x, z2)) < 1e-8);
      // Cauchy-Schwarz bound and self-covariance consistency
      const double s2 = model.posterior(x, z2).second;
      CHECK(std::fabs(model.cross_cov(x, z1, z2)) <= sd * s2 + 1e-9);
      CHECK(model.cross_cov(x, z1, z1) == doctest::Approx(sd * sd).epsilon(1e-10));
    }
  }
}

TEST_CASE("three-point cross covariance equals explicit block conditioning") {
  Rng rng(15);
  KernelParams params = KernelParams::defaults(1);
  params.noise_var = 1e-3;
  const auto pts = random_points(rng, 3, 1);
  const auto y = random_values(rng, 3);
  const auto model = CfGpModel::fit(pts, y, params);
  DenseGpOracle oracle(pts, y, params);
  const Eigen::VectorXd x = testutil::random_unit_vector(rng, 1);
  CHECK(model.cross_cov(x, 0.25, 1.0) ==
        doctest::Approx(oracle.cov(x, 0.25, x, 1.0)).epsilon(1e-10));
}

TEST_CASE("posterior std never exceeds the prior std") {
  Rng rng(21);
  KernelParams params = KernelParams::defaults(3);
  params.amplitude = 1.3;
  const auto pts = random_points(rng, 8, 3);
  const auto y = random_values(rng, 8);
  const auto model = CfGpModel::fit(pts, y, params);
  for (int q = 0; q < 30; ++q) {
    const auto [mean, sd] = model.posterior(testutil::random_unit_vector(rng, 3),
                                             rng.uniform());
    CHECK(sd <= params.amplitude + 1e-9);
  }
}

TEST_CASE("batched profile agrees with the pointwise operations") {
  Rng rng(31);
  KernelParams params = KernelParams::defaults(2);
  params.bandwidth_z = 0.8;
  params.noise_var = 1e-5;
  const auto pts = random_points(rng, 9, 2);
  const auto y = random_values(rng, 9);
  const auto model = CfGpModel::fit(pts, y, params);
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto cache = model.make_zgrid_cache(grid);
  for (int q = 0; q < 5; ++q) {
    const Eigen::VectorXd x = testutil::random_unit_vector(rng, 2);
    const auto prof = model.profile(cache, x);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto [mean, sd] = model.posterior(x, grid[i]);
      CHECK(std::fabs(prof.mean[i] - mean) < 1e-12);
      CHECK(std::fabs(prof.std[i] - sd) < 1e-12);
      CHECK(std::fabs(prof.cross_top[i] - model.cross_cov(x, grid[i], 1.0)) < 1e-12);
    }
    const auto [mean_top, std_top] = model.posterior(x, 1.0);
    CHECK(std::fabs(prof.mean_top - mean_top) < 1e-12);
    CHECK(std::fabs(prof.std_top - std_top) < 1e-12);
  }
}

TEST_CASE("sampled functions are deterministic in the seed") {
  Rng rng(41);
  const auto pts = random_points(rng, 4, 2);
  const auto y = random_values(rng, 4);
  const auto model = CfGpModel::fit(pts, y, KernelParams::defaults(2));
  const auto f1 = model.sample_posterior_function(128, 99);
  const auto f2 = model.sample_posterior_function(128, 99);
  const auto f3 = model.sample_posterior_function(128, 100);
  const Eigen::VectorXd x = testutil::random_unit_vector(rng, 2);
  CHECK(f1(x, 0.5) == f2(x, 0.5));
  CHECK(f1(x, 0.5) != f3(x, 0.5));
}

TEST_CASE("prior feature draws reproduce the kernel covariance") {
  KernelParams params = KernelParams::defaults(2);
  const auto model = CfGpModel::prior(params);
  const Eigen::VectorXd a = Eigen::Vector2d(0.2, 0.4);
  const Eigen::VectorXd b = Eigen::Vector2d(0.5, 0.3);
  const double za = 0.9, zb = 0.4;
  const int draws = 200;
  double mean_a = 0.0, mean_b = 0.0, cross = 0.0, var_a = 0.0;
  std::vector<double> va(draws), vb(draws);
  for (int i = 0; i < draws; ++i) {
    const auto f = model.sample_posterior_function(4096, 1000 + i);
    va[i] = f(a, za);
    vb[i] = f(b, zb);
    mean_a += va[i];
    mean_b += vb[i];
  }
  mean_a /= draws;
  mean_b /= draws;
  for (int i = 0; i < draws; ++i) {
    cross += (va[i] - mean_a) * (vb[i] - mean_b);
    var_a += (va[i] - mean_a) * (va[i] - mean_a);
  }
  cross /= draws - 1;
  var_a /= draws - 1;
  const double k = cfgp::kernel_value(params, a, za, b, zb);
  CHECK(std::fabs(cross - k) < 0.05);
  CHECK(std::fabs(var_a - 1.0) < 0.05 * 3);
}

TEST_CASE("posterior draws concentrate on near-noiseless observations") {
  Rng rng(55);
  KernelParams params = KernelParams::defaults(2);
  params.noise_var = 1e-6;
  const auto pts = random_points(rng, 6, 2);
  const auto y = random_values(rng, 6);
  const auto model = CfGpModel::fit(pts, y, params);
  double mean = 0.0;
  const int draws = 500;
  for (int i = 0; i < draws; ++i) {
    const auto f = model.sample_posterior_function(1024, 2000 + i);
    mean += f(pts[0].x, pts[0].z);
  }
  mean /= draws;
  CHECK(std::fabs(mean - y[0]) < 0.05);
}

TEST_CASE("hyperparameter fit recovers a known lengthscale") {
  // draw data from a GP with x-lengthscale 0.2 via an exact dense factor
  Rng rng(77);
  KernelParams truth = KernelParams::defaults(1);
  truth.lengthscales_x[0] = 0.2;
  truth.bandwidth_z = 1.0;
  truth.noise_var = 1e-6;
  const int n = 40;
  auto pts = random_points(rng, n, 1);
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram(i, j) = cfgp::kernel_value(truth, pts[i].x, pts[i].z, pts[j].x, pts[j].z);
    }
  }
  gram.diagonal().array() += 1e-8;
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(gram).matrixL();
  Eigen::VectorXd noise(n);
  for (int i = 0; i < n; ++i) noise[i] = rng.normal();
  const Eigen::VectorXd y = chol * noise;

  const auto result = cfgp::fit_hyperparams(pts, y);
  CHECK(result.params.lengthscales_x[0] >= 0.1);
  CHECK(result.params.lengthscales_x[0] <= 0.4);
  CHECK(result.log_likelihood >=
        cfgp::log_marginal_likelihood(pts, y, KernelParams::defaults(1)));
}

TEST_CASE("hyperparameter fit handles degenerate data") {
  cfgp::HyperfitConfig config;
  std::vector<TrainingPoint> pts = {{Eigen::VectorXd::Constant(1, 0.1), 0.5},
                                    {Eigen::VectorXd::Constant(1, 0.9), 0.5}};

  SUBCASE("constant values push amplitude and noise to the floor") {
    std::vector<TrainingPoint> many = pts;
    for (int i = 0; i < 6; ++i) {
      many.push_back({Eigen::VectorXd::Constant(1, 0.1 * i), 0.3});
    }
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<int>(many.size()));
    const auto result = cfgp::fit_hyperparams(many, y, config);
    CHECK(result.params.amplitude <= 4.0 * config.amplitude_min);
    CHECK(result.params.noise_var <= 10.0 * config.noise_min);
  }

  SUBCASE("two identical values stay finite") {
    Eigen::VectorXd y(2);
    y << 1.0, 1.0;
    const auto result = cfgp::fit_hyperparams(pts, y, config);
    CHECK(std::isfinite(result.params.amplitude));
    CHECK(std::isfinite(result.params.noise_var));
    CHECK(std::isfinite(result.log_likelihood));
  }

  CHECK_THROWS_AS(cfgp::fit_hyperparams({pts[0]}, Eigen::VectorXd::Ones(1), config),
                  std::invalid_argument);
}

TEST_CASE("fit validates inputs") {
  KernelParams params = KernelParams::defaults(2);
  CHECK_THROWS_AS(CfGpModel::fit({}, Eigen::VectorXd(), params), std::invalid_argument);
  std::vector<TrainingPoint> wrong_dim = {{Eigen::Vector3d(0.1, 0.2, 0.3), 0.5}};
  CHECK_THROWS_AS(CfGpModel::fit(wrong_dim, Eigen::VectorXd::Ones(1), params),
                  std::invalid_argument);
  params.amplitude = -1.0;
  CHECK_THROWS_AS(CfGpModel::prior(params), std::invalid_argument);
}

TEST_CASE("state dump writes a readable file") {
  Rng rng(61);
  const auto pts = random_points(rng, 3, 2);
  const auto model =
      CfGpModel::fit(pts, random_values(rng, 3), KernelParams::defaults(2));
  const std::string path = "cfgp_dump_test.txt";
  model.dump_state(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "# cfgp-state v1");
  in.close();
  std::remove(path.c_str());
}
