#ifndef IMOCA_TESTS_TEST_UTIL_HPP
#define IMOCA_TESTS_TEST_UTIL_HPP

#include <Eigen/Dense>
#include <vector>

#include "imoca/cfgp/model.hpp"
#include "imoca/normal.hpp"
#include "imoca/rng.hpp"

namespace imoca::testutil {

// Dense joint-Gaussian conditioning oracle using explicit inversion; kept
// independent of the library's Cholesky path.
struct DenseGpOracle {
  const std::vector<cfgp::TrainingPoint>& points;
  const Eigen::VectorXd& values;
  const cfgp::KernelParams& params;
  Eigen::MatrixXd inv;

  DenseGpOracle(const std::vector<cfgp::TrainingPoint>& pts,
                const Eigen::VectorXd& vals, const cfgp::KernelParams& p)
      : points(pts), values(vals), params(p) {
    const int n = static_cast<int>(points.size());
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        gram(i, j) = cfgp::kernel_value(params, points[i].x, points[i].z,
                                        points[j].x, points[j].z);
      }
    }
    gram.diagonal().array() += params.noise_var;
    inv = gram.inverse();
  }

  Eigen::VectorXd kvec(const Eigen::VectorXd& x, double z) const {
    Eigen::VectorXd k(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      k[static_cast<Eigen::Index>(i)] =
          cfgp::kernel_value(params, points[i].x, points[i].z, x, z);
    }
    return k;
  }

  double mean(const Eigen::VectorXd& x, double z) const {
    return kvec(x, z).dot(inv * values);
  }

  double cov(const Eigen::VectorXd& x1, double z1, const Eigen::VectorXd& x2,
             double z2) const {
    const Eigen::VectorXd k1 = kvec(x1, z1);
    const Eigen::VectorXd k2 = kvec(x2, z2);
    return cfgp::kernel_value(params, x1, z1, x2, z2) - k1.dot(inv * k2);
  }
};

inline Eigen::VectorXd random_unit_vector(Rng& rng, int dim) {
  return Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return rng.uniform(); });
}

// exact draw from an upper-truncated standard normal via the inverse CDF
inline double truncated_normal_sample(Rng& rng, double upper) {
  return norm_quantile(rng.uniform() * norm_cdf(upper));
}

}  // namespace imoca::testutil

#endif
