#include "imoca/cfgp/model.hpp"

#include <cmath>
#include <fstream>

namespace imoca::cfgp {

void KernelParams::validate() const {
  if (!(amplitude > 0.0) || !(bandwidth_z > 0.0)) {
    throw std::invalid_argument("KernelParams: amplitude and bandwidth must be > 0");
  }
  if (lengthscales_x.size() == 0 || (lengthscales_x.array() <= 0.0).any()) {
    throw std::invalid_argument("KernelParams: lengthscales must be > 0");
  }
  if (noise_var < 0.0) {
    throw std::invalid_argument("KernelParams: noise_var must be >= 0");
  }
}

double kernel_value(const KernelParams& params, const Eigen::VectorXd& x1, double z1,
                    const Eigen::VectorXd& x2, double z2) {
  const Eigen::ArrayXd diff = (x1 - x2).array() / params.lengthscales_x.array();
  const double dz = (z1 - z2) / params.bandwidth_z;
  return params.amplitude * params.amplitude *
         std::exp(-0.5 * (diff.square().sum() + dz * dz));
}

double SampledFunction::operator()(const Eigen::VectorXd& x, double z) const {
  Eigen::VectorXd p(x.size() + 1);
  p.head(x.size()) = x;
  p[x.size()] = z;
  const Eigen::ArrayXd args = (frequencies_ * p + phases_).array();
  return feature_scale_ * (args.cos() * weights_.array()).sum();
}

CfGpModel CfGpModel::prior(KernelParams params) {
  params.validate();
  CfGpModel m;
  m.params_ = std::move(params);
  return m;
}

CfGpModel CfGpModel::fit(const std::vector<TrainingPoint>& points,
                         const Eigen::VectorXd& values, KernelParams params) {
  params.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  if (n < 1) throw std::invalid_argument("CfGpModel::fit: need at least one record");
  if (values.size() != n) {
    throw std::invalid_argument("CfGpModel::fit: points/values size mismatch");
  }
  const Eigen::Index d = params.lengthscales_x.size();
  for (const auto& p : points) {
    if (p.x.size() != d) {
      throw std::invalid_argument("CfGpModel::fit: input dimension mismatch");
    }
  }

  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = params.amplitude * params.amplitude;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_value(params, points[i].x, points[i].z,
                                    points[j].x, points[j].z);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }

  CfGpModel m;
  m.params_ = params;
  m.points_ = points;
  m.values_ = values;

  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += params.noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() == Eigen::Success) {
      m.chol_lower_ = llt.matrixL();
      m.alpha_ = llt.solve(values);
      m.jitter_ = jitter;
      return m;
    }
    if (jitter == 0.0) {
      jitter = 1e-10;
    } else if (jitter < 1e-4) {
      jitter = std::min(jitter * 10.0, 1e-4);
    } else {
      throw FitError("CfGpModel::fit: Gram matrix not PD after maximum jitter");
    }
  }
}

Eigen::VectorXd CfGpModel::x_kernel_col(const Eigen::VectorXd& x) const {
  const Eigen::Index n = static_cast<Eigen::Index>(points_.size());
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd diff =
        (points_[i].x - x).array() / params_.lengthscales_x.array();
    a[i] = params_.amplitude * params_.amplitude *
           std::exp(-0.5 * diff.square().sum());
  }
  return a;
}

Eigen::VectorXd CfGpModel::kernel_row(const Eigen::VectorXd& x, double z) const {
  Eigen::VectorXd k = x_kernel_col(x);
  const double h = params_.bandwidth_z;
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    const double dz = (points_[i].z - z) / h;
    k[i] *= std::exp(-0.5 * dz * dz);
  }
  return k;
}

std::pair<double, double> CfGpModel::posterior(const Eigen::VectorXd& x, double z) const {
  const double prior_var = params_.amplitude * params_.amplitude;
  if (points_.empty()) {
    return {0.0, params_.amplitude};
  }
  const Eigen::VectorXd k = kernel_row(x, z);
  const double mean = k.dot(alpha_);
  const Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(0.0, prior_var - v.squaredNorm());
  return {mean, std::sqrt(var)};
}

double CfGpModel::posterior_mean(const Eigen::VectorXd& x, double z) const {
  if (points_.empty()) return 0.0;
  return kernel_row(x, z).dot(alpha_);
}

double CfGpModel::cross_cov(const Eigen::VectorXd& x, double z_low, double z_high) const {
  const double prior = kernel_value(params_, x, z_low, x, z_high);
  if (points_.empty()) return prior;
  const Eigen::VectorXd k1 = kernel_row(x, z_low);
  const Eigen::VectorXd k2 = kernel_row(x, z_high);
  const Eigen::VectorXd v1 = chol_lower_.triangularView<Eigen::Lower>().solve(k1);
  const Eigen::VectorXd v2 = chol_lower_.triangularView<Eigen::Lower>().solve(k2);
  return prior - v1.dot(v2);
}

CfGpModel::ZGridCache CfGpModel::make_zgrid_cache(const std::vector<double>& grid) const {
  ZGridCache cache;
  cache.grid = grid;
  const Eigen::Index n = static_cast<Eigen::Index>(points_.size());
  const Eigen::Index m = static_cast<Eigen::Index>(grid.size());
  cache.z_kernel.resize(n, m);
  cache.z_kernel_top.resize(n);
  const double h = params_.bandwidth_z;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double dz = (points_[i].z - grid[j]) / h;
      cache.z_kernel(i, j) = std::exp(-0.5 * dz * dz);
    }
    const double dz_top = (points_[i].z - 1.0) / h;
    cache.z_kernel_top[i] = std::exp(-0.5 * dz_top * dz_top);
  }
  return cache;
}

CfGpModel::Profile CfGpModel::profile(const ZGridCache& cache,
                                      const Eigen::VectorXd& x) const {
  const Eigen::Index m = static_cast<Eigen::Index>(cache.grid.size());
  const double prior_var = params_.amplitude * params_.amplitude;
  Profile out;
  out.mean.resize(m);
  out.std.resize(m);
  out.cross_top.resize(m);

  if (points_.empty()) {
    out.mean.setZero();
    out.std.setConstant(params_.amplitude);
    out.mean_top = 0.0;
    out.std_top = params_.amplitude;
    const double h = params_.bandwidth_z;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double dz = (cache.grid[j] - 1.0) / h;
      out.cross_top[j] = prior_var * std::exp(-0.5 * dz * dz);
    }
    return out;
  }

  const Eigen::VectorXd a = x_kernel_col(x);
  // columns: grid fidelities, then z*=1
  Eigen::MatrixXd k(a.size(), m + 1);
  k.leftCols(m) = cache.z_kernel.array().colwise() * a.array();
  k.col(m) = cache.z_kernel_top.array() * a.array();

  const Eigen::MatrixXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k);
  const Eigen::VectorXd means = k.transpose() * alpha_;
  const Eigen::VectorXd vtop = v.col(m);
  out.mean_top = means[m];
  out.std_top = std::sqrt(std::max(0.0, prior_var - vtop.squaredNorm()));
  const double h = params_.bandwidth_z;
  for (Eigen::Index j = 0; j < m; ++j) {
    out.mean[j] = means[j];
    out.std[j] = std::sqrt(std::max(0.0, prior_var - v.col(j).squaredNorm()));
    const double dz = (cache.grid[j] - 1.0) / h;
    out.cross_top[j] = prior_var * std::exp(-0.5 * dz * dz) - v.col(j).dot(vtop);
  }
  return out;
}

SampledFunction CfGpModel::sample_posterior_function(int num_features,
                                                     std::uint64_t rng_seed) const {
  if (num_features < 1) {
    throw std::invalid_argument("sample_posterior_function: need num_features >= 1");
  }
  Rng rng(rng_seed);
  const Eigen::Index d = params_.lengthscales_x.size();
  const Eigen::Index M = num_features;

  // Spectral density of the product SE kernel: Gaussian with per-dimension
  // scale 1/lengthscale (fidelity dimension included).
  Eigen::MatrixXd freq(M, d + 1);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      freq(i, j) = rng.normal() / params_.lengthscales_x[j];
    }
    freq(i, d) = rng.normal() / params_.bandwidth_z;
  }
  Eigen::VectorXd phase(M);
  for (Eigen::Index i = 0; i < M; ++i) phase[i] = rng.uniform(0.0, 2.0 * M_PI);

  const double scale = params_.amplitude * std::sqrt(2.0 / static_cast<double>(M));

  Eigen::VectorXd weights(M);
  for (Eigen::Index i = 0; i < M; ++i) weights[i] = rng.normal();
  if (points_.empty()) {
    return SampledFunction(std::move(freq), std::move(phase), std::move(weights), scale);
  }

  // Condition the feature weights on the data: y = Phi w + eps, w ~ N(0, I).
  const Eigen::Index n = static_cast<Eigen::Index>(points_.size());
  Eigen::MatrixXd features(n, M);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p(d + 1);
    p.head(d) = points_[i].x;
    p[d] = points_[i].z;
    features.row(i) = (scale * ((freq * p + phase).array().cos())).transpose();
  }
  const double noise = std::max(params_.noise_var + jitter_, 1e-10);
  Eigen::MatrixXd A = features.transpose() * features;
  A.diagonal().array() += noise;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  const Eigen::VectorXd mean_w = llt.solve(features.transpose() * values_);
  // w | D ~ N(mean_w, noise * A^{-1}); sample via L^{-T} with the same factor
  const Eigen::VectorXd draw =
      llt.matrixU().solve(weights) * std::sqrt(noise);
  weights = mean_w + draw;
  return SampledFunction(std::move(freq), std::move(phase), std::move(weights), scale);
}

void CfGpModel::dump_state(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_state: cannot open " + path);
  out << "# cfgp-state v1\n";
  out << "amplitude=" << params_.amplitude << " bandwidth_z=" << params_.bandwidth_z
      << " noise_var=" << params_.noise_var << " jitter=" << jitter_ << "\n";
  out << "lengthscales_x=";
  for (Eigen::Index i = 0; i < params_.lengthscales_x.size(); ++i) {
    out << (i ? "," : "") << params_.lengthscales_x[i];
  }
  out << "\n";
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (Eigen::Index j = 0; j < points_[i].x.size(); ++j) out << points_[i].x[j] << ",";
    out << points_[i].z << "," << values_[static_cast<Eigen::Index>(i)] << "\n";
  }
}

}  // namespace imoca::cfgp
