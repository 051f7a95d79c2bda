#include "imoca/cfgp/hyperfit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace imoca::cfgp {

double log_marginal_likelihood(const std::vector<TrainingPoint>& points,
                               const Eigen::VectorXd& values,
                               const KernelParams& params) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = params.amplitude * params.amplitude + params.noise_var;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v =
          kernel_value(params, points[i].x, points[i].z, points[j].x, points[j].z);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd alpha = llt.solve(values);
      const double logdet =
          2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
      return -0.5 * values.dot(alpha) - 0.5 * logdet -
             0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
    }
    jitter = (jitter == 0.0) ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-4) return -std::numeric_limits<double>::infinity();
  }
}

namespace {

// parameter vector layout: [log amp, log lx_0..lx_{d-1}, log h, log noise]
KernelParams decode(const Eigen::VectorXd& theta, int d, const HyperfitConfig& c) {
  auto clamp = [](double v, double lo, double hi) {
    return std::min(hi, std::max(lo, v));
  };
  KernelParams p;
  p.amplitude = clamp(std::exp(theta[0]), c.amplitude_min, c.amplitude_max);
  p.lengthscales_x.resize(d);
  for (int i = 0; i < d; ++i) {
    p.lengthscales_x[i] =
        clamp(std::exp(theta[1 + i]), c.lengthscale_min, c.lengthscale_max);
  }
  p.bandwidth_z = clamp(std::exp(theta[1 + d]), c.bandwidth_min, c.bandwidth_max);
  p.noise_var = clamp(std::exp(theta[2 + d]), c.noise_min, c.noise_max);
  return p;
}

Eigen::VectorXd encode(const KernelParams& p) {
  const int d = static_cast<int>(p.lengthscales_x.size());
  Eigen::VectorXd theta(d + 3);
  theta[0] = std::log(p.amplitude);
  for (int i = 0; i < d; ++i) theta[1 + i] = std::log(p.lengthscales_x[i]);
  theta[1 + d] = std::log(p.bandwidth_z);
  theta[2 + d] = std::log(p.noise_var);
  return theta;
}

// Minimal Nelder-Mead; returns the best vertex found within the budget.
Eigen::VectorXd nelder_mead(std::function<double(const Eigen::VectorXd&)> f,
                            Eigen::VectorXd start, int max_evals) {
  const int n = static_cast<int>(start.size());
  std::vector<std::pair<double, Eigen::VectorXd>> simplex;
  simplex.reserve(n + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  simplex.push_back({eval(start), start});
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = start;
    v[i] += 0.35;
    simplex.push_back({eval(v), v});
  }
  auto sort_simplex = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  };
  sort_simplex();
  while (evals < max_evals) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i].second;
    centroid /= n;
    const Eigen::VectorXd& worst = simplex[n].second;
    const Eigen::VectorXd refl = centroid + (centroid - worst);
    const double fr = eval(refl);
    if (fr < simplex[0].first) {
      const Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - worst);
      const double fe = eval(exp_pt);
      simplex[n] = fe < fr ? std::make_pair(fe, exp_pt) : std::make_pair(fr, refl);
    } else if (fr < simplex[n - 1].first) {
      simplex[n] = {fr, refl};
    } else {
      const Eigen::VectorXd contr = centroid + 0.5 * (worst - centroid);
      const double fc = eval(contr);
      if (fc < simplex[n].first) {
        simplex[n] = {fc, contr};
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i].second = simplex[0].second + 0.5 * (simplex[i].second - simplex[0].second);
          simplex[i].first = eval(simplex[i].second);
          if (evals >= max_evals) break;
        }
      }
    }
    sort_simplex();
    if (simplex[n].first - simplex[0].first < 1e-9) break;
  }
  return simplex[0].second;
}

}  // namespace

HyperfitResult fit_hyperparams(const std::vector<TrainingPoint>& points,
                               const Eigen::VectorXd& values,
                               const HyperfitConfig& config) {
  if (points.size() < 2) {
    throw std::invalid_argument("fit_hyperparams: need at least 2 records");
  }
  const int d = static_cast<int>(points.front().x.size());
  const KernelParams defaults = KernelParams::defaults(d);
  const double default_ll = log_marginal_likelihood(points, values, defaults);

  auto objective = [&](const Eigen::VectorXd& theta) {
    const KernelParams p = decode(theta, d, config);
    const double ll = log_marginal_likelihood(points, values, p);
    return std::isfinite(ll) ? -ll : 1e300;
  };

  Rng rng(config.seed);
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(encode(defaults));
  for (int s = 0; s < config.num_starts; ++s) {
    Eigen::VectorXd theta(d + 3);
    theta[0] = rng.uniform(std::log(config.amplitude_min), std::log(config.amplitude_max));
    for (int i = 0; i < d; ++i) {
      theta[1 + i] =
          rng.uniform(std::log(config.lengthscale_min), std::log(config.lengthscale_max));
    }
    theta[1 + d] = rng.uniform(std::log(config.bandwidth_min), std::log(config.bandwidth_max));
    theta[2 + d] = rng.uniform(std::log(config.noise_min), std::log(config.noise_max));
    starts.push_back(theta);
  }

  HyperfitResult best;
  best.params = defaults;
  best.log_likelihood = default_ll;
  best.fell_back_to_defaults = true;
  for (const auto& start : starts) {
    const Eigen::VectorXd theta = nelder_mead(objective, start, config.max_evals);
    const KernelParams p = decode(theta, d, config);
    const double ll = log_marginal_likelihood(points, values, p);
    if (std::isfinite(ll) && ll > best.log_likelihood) {
      best.params = p;
      best.log_likelihood = ll;
      best.fell_back_to_defaults = false;
    }
  }
  return best;
}

}  // namespace imoca::cfgp
