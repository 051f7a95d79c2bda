#include "imoca/acquisition/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include "imoca/normal.hpp"

namespace imoca::acq {

double truncated_entropy_term(double gamma_g) {
  if (!std::isfinite(gamma_g)) {
    throw std::invalid_argument("truncated_entropy_term: gamma must be finite");
  }
  const double log_cdf = norm_logcdf(gamma_g);
  return 0.5 * gamma_g * norm_hazard(gamma_g) - log_cdf;
}

EsgMoments esg_moments(double tau, double gamma_f) {
  if (std::fabs(tau) > 1.0) {
    throw std::invalid_argument("esg_moments: |tau| must be <= 1");
  }
  const double h = norm_hazard(gamma_f);
  EsgMoments m;
  m.tau = tau;
  m.gamma_f = gamma_f;
  m.mean = tau * h;
  m.variance = 1.0 - tau * tau * h * (gamma_f + h);
  return m;
}

double esg_entropy_term(double tau, double gamma_f, const QuadConfig& quad) {
  if (std::fabs(tau) >= 1.0 - kTauEpsilon) {
    return truncated_entropy_term(gamma_f);
  }
  if (quad.nodes < 3 || quad.nodes % 2 == 0) {
    throw std::invalid_argument("esg_entropy_term: Simpson needs an odd node count >= 3");
  }

  const EsgMoments m = esg_moments(tau, gamma_f);
  const double denom = std::sqrt(1.0 - tau * tau);
  const double log_cdf_gamma = norm_logcdf(gamma_f);
  const double half_width = quad.half_width_sigmas * std::sqrt(std::max(m.variance, 0.0));
  const double lo = m.mean - half_width;
  const double step = 2.0 * half_width / (quad.nodes - 1);

  // E_{u~ESG}[ln Phi((gamma - tau u)/denom)] with the ESG density expressed in
  // log space; the skew factor ln Phi(w) is shared with the integrand.
  double integral = 0.0;
  for (int i = 0; i < quad.nodes; ++i) {
    const double u = lo + step * i;
    const double w = (gamma_f - tau * u) / denom;
    const double log_skew = norm_logcdf(w);
    const double log_pdf = -0.5 * u * u - kLogSqrt2Pi + log_skew - log_cdf_gamma;
    const double value = std::exp(log_pdf) * log_skew;
    const double weight = (i == 0 || i == quad.nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    integral += weight * value;
  }
  integral *= step / 3.0;

  return tau * tau * 0.5 * gamma_f * norm_hazard(gamma_f) - log_cdf_gamma + integral;
}

}  // namespace imoca::acq
