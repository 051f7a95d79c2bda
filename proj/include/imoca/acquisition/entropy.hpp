#ifndef IMOCA_ACQUISITION_ENTROPY_HPP
#define IMOCA_ACQUISITION_ENTROPY_HPP

namespace imoca::acq {

// Boundary where the extended-skew form switches to its tau -> 1 limit.
inline constexpr double kTauEpsilon = 1e-6;

struct QuadConfig {
  int nodes = 201;               // Simpson node count, odd
  double half_width_sigmas = 5.0;  // integration window around the ESG mean
};

// Entropy decrease from conditioning a standard Gaussian on u <= gamma:
// gamma*phi(gamma)/(2 Phi(gamma)) - ln Phi(gamma). Nonnegative; -> 0 as
// gamma -> +inf; evaluated in log space for very negative gamma.
double truncated_entropy_term(double gamma_g);

// Moments of the normalized extended-skew Gaussian u = (y - mu_g)/sigma_g
// conditioned on the top-fidelity value staying below the sampled maximum.
struct EsgMoments {
  double mean = 0.0;
  double variance = 1.0;
  double tau = 0.0;
  double gamma_f = 0.0;
};

EsgMoments esg_moments(double tau, double gamma_f);

// Per-(objective, sample) summand of the extended-skew approximation:
// tau^2 * gamma*phi/(2 Phi) - ln Phi + E_{u~ESG}[ln Phi((gamma - tau u)/sqrt(1-tau^2))]
// with the expectation by Simpson's rule over mean -/+ c*sqrt(variance).
// For |tau| >= 1 - kTauEpsilon returns the truncated term (the tau -> 1 limit).
double esg_entropy_term(double tau, double gamma_f, const QuadConfig& quad = {});

}  // namespace imoca::acq

#endif
