#ifndef IMOCA_NORMAL_HPP
#define IMOCA_NORMAL_HPP

#include <cmath>

namespace imoca {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Standard normal density.
inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / kSqrt2Pi;
}

// Standard normal CDF via erfc; relative error of erfc is a few ulp, so the
// absolute error here is far below 1e-12 everywhere.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / kSqrt2);
}

namespace detail {

// log(erfc(t)) for t >= 0, valid past the erfc underflow point (t ~ 26.5)
// using the Laplace continued fraction for the scaled function.
inline double log_erfc_large(double t) {
  // erfc(t) = exp(-t^2)/(t*sqrt(pi)) * 1/(1 + 1/(2t^2) + ...) via CF:
  // erfcx(t) = (1/sqrt(pi)) / (t + 0.5/(t + 1/(t + 1.5/(t + ...))))
  double cf = 0.0;
  for (int k = 20; k >= 1; --k) {
    cf = (0.5 * k) / (t + cf);
  }
  const double erfcx = (1.0 / std::sqrt(M_PI)) / (t + cf);
  return std::log(erfcx) - t * t;
}

}  // namespace detail

// log(Phi(x)), stable for arbitrarily negative x (never -inf/NaN for finite x).
inline double norm_logcdf(double x) {
  if (x > 0.0) {
    // log(1 - Q) with Q = Phi(-x) small-ish
    return std::log1p(-0.5 * std::erfc(x / kSqrt2));
  }
  const double t = -x / kSqrt2;
  if (t < 25.0) {
    return std::log(0.5 * std::erfc(t));
  }
  return std::log(0.5) + detail::log_erfc_large(t);
}

// Hazard ratio phi(x)/Phi(x), computed in log space so it stays finite for
// very negative x (asymptotically -x).
inline double norm_hazard(double x) {
  const double lp = -0.5 * x * x - kLogSqrt2Pi;
  return std::exp(lp - norm_logcdf(x));
}

// Inverse standard normal CDF (Wichura's AS241, ~1e-15 accurate), used by
// test oracles for truncated-normal sampling.
double norm_quantile(double p);

}  // namespace imoca

#endif
