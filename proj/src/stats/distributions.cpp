#include "iclscope/stats/distributions.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace iclscope::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double student_t_cdf(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const boost::math::students_t dist(df);
  return boost::math::cdf(dist, t);
}

double f_sf(double f, double df1, double df2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const boost::math::fisher_f dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double f_cdf(double f, double df1, double df2) { return 1.0 - f_sf(f, df1, df2); }

double kolmogorov_cdf(double lambda) {
  if (lambda <= 0.0) return 0.0;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small arguments.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * c);
      sum += term;
      if (term < 1e-18) break;
    }
    return std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  }
  return 1.0 - kolmogorov_sf(lambda);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) return 1.0 - kolmogorov_cdf(lambda);
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return 2.0 * sum;
}

}  // namespace iclscope::stats
