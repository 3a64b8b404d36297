#include "subart/rng.hpp"

#include <algorithm>

#include <boost/math/distributions/normal.hpp>

namespace subart {

double Rng::truncated_normal(double mean, double sd, bool positive) {
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  const double a = -mean / sd;  // truncation point on the standard scale
  const double u = uniform();
  double p;
  if (positive) {
    const double p_low = boost::math::cdf(std_normal, a);
    p = p_low + u * (1.0 - p_low);
  } else {
    const double p_high = boost::math::cdf(std_normal, a);
    p = u * p_high;
  }
  p = std::clamp(p, 1e-15, 1.0 - 1e-15);
  return mean + sd * boost::math::quantile(std_normal, p);
}

}  // namespace subart
