#include "hmfloquet/bessel.hpp"

#include <cmath>
#include <cstdlib>

namespace hmf {

double bessel_j(int n, double x) {
  const int m = std::abs(n);
  double sign = 1.0;
  if (n < 0 && (m % 2 == 1)) sign = -sign;
  if (x < 0.0) {
    x = -x;
    if (m % 2 == 1) sign = -sign;
  }
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  return sign * std::cyl_bessel_j(static_cast<double>(m), x);
}

double bessel_tail_bound(int n, double x) {
  const double h = std::abs(x) / 2.0;
  return std::exp(n * std::log(h > 0.0 ? h : 1e-300) - std::lgamma(n + 1.0));
}

BesselTable::BesselTable(int max_order, double x)
    : max_order_(max_order), values_(2 * static_cast<std::size_t>(max_order) + 1) {
  for (int n = 0; n <= max_order; ++n) {
    const double j = bessel_j(n, x);
    values_[max_order + n] = j;
    values_[max_order - n] = (n % 2 == 0) ? j : -j;
  }
}

}  // namespace hmf
