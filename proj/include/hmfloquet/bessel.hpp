#pragma once

#include <vector>

namespace hmf {

/// Integer-order Bessel function of the first kind, any sign of order and
/// argument (J_{-n} = (-1)^n J_n, J_n(-x) = (-1)^n J_n(x)).
double bessel_j(int n, double x);

/// Upper bound |x/2|^n / n! on |J_n(x)|, n >= 0.
double bessel_tail_bound(int n, double x);

/// J_n(x) for n in [-max_order, max_order]; zero outside that range.
class BesselTable {
 public:
  BesselTable(int max_order, double x);
  double operator()(int n) const {
    return (n < -max_order_ || n > max_order_) ? 0.0 : values_[n + max_order_];
  }
  int max_order() const { return max_order_; }

 private:
  int max_order_;
  std::vector<double> values_;
};

}  // namespace hmf
