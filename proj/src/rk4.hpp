#pragma once

#include <complex>

namespace hmf {

struct Pair {
  std::complex<double> c1, c2;
};

inline Pair operator+(const Pair& l, const Pair& r) { return {l.c1 + r.c1, l.c2 + r.c2}; }
inline Pair operator*(double s, const Pair& r) { return {s * r.c1, s * r.c2}; }

template <class Rhs>
Pair rk4_step(const Rhs& f, double t, const Pair& y, double h) {
  const Pair k1 = f(t, y);
  const Pair k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const Pair k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const Pair k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace hmf
