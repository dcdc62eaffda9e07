#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code paths with the library beyond the public value types.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hmfloquet/drive.hpp"
#include "hmfloquet/effective.hpp"
#include "hmfloquet/floquet.hpp"

namespace oracle {

using hmf::cplx;
constexpr double kPi = 3.14159265358979323846;

inline cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

// Residual (H(t) - i d/dt - eps) c(t) sampled on an M-point grid and projected
// back onto harmonics |j| <= N by a direct DFT.
inline double time_domain_residual(const hmf::FloquetState& s, const hmf::SystemParams& p, int points = 512) {
  const int n = s.cutoff;
  const double w = p.drive.frequency, period = 2 * kPi / w;
  std::vector<cplx> r1(points), r2(points);
  for (int k = 0; k < points; ++k) {
    const double t = period * k / points;
    cplx c1, c2, dc1, dc2;  // dc = i d/dt of the periodic part
    for (int m = -n; m <= n; ++m) {
      const cplx e = expi(m * w * t);
      c1 += s.a_at(m) * e;
      c2 += s.b_at(m) * e;
      dc1 += -m * w * s.a_at(m) * e;
      dc2 += -m * w * s.b_at(m) * e;
    }
    const double S = -p.drive.amplitude * (std::sin(w * t) + p.drive.ratio * std::sin(2 * w * t + p.drive.phase));
    const double v = p.tunneling, chi = p.nonlinearity, eps = s.quasienergy;
    r1[k] = 0.5 * S * c1 - 0.5 * v * c2 - chi * std::norm(c1) * c1 - dc1 - eps * c1;
    r2[k] = -0.5 * v * c1 - 0.5 * S * c2 - chi * std::norm(c2) * c2 - dc2 - eps * c2;
  }
  double sum = 0.0;
  for (int j = -n; j <= n; ++j) {
    cplx p1, p2;
    for (int k = 0; k < points; ++k) {
      const cplx e = expi(-2 * kPi * j * k / points);
      p1 += r1[k] * e;
      p2 += r2[k] * e;
    }
    sum += std::norm(p1 / double(points)) + std::norm(p2 / double(points));
  }
  return std::sqrt(sum);
}

// Period average of |c1|^2 - |c2|^2 on a time grid.
inline double time_domain_imbalance(const hmf::FloquetState& s, double w, int points = 512) {
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const auto c = s.evaluate(2 * kPi / w * k / points, w);
    acc += std::norm(c[0]) - std::norm(c[1]);
  }
  return acc / points;
}

inline cplx phase_factor(double tau, const hmf::DriveParams& p) {
  const double x = p.amplitude / p.frequency;
  return expi(x * std::cos(tau) + 0.5 * x * p.ratio * std::cos(2 * tau + p.phase));
}

// Samples of F, its mean, and Phi = i * (zero-mean antiderivative of F - Fbar)
// from a direct O(n^2) DFT.
struct Quadrature {
  std::vector<double> tau;
  std::vector<cplx> f, phi;
  cplx f_bar;
  cplx delta;  // mean F conj(Phi)
};

inline Quadrature quadrature(const hmf::DriveParams& p, int n = 4096) {
  Quadrature q;
  q.tau.resize(n);
  q.f.resize(n);
  q.phi.assign(n, cplx{});
  for (int j = 0; j < n; ++j) {
    q.tau[j] = 2 * kPi * j / n;
    q.f[j] = phase_factor(q.tau[j], p);
  }
  std::vector<cplx> tw(n);
  for (int j = 0; j < n; ++j) tw[j] = expi(-2 * kPi * j / n);
  std::vector<cplx> fk(n);
  for (int k = 0; k < n; ++k) {
    cplx acc;
    for (int j = 0; j < n; ++j) acc += q.f[j] * tw[(static_cast<long>(k) * j) % n];
    fk[k] = acc / double(n);
  }
  q.f_bar = fk[0];
  for (int k = 1; k < n; ++k) {
    if (k == n / 2) continue;
    const int kk = k < n / 2 ? k : k - n;
    const cplx c = fk[k] / double(kk);
    for (int j = 0; j < n; ++j) q.phi[j] += c * std::conj(tw[(static_cast<long>(k) * j) % n]);
  }
  cplx d;
  for (int j = 0; j < n; ++j) d += q.f[j] * std::conj(q.phi[j]);
  q.delta = d / double(n);
  return q;
}

// Fixed points of the averaged model on the Bloch sphere,
// A1 = sqrt((1+z)/2), A2 = sqrt((1-z)/2) e^{i theta}, as critical points of
//   H(z, theta) = (d/2) z - (chi/4)(1 + z^2) - (sqrt(1-z^2)/2) Re(v' e^{i theta}),
// found by Newton from a 32 x 32 seed grid. Poles are added when v' = 0.
struct GridFixedPoint {
  double z, theta, energy;
};

inline std::vector<GridFixedPoint> grid_fixed_points(const hmf::EffectiveParams& e) {
  const double d = e.delta_eff, chi = e.chi;
  const cplx vp = e.v_eff;
  const auto grad = [&](double z, double th) {
    const double s = std::sqrt(1 - z * z);
    const cplx ve = vp * expi(th);
    return Eigen::Vector2d(0.5 * d - 0.5 * chi * z + z / (2 * s) * ve.real(), 0.5 * s * ve.imag());
  };
  const auto energy = [&](double z, double th) {
    return 0.5 * d * z - 0.5 * chi * (1 + z * z) - 0.5 * std::sqrt(1 - z * z) * (vp * expi(th)).real();
  };
  std::vector<GridFixedPoint> out;
  const auto add = [&](double z, double th) {
    const cplx a1(std::sqrt((1 + z) / 2)), a2 = std::sqrt((1 - z) / 2) * expi(th);
    for (const auto& q : out) {
      const cplx b1(std::sqrt((1 + q.z) / 2)), b2 = std::sqrt((1 - q.z) / 2) * expi(q.theta);
      if (std::sqrt(std::norm(a1 - b1) + std::norm(a2 - b2)) < 1e-6) return;
    }
    out.push_back({z, th, energy(z, th)});
  };
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      double z = -1 + (i + 0.5) * 2.0 / 32, th = 2 * kPi * j / 32;
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const Eigen::Vector2d g = grad(z, th);
        if (g.norm() < 1e-14) {
          ok = true;
          break;
        }
        Eigen::Matrix2d jac;
        const double hz = 1e-7, ht = 1e-7;
        jac.col(0) = (grad(z + hz, th) - grad(z - hz, th)) / (2 * hz);
        jac.col(1) = (grad(z, th + ht) - grad(z, th - ht)) / (2 * ht);
        const Eigen::Vector2d step = jac.fullPivLu().solve(-g);
        if (!step.allFinite()) break;
        double lam = 1.0;
        while (std::abs(z + lam * step(0)) >= 1.0 && lam > 1e-6) lam *= 0.5;
        z += lam * step(0);
        th += lam * step(1);
        if (std::abs(z) >= 1.0) break;
      }
      if (ok || grad(z, th).norm() < 1e-11) add(z, std::remainder(th, 2 * kPi));
    }
  }
  if (std::abs(vp) == 0.0) {
    add(1.0, 0.0);
    add(-1.0, 0.0);
  }
  return out;
}

// Plain lab-frame RK4 for i dc/dt = H(t) c with amplitude A(t) = a_of_t(t).
template <class Amp>
std::array<cplx, 2> lab_frame_rk4(std::array<cplx, 2> c, const hmf::SystemParams& p, const Amp& a_of_t,
                                  double t_end, int steps) {
  const double w = p.drive.frequency, f = p.drive.ratio, phi = p.drive.phase, v = p.tunneling,
               chi = p.nonlinearity;
  const auto rhs = [&](double t, const std::array<cplx, 2>& y) {
    const double s = -a_of_t(t) * (std::sin(w * t) + f * std::sin(2 * w * t + phi));
    const cplx mi(0, -1);
    return std::array<cplx, 2>{mi * (0.5 * s * y[0] - 0.5 * v * y[1] - chi * std::norm(y[0]) * y[0]),
                               mi * (-0.5 * v * y[0] - 0.5 * s * y[1] - chi * std::norm(y[1]) * y[1])};
  };
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const auto k1 = rhs(t, c);
    const auto k2 = rhs(t + h / 2, {c[0] + h / 2 * k1[0], c[1] + h / 2 * k1[1]});
    const auto k3 = rhs(t + h / 2, {c[0] + h / 2 * k2[0], c[1] + h / 2 * k2[1]});
    const auto k4 = rhs(t + h, {c[0] + h * k3[0], c[1] + h * k3[1]});
    for (int m = 0; m < 2; ++m) c[m] += h / 6 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
  }
  return c;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240917);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline hmf::FloquetState random_state(int cutoff) {
  hmf::FloquetState s = hmf::FloquetState::zeros(cutoff);
  double n = 0.0;
  for (int m = -cutoff; m <= cutoff; ++m) {
    const double decay = std::exp(-0.3 * std::abs(m));
    s.a_ref(m) = decay * cplx(uniform(-1, 1), uniform(-1, 1));
    s.b_ref(m) = decay * cplx(uniform(-1, 1), uniform(-1, 1));
    n += std::norm(s.a_ref(m)) + std::norm(s.b_ref(m));
  }
  for (auto& x : s.a) x /= std::sqrt(n);
  for (auto& x : s.b) x /= std::sqrt(n);
  return s;
}

}  // namespace oracle
