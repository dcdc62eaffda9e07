#include "hmfloquet/effective.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "hmfloquet/bessel.hpp"
#include "hmfloquet/errors.hpp"

namespace hmf {

namespace {

constexpr double kTail = 1e-17;
constexpr int kMaxCutoff = 400;

cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double sign_pow(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

struct SeriesArgs {
  double x;  // A / w
  double y;  // A f / (2 w)
};

SeriesArgs series_args(const DriveParams& p) {
  return {p.amplitude / p.frequency, p.amplitude * p.ratio / (2.0 * p.frequency)};
}

}  // namespace

SeriesCutoffs resolve_cutoffs(const DriveParams& p, SeriesCutoffs requested) {
  p.validate();
  const auto [x, y] = series_args(p);
  SeriesCutoffs c = requested;
  c.harmonic = std::max(c.harmonic, 1);
  c.order = std::max(c.order, 1);
  while (c.harmonic < kMaxCutoff && bessel_tail_bound(c.harmonic + 1, y) > kTail) ++c.harmonic;
  while (c.order < kMaxCutoff && bessel_tail_bound(c.order + 1, x) > kTail) ++c.order;
  return c;
}

cplx coupling_phase_factor(double tau, const DriveParams& p) {
  const auto [x, y] = series_args(p);
  return std::polar(1.0, x * std::cos(tau) + y * std::cos(2.0 * tau + p.phase));
}

cplx f_bar(const DriveParams& p, SeriesCutoffs cutoffs) {
  const SeriesCutoffs c = resolve_cutoffs(p, cutoffs);
  const auto [x, y] = series_args(p);
  const BesselTable jx(std::max(2 * c.harmonic, c.order), x);
  const BesselTable jy(c.harmonic, y);
  cplx sum{0.0, 0.0};
  for (int m = -c.harmonic; m <= c.harmonic; ++m) {
    sum += jx(-2 * m) * jy(m) * ipow(-m) * std::polar(1.0, m * p.phase);
  }
  return sum;
}

cplx phi_correction(double tau, const DriveParams& p, SeriesCutoffs cutoffs) {
  const SeriesCutoffs c = resolve_cutoffs(p, cutoffs);
  const auto [x, y] = series_args(p);
  const BesselTable jx(c.order, x);
  const BesselTable jy(c.harmonic, y);
  cplx sum{0.0, 0.0};
  for (int m = -c.harmonic; m <= c.harmonic; ++m) {
    const cplx outer = jy(m) * std::polar(1.0, m * p.phase);
    cplx inner{0.0, 0.0};
    for (int n = -c.order; n <= c.order; ++n) {
      const int k = 2 * m + n;
      if (k == 0) continue;
      inner += jx(n) * ipow(m + n) * std::polar(1.0, k * tau) / static_cast<double>(k);
    }
    sum += outer * inner;
  }
  return sum;
}

namespace {

// J_{M-2m}(x) is negligible once |M - 2m| exceeds the order cutoff, so
// |M| <= order + 2 * harmonic suffices.
struct DeltaTables {
  SeriesCutoffs c;
  int max_m;
  BesselTable jx;
  BesselTable jy;
};

DeltaTables delta_tables(const DriveParams& p, SeriesCutoffs cutoffs) {
  const SeriesCutoffs c = resolve_cutoffs(p, cutoffs);
  const auto [x, y] = series_args(p);
  const int max_m = c.order + 2 * c.harmonic;
  return {c, max_m, BesselTable(max_m + 2 * c.harmonic, x), BesselTable(c.harmonic, y)};
}

}  // namespace

cplx delta_bias_full(const DriveParams& p, SeriesCutoffs cutoffs) {
  const DeltaTables t = delta_tables(p, cutoffs);
  const int h = t.c.harmonic;
  cplx sum{0.0, 0.0};
  for (int M = -t.max_m; M <= t.max_m; ++M) {
    if (M == 0) continue;
    cplx partial{0.0, 0.0};
    for (int m = -h; m <= h; ++m) {
      const double am = t.jx(M - 2 * m) * t.jy(m);
      if (am == 0.0) continue;
      for (int l = -h; l <= h; ++l) {
        const double al = t.jx(M - 2 * l) * t.jy(l);
        partial += sign_pow(M - l) * ipow(2 * M - m - l) * std::polar(1.0, (m - l) * p.phase) *
                   am * al;
      }
    }
    sum += partial / static_cast<double>(M);
  }
  return sum;
}

double delta_bias(const DriveParams& p, SeriesCutoffs cutoffs) {
  const DeltaTables t = delta_tables(p, cutoffs);
  const int h = t.c.harmonic;
  cplx sum{0.0, 0.0};
  for (int M = 1; M <= t.max_m; ++M) {
    cplx partial{0.0, 0.0};
    for (int m = -h; m <= h; ++m) {
      const double am = t.jx(M - 2 * m) * t.jy(m);
      if (am == 0.0) continue;
      for (int l = -h; l <= h; ++l) {
        if (l == m) continue;  // the phase difference factor vanishes
        const double al = t.jx(M - 2 * l) * t.jy(l);
        const cplx phase_diff{0.0, 2.0 * std::sin((m - l) * p.phase)};
        partial += sign_pow(M - l) * ipow(2 * M - m - l) * phase_diff * am * al;
      }
    }
    sum += partial / static_cast<double>(M);
  }
  const cplx full = delta_bias_full(p, cutoffs);
  const double tol = 1e-12 * std::max(1.0, std::abs(full));
  if (std::abs(full - sum) > tol || std::abs(sum.imag()) > tol) {
    throw InternalError("reduced and full second-order bias series disagree");
  }
  return sum.real();
}

QuadratureAverages effective_quadrature(const DriveParams& p, int points) {
  if (points < 16 || points % 2 != 0) throw PreconditionError("quadrature needs an even number of points >= 16");
  std::vector<cplx> f(points);
  for (int j = 0; j < points; ++j) f[j] = coupling_phase_factor(kTwoPi * j / points, p);
  Eigen::FFT<double> fft;
  std::vector<cplx> fk;
  fft.fwd(fk, f);
  const double inv = 1.0 / points;
  QuadratureAverages out;
  out.f_bar = fk[0] * inv;
  // Phi_k = F_k / k for k != 0; the Nyquist bin is split evenly.
  std::vector<cplx> phik(points);
  for (int j = 1; j < points; ++j) {
    const int k = j <= points / 2 ? j : j - points;
    phik[j] = (j == points / 2) ? cplx{} : fk[j] / static_cast<double>(k);
  }
  std::vector<cplx> phi;
  fft.inv(phi, phik);
  cplx mean{};
  for (int j = 0; j < points; ++j) mean += f[j] * std::conj(phi[j]);
  mean *= inv;
  out.delta = mean.real();
  out.delta_imag = mean.imag();
  return out;
}

EffectiveParams effective_params(const SystemParams& p, SeriesCutoffs cutoffs) {
  p.validate();
  EffectiveParams e;
  const double v = p.tunneling;
  const double w = p.drive.frequency;
  e.series_cutoff = resolve_cutoffs(p.drive, cutoffs);
  e.coupling_factor = f_bar(p.drive, e.series_cutoff);
  e.bias_series = delta_bias(p.drive, e.series_cutoff);
  e.v_eff = v * e.coupling_factor;
  e.delta_eff = v * v * e.bias_series / (2.0 * w);
  e.chi = p.nonlinearity;
  e.epsilon_small = v / w;
  return e;
}

double effective_splitting(const EffectiveParams& e) { return std::hypot(e.delta_eff, std::abs(e.v_eff)); }

AmplitudeRates effective_rhs(cplx a1, cplx a2, const EffectiveParams& e) {
  const cplx minus_i{0.0, -1.0};
  const cplx h1 = 0.5 * e.delta_eff * a1 - e.chi * std::norm(a1) * a1 - 0.5 * e.v_eff * a2;
  const cplx h2 = -0.5 * e.delta_eff * a2 - e.chi * std::norm(a2) * a2 - 0.5 * std::conj(e.v_eff) * a1;
  return {minus_i * h1, minus_i * h2};
}

// Fixed points live on the Bloch sphere s = (x, y, z), x + i y = 2 A1^* A2,
// z = |A1|^2 - |A2|^2, as critical points of
//   E(s) = (d/2) z - (chi/4)(1 + z^2) - (1/2)(vr x - vi y).
// Stationarity grad E = lambda s gives x = -vr/(2 lambda), y = vi/(2 lambda),
// z (2 lambda + chi) = d; normalization turns this into a quartic in
// u = 2 lambda.
namespace {

struct BlochPoint {
  Eigen::Vector3d s;
  double lambda;
};

StationaryState to_state(const BlochPoint& b, const EffectiveParams& e) {
  const double vr = e.v_eff.real();
  const double vi = e.v_eff.imag();
  const double z = std::clamp(b.s.z(), -1.0, 1.0);
  StationaryState st;
  st.imbalance = z;
  st.energy = 0.5 * e.delta_eff * z - 0.5 * e.chi * (1.0 + z * z) - 0.5 * (vr * b.s.x() - vi * b.s.y());
  const double m1 = std::sqrt(0.5 * (1.0 + z));
  const double m2 = std::sqrt(0.5 * (1.0 - z));
  const double theta = (b.s.x() == 0.0 && b.s.y() == 0.0) ? 0.0 : std::atan2(b.s.y(), b.s.x());
  st.a1 = {m1, 0.0};
  st.a2 = std::polar(m2, theta);
  return st;
}

// Sign of the constrained Hessian determinant on the tangent plane:
// +1 extremum, -1 saddle, 0 degenerate.
int fixed_point_index(const BlochPoint& b, const EffectiveParams& e, double scale) {
  const Eigen::Vector3d s = b.s.normalized();
  const Eigen::Vector3d k = std::abs(s.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d e1 = s.cross(k).normalized();
  const Eigen::Vector3d e2 = s.cross(e1);
  Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
  hess(2, 2) = -0.5 * e.chi;
  hess -= b.lambda * Eigen::Matrix3d::Identity();
  const double m11 = e1.dot(hess * e1);
  const double m12 = e1.dot(hess * e2);
  const double m22 = e2.dot(hess * e2);
  const double det = m11 * m22 - m12 * m12;
  if (std::abs(det) <= 1e-12 * scale * scale) return 0;
  return det > 0.0 ? 1 : -1;
}

void polish(BlochPoint& b, const EffectiveParams& e) {
  const double vr = e.v_eff.real();
  const double vi = e.v_eff.imag();
  for (int it = 0; it < 20; ++it) {
    const Eigen::Vector3d& s = b.s;
    Eigen::Vector4d f;
    f << -0.5 * vr - b.lambda * s.x(), 0.5 * vi - b.lambda * s.y(),
        0.5 * e.delta_eff - 0.5 * e.chi * s.z() - b.lambda * s.z(), s.squaredNorm() - 1.0;
    if (f.norm() < 1e-15) break;
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j(0, 0) = -b.lambda;
    j(1, 1) = -b.lambda;
    j(2, 2) = -0.5 * e.chi - b.lambda;
    j(0, 3) = -s.x();
    j(1, 3) = -s.y();
    j(2, 3) = -s.z();
    j.block<1, 3>(3, 0) = 2.0 * s.transpose();
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(j);
    if (!lu.isInvertible()) break;
    const Eigen::Vector4d step = lu.solve(-f);
    b.s += step.head<3>();
    b.lambda += step(3);
  }
}

StationaryStates linear_states(const EffectiveParams& e) {
  Eigen::Matrix2cd h;
  h << 0.5 * e.delta_eff, -0.5 * e.v_eff, -0.5 * std::conj(e.v_eff), -0.5 * e.delta_eff;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
  StationaryStates out;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2cd vec = es.eigenvectors().col(k);
    const double mag = std::abs(vec(0));
    if (mag > 0.0) vec *= std::conj(vec(0)) / mag;
    StationaryState st;
    st.energy = es.eigenvalues()(k);
    st.a1 = vec(0);
    st.a2 = vec(1);
    st.imbalance = std::norm(vec(0)) - std::norm(vec(1));
    st.stable = true;
    out.states.push_back(st);
  }
  return out;
}

}  // namespace

StationaryStates effective_stationary_states(const EffectiveParams& e) {
  const double vr = e.v_eff.real();
  const double vi = e.v_eff.imag();
  const double vv = std::abs(e.v_eff);
  const double d = e.delta_eff;
  const double chi = e.chi;
  if (chi < 0.0) throw PreconditionError("nonlinearity must be non-negative");
  const double scale = std::max({vv, std::abs(d), chi});

  if (chi == 0.0 || scale == 0.0) return linear_states(e);

  StationaryStates out;
  std::vector<BlochPoint> points;

  if (vv <= 1e-14 * scale) {
    // Decoupled modes: both poles, plus one representative of the
    // degenerate ring z = d / chi when it lies inside the sphere.
    points.push_back({Eigen::Vector3d(0, 0, 1), 0.5 * (d - chi)});
    points.push_back({Eigen::Vector3d(0, 0, -1), 0.5 * (-d - chi)});
    if (std::abs(d) < chi) {
      const double z = d / chi;
      points.push_back({Eigen::Vector3d(std::sqrt(1.0 - z * z), 0, z), 0.0});
    }
    for (const auto& b : points) {
      StationaryState st = to_state(b, e);
      st.stable = std::abs(b.s.z()) == 1.0;
      out.states.push_back(st);
    }
    std::sort(out.states.begin(), out.states.end(),
              [](const auto& l, const auto& r) { return l.energy < r.energy; });
    return out;
  }

  // u^4 + 2 chi u^3 + (chi^2 - |v|^2 - d^2) u^2 - 2 chi |v|^2 u - chi^2 |v|^2 = 0
  const double c3 = 2.0 * chi;
  const double c2 = chi * chi - vv * vv - d * d;
  const double c1 = -2.0 * chi * vv * vv;
  const double c0 = -chi * chi * vv * vv;
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(0, 0) = -c3;
  companion(0, 1) = -c2;
  companion(0, 2) = -c1;
  companion(0, 3) = -c0;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix4d> roots(companion, false);
  const auto poly = [&](double u) { return (((u + c3) * u + c2) * u + c1) * u + c0; };
  const auto dpoly = [&](double u) { return ((4.0 * u + 3.0 * c3) * u + 2.0 * c2) * u + c1; };

  for (int k = 0; k < 4; ++k) {
    const cplx r = roots.eigenvalues()(k);
    if (std::abs(r.imag()) > 1e-6 * scale) continue;
    double u = r.real();
    for (int it = 0; it < 8; ++it) {
      const double dp = dpoly(u);
      if (dp == 0.0) break;
      const double step = poly(u) / dp;
      // near a double root the quotient is rounding noise
      if (!(std::abs(poly(u - step)) < std::abs(poly(u)))) break;
      u -= step;
      if (std::abs(step) < 1e-16 * scale) break;
    }
    if (std::abs(u) < 1e-14 * scale) continue;
    const double x = -vr / u;
    const double y = vi / u;
    if (std::abs(u + chi) > 1e-7 * scale) {
      points.push_back({Eigen::Vector3d(x, y, d / (u + chi)), 0.5 * u});
    } else {
      // Symmetric pitchfork: z is fixed only by the normalization.
      const double z = std::sqrt(std::max(0.0, 1.0 - x * x - y * y));
      points.push_back({Eigen::Vector3d(x, y, z), 0.5 * u});
      points.push_back({Eigen::Vector3d(x, y, -z), 0.5 * u});
    }
  }

  std::vector<BlochPoint> unique;
  for (BlochPoint b : points) {
    polish(b, e);
    if (!b.s.allFinite() || std::abs(b.s.norm() - 1.0) > 1e-8) continue;
    const bool dup = std::any_of(unique.begin(), unique.end(),
                                 [&](const BlochPoint& u) { return (u.s - b.s).norm() < 1e-6; });
    if (!dup) unique.push_back(b);
  }

  int index_sum = 0;
  bool degenerate = false;
  for (const auto& b : unique) {
    const int idx = fixed_point_index(b, e, scale);
    if (idx == 0) degenerate = true;
    index_sum += idx;
    StationaryState st = to_state(b, e);
    st.stable = idx > 0;
    out.states.push_back(st);
  }
  std::sort(out.states.begin(), out.states.end(),
            [](const auto& l, const auto& r) { return l.energy < r.energy; });
  const auto n = out.states.size();
  out.complete = degenerate ? (n >= 2 && n <= 4) : (index_sum == 2);
  return out;
}

}  // namespace hmf
