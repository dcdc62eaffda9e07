#include <algorithm>
#include <cmath>

#include "floquet_operator.hpp"
#include "hmfloquet/errors.hpp"
#include "hmfloquet/floquet.hpp"

namespace hmf {

void SystemParams::validate() const {
  drive.validate();
  if (!(tunneling > 0.0) || !std::isfinite(tunneling))
    throw PreconditionError("tunneling must be positive");
  if (!(nonlinearity >= 0.0) || !std::isfinite(nonlinearity))
    throw PreconditionError("nonlinearity must be non-negative");
}

SystemParams SystemParams::with_amplitude_over_frequency(double a_over_w) const {
  SystemParams p = *this;
  p.drive.amplitude = a_over_w * drive.frequency;
  return p;
}

SystemParams SystemParams::with_phase(double phi) const {
  SystemParams p = *this;
  p.drive = drive.with_phase(phi);
  return p;
}

SystemParams SystemParams::with_nonlinearity(double chi) const {
  SystemParams p = *this;
  p.nonlinearity = chi;
  return p;
}

FloquetState FloquetState::zeros(int cutoff) {
  if (cutoff < 1) throw PreconditionError("Fourier cutoff must be at least 1");
  FloquetState s;
  s.cutoff = cutoff;
  s.a.assign(2 * cutoff + 1, cplx{});
  s.b.assign(2 * cutoff + 1, cplx{});
  return s;
}

double FloquetState::norm_squared() const {
  double n = 0.0;
  for (const auto& c : a) n += std::norm(c);
  for (const auto& c : b) n += std::norm(c);
  return n;
}

double FloquetState::outer_shell_weight() const {
  return std::norm(a.front()) + std::norm(a.back()) + std::norm(b.front()) + std::norm(b.back());
}

FloquetState FloquetState::with_cutoff(int new_cutoff) const {
  FloquetState s = zeros(new_cutoff);
  s.quasienergy = quasienergy;
  s.residual_norm = residual_norm;
  const int common = std::min(cutoff, new_cutoff);
  for (int n = -common; n <= common; ++n) {
    s.a_ref(n) = a_at(n);
    s.b_ref(n) = b_at(n);
  }
  return s;
}

std::array<cplx, 2> FloquetState::evaluate(double t, double frequency) const {
  cplx c1{}, c2{};
  for (int n = -cutoff; n <= cutoff; ++n) {
    const cplx e = std::polar(1.0, n * frequency * t);
    c1 += a_at(n) * e;
    c2 += b_at(n) * e;
  }
  return {c1, c2};
}

double fold_quasienergy(double eps, double frequency) {
  if (!(frequency > 0.0)) throw PreconditionError("frequency must be positive");
  double r = eps - frequency * std::ceil(eps / frequency - 0.5);
  const double half = 0.5 * frequency;
  while (r > half) r -= frequency;
  while (r <= -half) r += frequency;
  return r;
}

namespace detail {

Vec pack(const FloquetState& s) {
  const int n = 2 * s.cutoff + 1;
  Vec x(2 * n);
  for (int j = 0; j < n; ++j) {
    x(j) = s.a[j];
    x(n + j) = s.b[j];
  }
  return x;
}

FloquetState unpack(const Vec& x, int cutoff, double quasienergy) {
  FloquetState s = FloquetState::zeros(cutoff);
  const int n = 2 * cutoff + 1;
  for (int j = 0; j < n; ++j) {
    s.a[j] = x(j);
    s.b[j] = x(n + j);
  }
  s.quasienergy = quasienergy;
  return s;
}

std::vector<cplx> density_coeffs(const cplx* c, int cutoff) {
  const int n = 2 * cutoff + 1;
  std::vector<cplx> g(2 * n - 1, cplx{});
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) g[i - k + n - 1] += c[i] * std::conj(c[k]);
  }
  return g;
}

std::vector<cplx> square_coeffs(const cplx* c, int cutoff) {
  const int n = 2 * cutoff + 1;
  std::vector<cplx> q(2 * n - 1, cplx{});
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) q[i + k] += c[i] * c[k];
  }
  return q;
}

Mat frozen_operator(const Vec& x, int cutoff, const SystemParams& p) {
  const int n = 2 * cutoff + 1;
  const double w = p.drive.frequency;
  const double chi = p.nonlinearity;
  const cplx quarter_amp{0.0, 0.25 * p.drive.amplitude};  // -A/(4i)
  const cplx fwd = p.drive.ratio * std::polar(1.0, p.drive.phase);
  Mat h = Mat::Zero(2 * n, 2 * n);
  for (int mode = 0; mode < 2; ++mode) {
    const int off = mode * n;
    const double sign = mode == 0 ? 1.0 : -1.0;
    const cplx c = sign * quarter_amp;
    for (int j = 0; j < n; ++j) {
      h(off + j, off + j) += (j - cutoff) * w;
      if (j >= 1) h(off + j, off + j - 1) += c;
      if (j + 1 < n) h(off + j, off + j + 1) -= c;
      if (j >= 2) h(off + j, off + j - 2) += c * fwd;
      if (j + 2 < n) h(off + j, off + j + 2) -= c * std::conj(fwd);
    }
    if (chi != 0.0) {
      const auto g = density_coeffs(x.data() + off, cutoff);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) h(off + j, off + k) -= chi * g[j - k + n - 1];
    }
  }
  for (int j = 0; j < n; ++j) {
    h(j, n + j) = -0.5 * p.tunneling;
    h(n + j, j) = -0.5 * p.tunneling;
  }
  return h;
}

double rayleigh(const Vec& x, const Mat& h) { return x.dot(h * x).real() / x.squaredNorm(); }

}  // namespace detail

double floquet_residual(const FloquetState& s, const SystemParams& p) {
  const detail::Vec x = detail::pack(s);
  const detail::Mat h = detail::frozen_operator(x, s.cutoff, p);
  return (h * x - s.quasienergy * x).norm();
}

double rayleigh_quasienergy(const FloquetState& s, const SystemParams& p) {
  const detail::Vec x = detail::pack(s);
  return detail::rayleigh(x, detail::frozen_operator(x, s.cutoff, p));
}

double population_imbalance(const FloquetState& s) {
  return cycle_averaged_population(s, 1) - cycle_averaged_population(s, 2);
}

double cycle_averaged_population(const FloquetState& s, int mode) {
  if (mode != 1 && mode != 2) throw PreconditionError("mode must be 1 or 2");
  const auto& c = mode == 1 ? s.a : s.b;
  double sum = 0.0;
  for (const auto& v : c) sum += std::norm(v);
  return sum;
}

double state_overlap(const FloquetState& s1, const FloquetState& s2) {
  const int common = std::min(s1.cutoff, s2.cutoff);
  cplx sum{};
  for (int n = -common; n <= common; ++n) {
    sum += std::conj(s1.a_at(n)) * s2.a_at(n) + std::conj(s1.b_at(n)) * s2.b_at(n);
  }
  return std::abs(sum);
}

void fix_gauge(FloquetState& s) {
  cplx largest{};
  for (const auto* c : {&s.a, &s.b})
    for (const auto& v : *c)
      if (std::abs(v) > std::abs(largest)) largest = v;
  if (std::abs(largest) == 0.0) return;
  const cplx rot = std::conj(largest) / std::abs(largest);
  for (auto* c : {&s.a, &s.b})
    for (auto& v : *c) v *= rot;
}

FloquetState seed_from_amplitudes(cplx a1, cplx a2, const SystemParams& p, int cutoff) {
  p.validate();
  FloquetState s = FloquetState::zeros(cutoff);
  const int samples = std::max(256, 8 * (cutoff + 1));
  const double w = p.drive.frequency;
  const double dt = p.drive.period() / samples;
  for (int k = 0; k < samples; ++k) {
    const double t = k * dt;
    const double g = drive_antiderivative(t, p.drive);
    const cplx c1 = a1 * std::polar(1.0, -0.5 * g);
    const cplx c2 = a2 * std::polar(1.0, 0.5 * g);
    for (int n = -cutoff; n <= cutoff; ++n) {
      const cplx e = std::polar(1.0 / samples, -n * w * t);
      s.a_ref(n) += c1 * e;
      s.b_ref(n) += c2 * e;
    }
  }
  const double norm = std::sqrt(s.norm_squared());
  if (norm == 0.0) throw PreconditionError("seed amplitudes vanish");
  for (auto* c : {&s.a, &s.b})
    for (auto& v : *c) v /= norm;
  s.quasienergy = rayleigh_quasienergy(s, p);
  s.residual_norm = floquet_residual(s, p);
  return s;
}

bool degenerate(const FloquetState& s1, const FloquetState& s2, double frequency) {
  return std::abs(s1.quasienergy - s2.quasienergy) <= 1e-6 * frequency;
}

std::string to_string(BranchLabel label) {
  switch (label) {
    case BranchLabel::normal_upper: return "normal_upper";
    case BranchLabel::normal_lower: return "normal_lower";
    case BranchLabel::bifurcated_plus: return "bifurcated_plus";
    case BranchLabel::bifurcated_minus: return "bifurcated_minus";
  }
  return "unknown";
}

}  // namespace hmf
