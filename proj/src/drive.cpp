#include "hmfloquet/drive.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hmfloquet/errors.hpp"

namespace hmf {

double canonical_phase(double phi) {
  if (!std::isfinite(phi)) throw PreconditionError("phase must be finite");
  if (phi >= -kPi && phi < kPi) return phi;
  double r = std::fmod(phi + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double out = r - kPi;
  if (out >= kPi) out -= kTwoPi;
  if (out < -kPi) out = -kPi;
  return out;
}

DriveParams::DriveParams(double amplitude_, double ratio_, double frequency_, double phase_)
    : amplitude(amplitude_), ratio(ratio_), frequency(frequency_), phase(canonical_phase(phase_)) {
  validate();
}

void DriveParams::validate() const {
  if (!(frequency > 0.0) || !std::isfinite(frequency))
    throw PreconditionError("drive frequency must be positive and finite");
  if (!std::isfinite(amplitude) || !std::isfinite(ratio))
    throw PreconditionError("drive amplitude and ratio must be finite");
}

double DriveParams::scale() const {
  const double s = std::abs(amplitude) * (1.0 + std::abs(ratio));
  return s > 0.0 ? s : 1.0;
}

DriveParams DriveParams::with_amplitude(double a) const {
  DriveParams p = *this;
  p.amplitude = a;
  return p;
}

DriveParams DriveParams::with_phase(double phi) const {
  DriveParams p = *this;
  p.phase = canonical_phase(phi);
  return p;
}

double drive_value(double t, const DriveParams& p) {
  const double wt = p.frequency * t;
  return -p.amplitude * (std::sin(wt) + p.ratio * std::sin(2.0 * wt + p.phase));
}

double drive_antiderivative(double t, const DriveParams& p) {
  const double wt = p.frequency * t;
  return p.amplitude / p.frequency *
         (std::cos(wt) + 0.5 * p.ratio * std::cos(2.0 * wt + p.phase));
}

namespace {

constexpr int kGrid = 1024;

// max_k |S(t_k + t0) + sign * S(-t_k + t0)| over one period.
double reflection_residual(const DriveParams& p, double t0, double sign) {
  const double dt = p.period() / kGrid;
  double worst = 0.0;
  for (int k = 0; k < kGrid; ++k) {
    const double t = k * dt;
    worst = std::max(worst, std::abs(drive_value(t0 + t, p) + sign * drive_value(t0 - t, p)));
  }
  return worst;
}

double shift_residual(const DriveParams& p) {
  const double dt = p.period() / kGrid;
  double worst = 0.0;
  for (int k = 0; k < kGrid; ++k) {
    const double t = k * dt;
    worst = std::max(worst, std::abs(drive_value(t, p) + drive_value(t + 0.5 * p.period(), p)));
  }
  return worst;
}

struct PointSearch {
  double t0 = 0.0;
  double residual = 0.0;
};

// Analytic candidates first; the full grid only when none of them qualifies.
PointSearch find_reflection_point(const DriveParams& p, double sign, double threshold) {
  const double T = p.period();
  const std::array<double, 4> candidates{0.0, 0.25 * T, 0.5 * T, 0.75 * T};
  PointSearch best{0.0, reflection_residual(p, 0.0, sign)};
  for (double c : candidates) {
    const double r = reflection_residual(p, c, sign);
    if (r < best.residual) best = {c, r};
  }
  if (best.residual <= threshold) return best;
  for (int k = 0; k < kGrid; ++k) {
    const double c = k * T / kGrid;
    const double r = reflection_residual(p, c, sign);
    if (r < best.residual) best = {c, r};
  }
  return best;
}

}  // namespace

SymmetryReport classify_symmetries(const DriveParams& p, double tol) {
  p.validate();
  if (!(tol > 0.0)) throw PreconditionError("symmetry tolerance must be positive");
  const double threshold = tol * p.scale();

  // Closed-form violations at the best analytic t0 (0 or T/2 for the
  // antisymmetry, T/4 or 3T/4 for the time-reversal symmetry).
  const double af = std::abs(p.amplitude * p.ratio);
  const bool shift_analytic = 2.0 * af <= threshold;
  const bool anti_analytic = 2.0 * af * std::abs(std::sin(p.phase)) <= threshold;
  const bool tr_analytic = 2.0 * af * std::abs(std::cos(p.phase)) <= threshold;

  SymmetryReport report;
  report.shift_residual = shift_residual(p);
  const PointSearch anti = find_reflection_point(p, +1.0, threshold);
  const PointSearch tr = find_reflection_point(p, -1.0, threshold);
  report.antisymmetry_residual = anti.residual;
  report.time_reversal_residual = tr.residual;
  report.shift_symmetric = report.shift_residual <= threshold;
  report.antisymmetric = anti.residual <= threshold;
  report.time_reversal_symmetric = tr.residual <= threshold;
  if (report.antisymmetric) report.antisymmetry_point = anti.t0;
  if (report.time_reversal_symmetric) report.time_reversal_point = tr.t0;

  if (shift_analytic != report.shift_symmetric || anti_analytic != report.antisymmetric ||
      tr_analytic != report.time_reversal_symmetric) {
    throw InternalError("sampled and analytic drive symmetry classification disagree");
  }
  return report;
}

}  // namespace hmf
