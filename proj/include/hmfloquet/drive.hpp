#pragma once

#include <numbers>
#include <optional>

namespace hmf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps a phase into [-pi, pi). Values already inside the interval are
/// returned unchanged, so the map is idempotent bit-for-bit.
double canonical_phase(double phi);

/// Two-harmonic drive S(t) = -A [sin(wt) + f sin(2wt + phi)].
struct DriveParams {
  double amplitude = 0.0;
  double ratio = 0.0;
  double frequency = 1.0;
  double phase = 0.0;

  DriveParams() = default;
  /// Throws PreconditionError unless frequency > 0; canonicalizes phase.
  DriveParams(double amplitude, double ratio, double frequency, double phase);

  double period() const { return kTwoPi / frequency; }
  /// |A| (1 + |f|), or 1 for a vanishing drive. Used to scale tolerances.
  double scale() const;
  double amplitude_over_frequency() const { return amplitude / frequency; }

  DriveParams with_amplitude(double a) const;
  DriveParams with_phase(double phi) const;
  void validate() const;
};

double drive_value(double t, const DriveParams& p);

/// Zero-mean antiderivative (A/w) cos(wt) + (A f / 2w) cos(2wt + phi).
double drive_antiderivative(double t, const DriveParams& p);

struct SymmetryReport {
  bool shift_symmetric = false;          // S(t) = -S(t + T/2)
  bool antisymmetric = false;            // S(t + t0) = -S(-t + t0)
  bool time_reversal_symmetric = false;  // S(t + t0) = S(-t + t0)
  std::optional<double> antisymmetry_point;
  std::optional<double> time_reversal_point;
  // Largest sampled violation at the best t0 (absolute units of S).
  double shift_residual = 0.0;
  double antisymmetry_residual = 0.0;
  double time_reversal_residual = 0.0;
};

/// Classifies the drive both from the phase conditions and by sampling S on a
/// 1024-point grid. A flag is set when the residual is at most tol * scale().
/// Throws InternalError if the two classifications disagree.
SymmetryReport classify_symmetries(const DriveParams& p, double tol);

}  // namespace hmf
