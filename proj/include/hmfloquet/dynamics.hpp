#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "hmfloquet/effective.hpp"
#include "hmfloquet/system_params.hpp"

namespace hmf {

using cplx = std::complex<double>;

/// Linear amplitude ramp A(t) = rate * min(t, hold_from).
struct RampSchedule {
  double rate = 0.0;
  double hold_from = 0.0;

  static RampSchedule to_target(double rate, double target_a_over_omega, double frequency);
  void validate() const;
  double amplitude_at(double t) const;
  double target_a_over_omega(double frequency) const { return rate * hold_from / frequency; }
};

struct IntegrateOptions {
  double dt = 0.0;  // 0 selects T/500
  std::size_t max_samples = 200000;
  bool step_doubling_check = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> c1;
  std::vector<cplx> c2;
  SystemParams params;
  std::optional<RampSchedule> ramp;
  double dt = 0.0;
  double max_norm_drift = 0.0;  // over every step, not only stored samples
  std::optional<double> step_doubling_error;

  std::array<cplx, 2> final_state() const { return {c1.back(), c2.back()}; }
};

/// Fixed-step RK4 for the full two-mode model. With a ramp the drive amplitude
/// in `p` is ignored. The integration runs in the frame that absorbs the drive
/// phase exp(+-i G(t)/2); stored amplitudes are in the original frame.
/// Negative t_end integrates backwards (constant amplitude only).
Trajectory integrate(std::array<cplx, 2> initial, const SystemParams& p,
                     const std::optional<RampSchedule>& ramp, double t_end,
                     const IntegrateOptions& opts = {});

/// Same integrator applied to the averaged amplitude equations.
Trajectory integrate_effective(std::array<cplx, 2> initial, const EffectiveParams& e,
                               const SystemParams& p, double t_end, double dt);

/// Trapezoidal mean of |c_mode|^2 over [t_start, t_end], with linear
/// interpolation of the population at the window edges.
double time_averaged_population(const Trajectory& tr, int mode, double t_start, double t_end);

struct WindowAverage {
  double value = 0.0;
  double first_half = 0.0;
  double second_half = 0.0;
  bool consistent() const;  // half-window means agree within 0.02
};

WindowAverage windowed_population(const Trajectory& tr, int mode, double t_start, double t_end);

/// Default averaging window for constant-drive runs: [T, 2000].
std::array<double, 2> default_average_window(const SystemParams& p);

struct LocalizationRow {
  double phi = 0.0;
  double pop1 = 0.0;
  double pop2 = 0.0;
  std::string error;  // empty on success
  std::optional<Trajectory> trajectory;
};

/// Ramp from the ground state (1,1)/sqrt2 with A = alpha t until t_f (alpha = 0
/// keeps the drive off), then
/// average over [t_f, t_f + dt_avg]. Rows come back in input order; failed
/// integrations are reported in the row.
std::vector<LocalizationRow> ramp_localization(const std::vector<double>& phis, const SystemParams& base,
                                               double alpha, double t_f, double dt_avg,
                                               const IntegrateOptions& opts = {},
                                               bool keep_trajectories = false, unsigned workers = 0);

}  // namespace hmf
