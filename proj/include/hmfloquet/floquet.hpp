#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmfloquet/system_params.hpp"

namespace hmf {

using cplx = std::complex<double>;

/// Periodic part of a nonlinear Floquet solution, truncated to harmonics
/// n = -cutoff..cutoff:  c1(t) = sum a_n e^{i n w t},  c2(t) = sum b_n e^{i n w t}.
struct FloquetState {
  double quasienergy = 0.0;
  int cutoff = 0;
  std::vector<cplx> a;  // index n + cutoff
  std::vector<cplx> b;
  double residual_norm = 0.0;

  static FloquetState zeros(int cutoff);

  cplx a_at(int n) const { return (n < -cutoff || n > cutoff) ? cplx{} : a[n + cutoff]; }
  cplx b_at(int n) const { return (n < -cutoff || n > cutoff) ? cplx{} : b[n + cutoff]; }
  cplx& a_ref(int n) { return a[n + cutoff]; }
  cplx& b_ref(int n) { return b[n + cutoff]; }

  double norm_squared() const;
  /// Weight carried by the outermost shell n = +-cutoff.
  double outer_shell_weight() const;
  /// Copy re-truncated (zero padded or cut) to a new cutoff.
  FloquetState with_cutoff(int new_cutoff) const;
  /// c1(t), c2(t) by direct Fourier summation.
  std::array<cplx, 2> evaluate(double t, double frequency) const;
};

/// Folds into the Brillouin zone (-w/2, w/2].
double fold_quasienergy(double eps, double frequency);

/// Euclidean norm of all 2(2N+1) Fourier-space residual components of
/// (H[c] - i d/dt - eps) c at the state's own quasienergy.
double floquet_residual(const FloquetState& s, const SystemParams& p);

/// Rayleigh quotient <c| H[c] - i d/dt |c> / <c|c>.
double rayleigh_quasienergy(const FloquetState& s, const SystemParams& p);

/// Period-averaged <sigma_z> = sum |a_n|^2 - sum |b_n|^2.
double population_imbalance(const FloquetState& s);

/// Period-averaged |c_mode|^2, mode in {1, 2}.
double cycle_averaged_population(const FloquetState& s, int mode);

/// |<s1|s2>| over the common Fourier window (global phase drops out).
double state_overlap(const FloquetState& s1, const FloquetState& s2);

/// Rotates the global phase so the largest coefficient is real positive.
void fix_gauge(FloquetState& s);

/// Lowest-order dressed state built from averaged-model amplitudes:
/// c1 = A1 e^{-i G(t)/2}, c2 = A2 e^{+i G(t)/2}, G the drive antiderivative.
FloquetState seed_from_amplitudes(cplx a1, cplx a2, const SystemParams& p, int cutoff);

struct SolverOptions {
  double tol = 1e-11;
  int max_iter = 200;
  double damping = 0.5;  // weight of the new eigenvector in the mixing step
  int cutoff = 16;
  bool adaptive_cutoff = true;
  double shell_tolerance = 1e-12;
  int cutoff_increment = 8;
  int max_cutoff = 96;
  // For chi > 0 a direct Newton solve from the guess comes first. When it fails
  // or wanders off, self-consistent sweeps run and hand over to Newton once the
  // residual drops below this value, or when the sweep drifts away from the guess.
  double newton_switch = 1e-3;
};

/// Thrown when no iterate reached the tolerance; carries the best one.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, FloquetState best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const FloquetState& best() const { return best_; }
  double residual() const { return best_.residual_norm; }

 private:
  FloquetState best_;
};

/// Self-consistent solution of the truncated Floquet eigenproblem.
/// The returned state is normalized, gauge fixed, has its quasienergy folded
/// and residual_norm <= opts.tol. The guess's cutoff is used when it exceeds
/// opts.cutoff.
FloquetState solve_floquet_state(const SystemParams& p, const FloquetState& guess,
                                 const SolverOptions& opts = {});

/// Every distinct Floquet state reachable from the averaged-model fixed points
/// and the dressed basis states, sorted by quasienergy.
std::vector<FloquetState> find_floquet_states(const SystemParams& p, const SolverOptions& opts = {});

/// The two states with linear counterparts: the highest level, and the most
/// balanced of the remaining ones.
struct NormalPair {
  FloquetState upper;
  FloquetState lower;
  double gap() const { return upper.quasienergy - lower.quasienergy; }
};

NormalPair normal_pair(const std::vector<FloquetState>& states);

/// Two Floquet states count as degenerate when |d eps| <= 1e-6 w.
bool degenerate(const FloquetState& s1, const FloquetState& s2, double frequency);

enum class BranchLabel { normal_upper, normal_lower, bifurcated_plus, bifurcated_minus };

std::string to_string(BranchLabel label);

struct BranchPoint {
  double a_over_omega;
  FloquetState state;
};

struct SpectrumBranch {
  BranchLabel label = BranchLabel::normal_lower;
  std::vector<BranchPoint> points;
  std::optional<double> birth;  // A/w where a bifurcated branch appears
};

/// Sequential continuation over a strictly monotone A/w grid; the seed must
/// solve the first grid point. A failed solve or an overlap drop below 0.8
/// truncates the branch.
SpectrumBranch continue_branch(const SystemParams& p_template, const std::vector<double>& grid,
                               const FloquetState& seed, BranchLabel label,
                               const SolverOptions& opts = {});

/// All branches over the grid: the undriven pair continued from the first
/// point plus every state discovered later, continued both ways.
std::vector<SpectrumBranch> sweep_spectrum(const SystemParams& p_template,
                                           const std::vector<double>& grid,
                                           const SolverOptions& opts = {});

/// Linear-limit quasienergies from the one-period propagator (chi must be 0),
/// folded and sorted.
std::array<double, 2> monodromy_quasienergies(const SystemParams& p, int steps_per_period = 8192);

}  // namespace hmf
