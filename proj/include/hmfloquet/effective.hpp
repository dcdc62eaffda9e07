#pragma once

#include <complex>
#include <vector>

#include "hmfloquet/drive.hpp"
#include "hmfloquet/system_params.hpp"

namespace hmf {

using cplx = std::complex<double>;

/// Truncation of the Bessel double sums. `harmonic` bounds |m|, |l| (the
/// J_m(Af/2w) index), `order` bounds the J_n(A/w) index. Both grow
/// automatically until the omitted tail bound drops below 1e-17.
struct SeriesCutoffs {
  int harmonic = 12;
  int order = 40;
};

/// Cutoffs actually used for a given drive after tail-bound growth.
SeriesCutoffs resolve_cutoffs(const DriveParams& p, SeriesCutoffs requested = {});

/// F(tau) = exp(i (A/w) cos tau + i (A f / 2w) cos(2 tau + phi)), tau = w t.
cplx coupling_phase_factor(double tau, const DriveParams& p);

/// Time average of F(tau) as a Bessel series (renormalized tunneling factor).
cplx f_bar(const DriveParams& p, SeriesCutoffs cutoffs = {});

/// First-order correction Phi(tau) = i * (zero-mean antiderivative of F - Fbar),
/// summed with m in the outer loop and n in the inner loop, n != -2m.
cplx phi_correction(double tau, const DriveParams& p, SeriesCutoffs cutoffs = {});

/// Second-order series delta = mean(F Phi^*) in the reduced M > 0 form.
/// Cross-checks itself against delta_bias_full and throws InternalError on
/// disagreement beyond 1e-12.
double delta_bias(const DriveParams& p, SeriesCutoffs cutoffs = {});

/// Same quantity summed over all M != 0 without the symmetry reduction.
cplx delta_bias_full(const DriveParams& p, SeriesCutoffs cutoffs = {});

/// The same averages by direct sampling: Fbar = mean F, Phi from the
/// spectral antiderivative of F - Fbar, delta = mean F Phi^*.
struct QuadratureAverages {
  cplx f_bar;
  double delta = 0.0;
  double delta_imag = 0.0;
};

QuadratureAverages effective_quadrature(const DriveParams& p, int points = 4096);

/// Parameters of the averaged two-mode model
///   i dA1/dt =  (d/2) A1 - chi |A1|^2 A1 - (v'/2)  A2
///   i dA2/dt = -(d/2) A2 - chi |A2|^2 A2 - (v'*/2) A1
/// with v' = v Fbar and d = v^2 delta / (2 w). The factor 1/2 in d comes from
/// the -(eps/2) F coupling that feeds the first-order amplitude.
struct EffectiveParams {
  cplx v_eff{1.0, 0.0};
  double delta_eff = 0.0;
  double chi = 0.0;
  double epsilon_small = 0.0;  // v / w
  SeriesCutoffs series_cutoff{};
  cplx coupling_factor{1.0, 0.0};  // Fbar
  double bias_series = 0.0;        // delta

  /// True when v/w < 0.2, the regime where the averaging is trusted.
  bool perturbative() const { return epsilon_small < 0.2; }
};

EffectiveParams effective_params(const SystemParams& p, SeriesCutoffs cutoffs = {});

/// Linear-limit splitting E+ - E- = sqrt(d^2 + |v'|^2).
double effective_splitting(const EffectiveParams& e);

struct AmplitudeRates {
  cplx d1;
  cplx d2;
};

AmplitudeRates effective_rhs(cplx a1, cplx a2, const EffectiveParams& e);

struct StationaryState {
  double energy = 0.0;
  cplx a1;  // real, non-negative
  cplx a2;
  double imbalance = 0.0;  // |A1|^2 - |A2|^2
  bool stable = false;     // extremum of the energy on the Bloch sphere
};

struct StationaryStates {
  std::vector<StationaryState> states;  // sorted by energy
  // False when the Poincare-Hopf index count (centers - saddles == 2) fails,
  // i.e. some fixed point was missed.
  bool complete = true;
};

/// All normalized fixed points of the averaged model, modulo global phase.
StationaryStates effective_stationary_states(const EffectiveParams& e);

}  // namespace hmf
