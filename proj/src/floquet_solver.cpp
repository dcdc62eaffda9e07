#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>

#include "floquet_operator.hpp"
#include "hmfloquet/effective.hpp"
#include "hmfloquet/errors.hpp"
#include "hmfloquet/floquet.hpp"

namespace hmf {

namespace {

using detail::Mat;
using detail::Vec;

constexpr int kNewtonIterations = 40;
// A direct Newton solve from the guess is kept only if it stays this close.
constexpr double kDirectOverlap = 0.9;

struct Iterate {
  Vec x;
  double eps = 0.0;
  double residual = 0.0;
};

Iterate evaluate(Vec x, int cutoff, const SystemParams& p) {
  x.normalize();
  const Mat h = detail::frozen_operator(x, cutoff, p);
  const double eps = detail::rayleigh(x, h);
  const double res = (h * x - eps * x).norm();
  if (!std::isfinite(res) || !x.allFinite()) throw NumericalFailure("non-finite Floquet iterate");
  return {std::move(x), eps, res};
}

// Newton on (Re x, Im x, eps) for (H[x] - eps) x = 0 with |x| = 1 and the
// phase of the largest component pinned. The system is overdetermined by
// one consistent row and solved in the least-squares sense.
std::optional<Iterate> newton_polish(Iterate it, int cutoff, const SystemParams& p, double tol) {
  const int n = 2 * cutoff + 1;
  const int dim = 2 * n;
  const double chi = p.nonlinearity;
  Eigen::Index k0 = 0;
  it.x.cwiseAbs().maxCoeff(&k0);
  it.x *= std::conj(it.x(k0)) / std::abs(it.x(k0));
  double eps = it.eps;

  const auto merit = [&](const Vec& x, double e) {
    const Mat h = detail::frozen_operator(x, cutoff, p);
    const double r = (h * x - e * x).norm();
    const double nrm = x.squaredNorm() - 1.0;
    return r * r + nrm * nrm;
  };

  for (int iter = 0; iter < kNewtonIterations; ++iter) {
    const Vec& x = it.x;
    const Mat h = detail::frozen_operator(x, cutoff, p);
    const Vec r = h * x - eps * x;

    Mat j1 = h;
    j1.diagonal().array() -= eps;
    Mat j2 = Mat::Zero(dim, dim);
    if (chi != 0.0) {
      for (int mode = 0; mode < 2; ++mode) {
        const int off = mode * n;
        const auto g = detail::density_coeffs(x.data() + off, cutoff);
        const auto q = detail::square_coeffs(x.data() + off, cutoff);
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            j1(off + j, off + k) -= chi * g[j - k + n - 1];
            j2(off + j, off + k) -= chi * q[j + k];
          }
        }
      }
    }

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * dim + 2, 2 * dim + 1);
    m.block(0, 0, dim, dim) = (j1 + j2).real();
    m.block(0, dim, dim, dim) = j2.imag() - j1.imag();
    m.block(dim, 0, dim, dim) = (j1 + j2).imag();
    m.block(dim, dim, dim, dim) = j1.real() - j2.real();
    m.block(0, 2 * dim, dim, 1) = -x.real();
    m.block(dim, 2 * dim, dim, 1) = -x.imag();
    m.block(2 * dim, 0, 1, dim) = 2.0 * x.real().transpose();
    m.block(2 * dim, dim, 1, dim) = 2.0 * x.imag().transpose();
    m(2 * dim + 1, dim + k0) = 1.0;

    Eigen::VectorXd rhs(2 * dim + 2);
    rhs.head(dim) = -r.real();
    rhs.segment(dim, dim) = -r.imag();
    rhs(2 * dim) = -(x.squaredNorm() - 1.0);
    rhs(2 * dim + 1) = -x(k0).imag();

    const Eigen::VectorXd step = m.colPivHouseholderQr().solve(rhs);
    if (!step.allFinite()) return std::nullopt;
    Vec dx(dim);
    dx.real() = step.head(dim);
    dx.imag() = step.segment(dim, dim);

    const double m0 = merit(x, eps);
    double scale = 1.0;
    Vec trial = x + dx;
    double trial_eps = eps + step(2 * dim);
    for (int ls = 0; ls < 6 && merit(trial, trial_eps) > m0; ++ls) {
      scale *= 0.5;
      trial = x + scale * dx;
      trial_eps = eps + scale * step(2 * dim);
    }
    it = evaluate(trial, cutoff, p);
    eps = it.eps;
    if (it.residual <= tol) return it;
  }
  return std::nullopt;
}

Iterate to_iterate(const FloquetState& s, int cutoff, const SystemParams& p) {
  return evaluate(detail::pack(s.with_cutoff(cutoff)), cutoff, p);
}

// Newton from the guess; failing that, damped self-consistent sweeps followed
// by a Newton polish. The sweeps can slide off saddle-type states of the
// nonlinear problem, which the direct attempt avoids.
Iterate solve_at_cutoff(const SystemParams& p, const Iterate& start, int cutoff,
                        const SolverOptions& opts) {
  const bool linear = p.nonlinearity == 0.0;
  const double eta = linear ? 1.0 : opts.damping;
  Iterate best = start;
  Iterate cur = start;
  if (cur.residual <= opts.tol) return cur;
  if (!linear) {
    if (auto direct = newton_polish(start, cutoff, p, opts.tol);
        direct && std::abs(start.x.dot(direct->x)) >= kDirectOverlap)
      return *direct;
  }

  bool drifted = false;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const Mat h = detail::frozen_operator(cur.x, cutoff, p);
    const Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failed");
    const Vec proj = es.eigenvectors().adjoint() * cur.x;
    Eigen::Index k = 0;
    proj.cwiseAbs().maxCoeff(&k);
    Vec y = es.eigenvectors().col(k);
    const cplx ov = proj(k);
    if (std::abs(ov) > 0.0) y *= std::conj(ov) / std::abs(ov);
    cur = evaluate((1.0 - eta) * cur.x + eta * y, cutoff, p);
    if (cur.residual < best.residual) best = cur;
    if (cur.residual <= opts.tol) return cur;
    if (cur.residual <= opts.newton_switch) break;
    if (std::abs(start.x.dot(cur.x)) < 0.8) {
      drifted = true;
      break;
    }
  }

  if (!drifted) {
    if (auto polished = newton_polish(cur, cutoff, p, opts.tol)) return *polished;
  }
  if (auto polished = newton_polish(start, cutoff, p, opts.tol)) return *polished;
  FloquetState failed = detail::unpack(best.x, cutoff, best.eps);
  failed.residual_norm = best.residual;
  throw ConvergenceFailure("Floquet solver did not reach the tolerance", std::move(failed));
}

FloquetState finalize(const Iterate& it, int cutoff) {
  FloquetState s = detail::unpack(it.x, cutoff, it.eps);
  fix_gauge(s);
  s.quasienergy = it.eps;
  s.residual_norm = it.residual;
  return s;
}

// c e^{-i eps t} = (c e^{i k w t}) e^{-i (eps + k w) t}: moving the
// quasienergy by k w shifts the coefficients by k harmonics.
FloquetState shift_harmonics(const FloquetState& s, int k) {
  FloquetState out = FloquetState::zeros(s.cutoff + std::abs(k));
  for (int n = -s.cutoff; n <= s.cutoff; ++n) {
    out.a_ref(n + k) = s.a_at(n);
    out.b_ref(n + k) = s.b_at(n);
  }
  return out;
}

}  // namespace

FloquetState solve_floquet_state(const SystemParams& p, const FloquetState& guess,
                                 const SolverOptions& opts) {
  p.validate();
  if (!(opts.tol > 0.0)) throw PreconditionError("solver tolerance must be positive");
  if (guess.cutoff < 1 || guess.norm_squared() == 0.0) throw PreconditionError("empty guess");
  const double norm_dev = std::abs(guess.norm_squared() - 1.0);
  if (norm_dev > 1e-6) throw PreconditionError("guess must be normalized");

  int cutoff = std::max(opts.cutoff, guess.cutoff);
  Iterate it = solve_at_cutoff(p, to_iterate(guess, cutoff, p), cutoff, opts);
  FloquetState s = finalize(it, cutoff);

  const double w = p.drive.frequency;
  for (int guard = 0; guard < 4; ++guard) {
    const int k = static_cast<int>(std::lround((fold_quasienergy(s.quasienergy, w) - s.quasienergy) / w));
    bool changed = false;
    if (k != 0) {
      s = shift_harmonics(s, k);
      cutoff = s.cutoff;
      changed = true;
    }
    if (opts.adaptive_cutoff && s.outer_shell_weight() > opts.shell_tolerance &&
        cutoff + opts.cutoff_increment <= opts.max_cutoff) {
      cutoff += opts.cutoff_increment;
      changed = true;
    }
    if (!changed) break;
    it = solve_at_cutoff(p, to_iterate(s, cutoff, p), cutoff, opts);
    s = finalize(it, cutoff);
  }
  s.quasienergy = fold_quasienergy(s.quasienergy, w);
  s.residual_norm = floquet_residual(s, p);
  return s;
}

std::vector<FloquetState> find_floquet_states(const SystemParams& p, const SolverOptions& opts) {
  p.validate();
  const EffectiveParams eff = effective_params(p);
  const StationaryStates fixed = effective_stationary_states(eff);

  std::vector<std::array<cplx, 2>> seeds;
  for (const auto& st : fixed.states) seeds.push_back({st.a1, st.a2});
  const double r = std::sqrt(0.5);
  seeds.push_back({1.0, 0.0});
  seeds.push_back({0.0, 1.0});
  seeds.push_back({r, r});
  seeds.push_back({r, -r});

  std::vector<FloquetState> found;
  for (const auto& seed : seeds) {
    FloquetState s;
    try {
      s = solve_floquet_state(p, seed_from_amplitudes(seed[0], seed[1], p, opts.cutoff), opts);
    } catch (const ConvergenceFailure&) {
      continue;
    } catch (const NumericalFailure&) {
      continue;
    }
    const bool dup = std::any_of(found.begin(), found.end(), [&](const FloquetState& f) {
      return std::abs(f.quasienergy - s.quasienergy) < 1e-7 && state_overlap(f, s) > 0.99;
    });
    if (!dup) found.push_back(std::move(s));
  }
  std::sort(found.begin(), found.end(),
            [](const auto& l, const auto& r2) { return l.quasienergy < r2.quasienergy; });
  return found;
}

NormalPair normal_pair(const std::vector<FloquetState>& states) {
  if (states.size() < 2) throw PreconditionError("need at least two Floquet states");
  const auto top = std::max_element(states.begin(), states.end(), [](const auto& l, const auto& r) {
    return l.quasienergy < r.quasienergy;
  });
  const FloquetState* lower = nullptr;
  for (const auto& s : states) {
    if (&s == &*top) continue;
    if (!lower || std::abs(population_imbalance(s)) < std::abs(population_imbalance(*lower))) lower = &s;
  }
  return {*top, *lower};
}

}  // namespace hmf
