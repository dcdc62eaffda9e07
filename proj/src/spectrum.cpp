#include <algorithm>
#include <cmath>
#include <optional>

#include "floquet_operator.hpp"
#include "hmfloquet/errors.hpp"
#include "hmfloquet/floquet.hpp"

namespace hmf {

namespace {

using detail::Vec;

constexpr double kContinuity = 0.8;

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw PreconditionError("empty A/w grid");
  if (grid.size() < 2) return;
  const bool up = grid[1] > grid[0];
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (up ? !(grid[k] > grid[k - 1]) : !(grid[k] < grid[k - 1]))
      throw PreconditionError("A/w grid must be strictly monotone");
  }
}

// Linear extrapolation of the last two points after aligning their phases.
FloquetState predict(const std::vector<const FloquetState*>& history) {
  const FloquetState& last = *history.back();
  if (history.size() < 2) return last;
  const FloquetState& prev = *history[history.size() - 2];
  const int cutoff = std::max(last.cutoff, prev.cutoff);
  const Vec x1 = detail::pack(last.with_cutoff(cutoff));
  Vec x0 = detail::pack(prev.with_cutoff(cutoff));
  const cplx ov = x0.dot(x1);
  if (std::abs(ov) < kContinuity) return last;
  x0 *= ov / std::abs(ov);
  Vec x = 2.0 * x1 - x0;
  x.normalize();
  return detail::unpack(x, cutoff, 2.0 * last.quasienergy - prev.quasienergy);
}

std::optional<FloquetState> step(const SystemParams& p, const std::vector<const FloquetState*>& history,
                                 const SolverOptions& opts) {
  const FloquetState& last = *history.back();
  for (const FloquetState& guess : {predict(history), last}) {
    try {
      FloquetState s = solve_floquet_state(p, guess, opts);
      if (state_overlap(s, last) >= kContinuity) return s;
    } catch (const ConvergenceFailure&) {
    } catch (const NumericalFailure&) {
    }
    if (history.size() < 2) break;
  }
  return std::nullopt;
}

bool same_state(const FloquetState& l, const FloquetState& r) {
  return std::abs(l.quasienergy - r.quasienergy) < 1e-7 && state_overlap(l, r) > 0.99;
}

}  // namespace

SpectrumBranch continue_branch(const SystemParams& p_template, const std::vector<double>& grid,
                               const FloquetState& seed, BranchLabel label, const SolverOptions& opts) {
  check_grid(grid);
  const SystemParams p0 = p_template.with_amplitude_over_frequency(grid.front());
  if (seed.cutoff < 1 || std::abs(seed.norm_squared() - 1.0) > 1e-6)
    throw PreconditionError("seed must be a normalized state");
  FloquetState probe = seed;
  probe.quasienergy = rayleigh_quasienergy(seed, p0);
  if (floquet_residual(probe, p0) > 1e-6) throw PreconditionError("seed does not solve the first grid point");

  SpectrumBranch branch;
  branch.label = label;
  branch.points.push_back({grid.front(), solve_floquet_state(p0, seed, opts)});
  std::vector<const FloquetState*> history;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    history.clear();
    for (std::size_t j = branch.points.size() >= 2 ? branch.points.size() - 2 : 0; j < branch.points.size(); ++j)
      history.push_back(&branch.points[j].state);
    auto next = step(p_template.with_amplitude_over_frequency(grid[k]), history, opts);
    if (!next) break;
    branch.points.push_back({grid[k], std::move(*next)});
  }
  return branch;
}

std::vector<SpectrumBranch> sweep_spectrum(const SystemParams& p_template, const std::vector<double>& grid,
                                           const SolverOptions& opts) {
  check_grid(grid);
  std::vector<SpectrumBranch> branches;
  // index of the last grid point reached by each branch
  std::vector<std::size_t> last_index;

  const auto point_at = [&](std::size_t b, std::size_t k) -> const FloquetState* {
    for (const auto& pt : branches[b].points)
      if (pt.a_over_omega == grid[k]) return &pt.state;
    return nullptr;
  };
  const auto taken = [&](std::size_t k, const FloquetState& s, std::size_t skip) {
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (b == skip) continue;
      if (const FloquetState* q = point_at(b, k); q && same_state(*q, s)) return true;
    }
    return false;
  };
  const auto history_of = [&](const SpectrumBranch& br) {
    std::vector<const FloquetState*> h;
    const std::size_t n = br.points.size();
    for (std::size_t j = n >= 2 ? n - 2 : 0; j < n; ++j) h.push_back(&br.points[j].state);
    return h;
  };

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const SystemParams p = p_template.with_amplitude_over_frequency(grid[k]);

    // extend every branch alive at the previous grid point
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (k == 0 || last_index[b] != k - 1) continue;
      auto next = step(p, history_of(branches[b]), opts);
      if (!next || taken(k, *next, b)) continue;
      branches[b].points.push_back({grid[k], std::move(*next)});
      last_index[b] = k;
    }

    for (FloquetState& s : find_floquet_states(p, opts)) {
      if (taken(k, s, branches.size())) continue;
      // a branch whose continuation step just failed may be rejoined
      bool rejoined = false;
      for (std::size_t b = 0; b < branches.size() && !rejoined; ++b) {
        if (k == 0 || last_index[b] != k - 1) continue;
        if (state_overlap(branches[b].points.back().state, s) >= kContinuity) {
          branches[b].points.push_back({grid[k], s});
          last_index[b] = k;
          rejoined = true;
        }
      }
      if (rejoined) continue;

      SpectrumBranch br;
      br.label = population_imbalance(s) >= 0.0 ? BranchLabel::bifurcated_plus : BranchLabel::bifurcated_minus;
      br.points.push_back({grid[k], s});
      // follow the new state back towards the start of the grid
      for (std::size_t j = k; j-- > 0;) {
        std::vector<const FloquetState*> h;
        const std::size_t n = br.points.size();
        for (std::size_t i = n >= 2 ? n - 2 : 0; i < n; ++i) h.push_back(&br.points[i].state);
        auto prev = step(p_template.with_amplitude_over_frequency(grid[j]), h, opts);
        if (!prev || taken(j, *prev, branches.size())) break;
        br.points.push_back({grid[j], std::move(*prev)});
      }
      std::reverse(br.points.begin(), br.points.end());
      if (br.points.front().a_over_omega != grid.front()) br.birth = br.points.front().a_over_omega;
      branches.push_back(std::move(br));
      last_index.push_back(k);
    }

    if (k == 0 && !branches.empty()) {
      // the undriven pair: the top level and the most balanced of the rest
      std::size_t top = 0;
      for (std::size_t b = 1; b < branches.size(); ++b)
        if (branches[b].points.front().state.quasienergy > branches[top].points.front().state.quasienergy) top = b;
      branches[top].label = BranchLabel::normal_upper;
      std::optional<std::size_t> low;
      for (std::size_t b = 0; b < branches.size(); ++b) {
        if (b == top) continue;
        const double z = std::abs(population_imbalance(branches[b].points.front().state));
        if (!low || z < std::abs(population_imbalance(branches[*low].points.front().state))) low = b;
      }
      if (low) branches[*low].label = BranchLabel::normal_lower;
    }
  }
  return branches;
}

}  // namespace hmf
