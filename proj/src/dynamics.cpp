#include "hmfloquet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "hmfloquet/errors.hpp"
#include "rk4.hpp"

namespace hmf {

namespace {

constexpr double kMaxDrift = 1e-6;

// Antiderivative of the (possibly ramped) drive, continuous at t_f.
class Phase {
 public:
  Phase(const DriveParams& d, const std::optional<RampSchedule>& ramp) : d_(d), ramp_(ramp) {
    if (ramp_) {
      const double w = d_.frequency, tf = ramp_->hold_from, f = d_.ratio, phi = d_.phase;
      hold_shift_ = -ramp_->rate * (std::sin(w * tf) / (w * w) + f * std::sin(2 * w * tf + phi) / (4 * w * w));
    }
  }

  double operator()(double t) const {
    if (!ramp_) return drive_antiderivative(t, d_);
    const double w = d_.frequency, f = d_.ratio, phi = d_.phase, a = ramp_->rate;
    if (t <= ramp_->hold_from) {
      return a * (t * std::cos(w * t) / w - std::sin(w * t) / (w * w)) +
             a * f * (t * std::cos(2 * w * t + phi) / (2 * w) - std::sin(2 * w * t + phi) / (4 * w * w));
    }
    const double af = a * ramp_->hold_from;
    return af * (std::cos(w * t) / w + f * std::cos(2 * w * t + phi) / (2 * w)) + hold_shift_;
  }

 private:
  DriveParams d_;
  std::optional<RampSchedule> ramp_;
  double hold_shift_ = 0.0;
};

struct RunResult {
  std::vector<double> times;
  std::vector<cplx> c1, c2;
  double max_drift = 0.0;
  Pair last;
};

template <class Rhs, class ToLab>
RunResult run(const Rhs& rhs, const ToLab& to_lab, Pair y, double t_end, double dt, std::size_t max_samples,
              bool store) {
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9)));
  const double h = t_end / static_cast<double>(steps);
  const long stride = std::max<long>(1, static_cast<long>((steps + max_samples - 1) / std::max<std::size_t>(1, max_samples - 1)));
  RunResult out;
  const auto record = [&](double t, const Pair& a) {
    const Pair c = to_lab(t, a);
    out.times.push_back(t);
    out.c1.push_back(c.c1);
    out.c2.push_back(c.c2);
  };
  if (store) record(0.0, y);
  for (long i = 0; i < steps; ++i) {
    const double t = i * h;
    y = rk4_step(rhs, t, y, h);
    const double drift = std::abs(std::norm(y.c1) + std::norm(y.c2) - 1.0);
    if (!std::isfinite(drift) || drift > kMaxDrift)
      throw IntegrationFailure("norm drift exceeds 1e-6; reduce the time step", t + h, drift);
    out.max_drift = std::max(out.max_drift, drift);
    if (store && ((i + 1) % stride == 0 || i + 1 == steps)) record((i + 1) * h, y);
  }
  out.last = y;
  return out;
}

void check_initial(const std::array<cplx, 2>& c) {
  const double n = std::norm(c[0]) + std::norm(c[1]);
  if (!(std::abs(n - 1.0) <= 1e-10)) throw PreconditionError("initial state must be normalized");
}

}  // namespace

RampSchedule RampSchedule::to_target(double rate, double target_a_over_omega, double frequency) {
  if (!(rate > 0.0)) throw PreconditionError("ramp rate must be positive to reach a target");
  return {rate, target_a_over_omega * frequency / rate};
}

void RampSchedule::validate() const {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw PreconditionError("ramp rate must be finite and >= 0");
  if (!(hold_from >= 0.0) || !std::isfinite(hold_from)) throw PreconditionError("ramp hold time must be >= 0");
}

double RampSchedule::amplitude_at(double t) const { return rate * std::min(t, hold_from); }

Trajectory integrate(std::array<cplx, 2> initial, const SystemParams& p, const std::optional<RampSchedule>& ramp,
                     double t_end, const IntegrateOptions& opts) {
  p.validate();
  check_initial(initial);
  if (ramp) {
    ramp->validate();
    if (t_end < 0.0) throw PreconditionError("ramped runs integrate forward only");
  }
  if (!std::isfinite(t_end) || t_end == 0.0) throw PreconditionError("t_end must be finite and nonzero");
  const double period = p.drive.period();
  const double dt = opts.dt > 0.0 ? opts.dt : period / 500.0;
  if (opts.dt < 0.0 || dt > period / 200.0 * (1.0 + 1e-12))
    throw PreconditionError("dt must be positive and resolve the drive (dt <= T/200)");
  if (opts.max_samples < 2) throw PreconditionError("need at least two stored samples");

  const Phase g(p.drive, ramp);
  const double v = p.tunneling, chi = p.nonlinearity;
  const cplx mi{0.0, -1.0};
  const auto rhs = [&](double t, const Pair& a) {
    const cplx e = std::polar(1.0, g(t));
    return Pair{mi * (-0.5 * v * e * a.c2 - chi * std::norm(a.c1) * a.c1),
                mi * (-0.5 * v * std::conj(e) * a.c1 - chi * std::norm(a.c2) * a.c2)};
  };
  const auto to_lab = [&](double t, const Pair& a) {
    const cplx e = std::polar(1.0, -0.5 * g(t));
    return Pair{a.c1 * e, a.c2 * std::conj(e)};
  };
  const cplx e0 = std::polar(1.0, 0.5 * g(0.0));
  const Pair a0{initial[0] * e0, initial[1] * std::conj(e0)};

  RunResult r = run(rhs, to_lab, a0, t_end, dt, opts.max_samples, true);
  Trajectory tr;
  tr.times = std::move(r.times);
  tr.c1 = std::move(r.c1);
  tr.c2 = std::move(r.c2);
  tr.params = p;
  tr.ramp = ramp;
  tr.dt = dt;
  tr.max_norm_drift = r.max_drift;
  if (opts.step_doubling_check) {
    const RunResult fine = run(rhs, to_lab, a0, t_end, 0.5 * dt, opts.max_samples, false);
    const Pair d = to_lab(t_end, r.last) + (-1.0) * to_lab(t_end, fine.last);
    tr.step_doubling_error = std::sqrt(std::norm(d.c1) + std::norm(d.c2));
  }
  return tr;
}

Trajectory integrate_effective(std::array<cplx, 2> initial, const EffectiveParams& e, const SystemParams& p,
                               double t_end, double dt) {
  check_initial(initial);
  if (!(dt > 0.0) || !std::isfinite(t_end) || t_end == 0.0) throw PreconditionError("bad time grid");
  const auto rhs = [&](double, const Pair& a) {
    const AmplitudeRates r = effective_rhs(a.c1, a.c2, e);
    return Pair{r.d1, r.d2};
  };
  const auto id = [](double, const Pair& a) { return a; };
  RunResult r = run(rhs, id, Pair{initial[0], initial[1]}, t_end, dt, 200000, true);
  Trajectory tr;
  tr.times = std::move(r.times);
  tr.c1 = std::move(r.c1);
  tr.c2 = std::move(r.c2);
  tr.params = p;
  tr.dt = dt;
  tr.max_norm_drift = r.max_drift;
  return tr;
}

double time_averaged_population(const Trajectory& tr, int mode, double t_start, double t_end) {
  if (mode != 1 && mode != 2) throw PreconditionError("mode must be 1 or 2");
  if (tr.times.size() < 2) throw PreconditionError("trajectory has fewer than two samples");
  if (!(t_end > t_start)) throw PreconditionError("empty averaging window");
  const auto [lo, hi] = std::minmax(tr.times.front(), tr.times.back());
  const double slack = 1e-9 * std::max(1.0, std::abs(hi - lo));
  if (t_start < lo - slack || t_end > hi + slack) throw PreconditionError("averaging window outside trajectory");
  const auto& c = mode == 1 ? tr.c1 : tr.c2;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < tr.times.size(); ++i) {
    double t0 = tr.times[i], t1 = tr.times[i + 1];
    double y0 = std::norm(c[i]), y1 = std::norm(c[i + 1]);
    if (t1 < t0) {
      std::swap(t0, t1);
      std::swap(y0, y1);
    }
    const double a = std::max(t0, t_start), b = std::min(t1, t_end);
    if (!(b > a)) continue;
    const auto at = [&](double t) { return y0 + (y1 - y0) * (t - t0) / (t1 - t0); };
    integral += 0.5 * (at(a) + at(b)) * (b - a);
  }
  return integral / (t_end - t_start);
}

bool WindowAverage::consistent() const { return std::abs(first_half - second_half) <= 0.02; }

WindowAverage windowed_population(const Trajectory& tr, int mode, double t_start, double t_end) {
  const double mid = 0.5 * (t_start + t_end);
  return {time_averaged_population(tr, mode, t_start, t_end), time_averaged_population(tr, mode, t_start, mid),
          time_averaged_population(tr, mode, mid, t_end)};
}

std::array<double, 2> default_average_window(const SystemParams& p) { return {p.drive.period(), 2000.0}; }

std::vector<LocalizationRow> ramp_localization(const std::vector<double>& phis, const SystemParams& base,
                                               double alpha, double t_f, double dt_avg, const IntegrateOptions& opts,
                                               bool keep_trajectories, unsigned workers) {
  if (!(alpha >= 0.0)) throw PreconditionError("ramp rate must be >= 0");
  if (!(dt_avg > 0.0)) throw PreconditionError("averaging window must be positive");
  if (!(t_f >= 0.0)) throw PreconditionError("hold time must be >= 0");
  base.validate();
  const RampSchedule ramp{alpha, t_f};
  const double r = std::sqrt(0.5);

  const auto one = [&](double phi) {
    LocalizationRow row;
    row.phi = phi;
    try {
      const SystemParams p = base.with_phase(phi);
      Trajectory tr = integrate({r, r}, p, ramp, t_f + dt_avg, opts);
      row.pop1 = time_averaged_population(tr, 1, t_f, t_f + dt_avg);
      row.pop2 = time_averaged_population(tr, 2, t_f, t_f + dt_avg);
      if (keep_trajectories) row.trajectory = std::move(tr);
    } catch (const std::exception& ex) {
      row.pop1 = row.pop2 = std::nan("");
      row.error = ex.what();
    }
    return row;
  };

  std::vector<LocalizationRow> rows(phis.size());
  unsigned n = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, phis.size())));
  if (n <= 1) {
    for (std::size_t i = 0; i < phis.size(); ++i) rows[i] = one(phis[i]);
    return rows;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < n; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < phis.size(); i += n) rows[i] = one(phis[i]);
    }));
  }
  for (auto& j : jobs) j.get();
  return rows;
}

}  // namespace hmf
