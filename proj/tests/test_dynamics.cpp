#include <doctest.h>

#include <cmath>

#include "hmfloquet/dynamics.hpp"
#include "hmfloquet/effective.hpp"
#include "hmfloquet/errors.hpp"
#include "oracles.hpp"

using namespace hmf;

namespace {

SystemParams standard(double a_over_w, double phi, double chi) {
  SystemParams s;
  s.nonlinearity = chi;
  s.drive = DriveParams(10 * a_over_w, 0.25, 10, phi);
  return s;
}

double max_norm_error(const Trajectory& tr) {
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    worst = std::max(worst, std::abs(std::norm(tr.c1[k]) + std::norm(tr.c2[k]) - 1.0));
  return worst;
}

// Populations of the averaged model with the first-order micromotion
// a1 = A1 + (v/2w) Phi A2, a2 = A2 - (v/2w) Phi^* A1 restored.
double shadow_error(const SystemParams& p, double t_end, bool micromotion) {
  const Trajectory full = integrate({1.0, 0.0}, p, std::nullopt, t_end);
  const EffectiveParams e = effective_params(p);
  const Trajectory eff = integrate_effective({1.0, 0.0}, e, p, t_end, full.dt);
  REQUIRE(full.times.size() == eff.times.size());
  const double eps = 0.5 * p.tunneling / p.drive.frequency;
  double worst = 0.0;
  for (std::size_t k = 0; k < full.times.size(); k += 5) {
    cplx a1 = eff.c1[k], a2 = eff.c2[k];
    if (micromotion) {
      const cplx phi = phi_correction(p.drive.frequency * full.times[k], p.drive);
      const cplx b1 = a1 + eps * phi * a2, b2 = a2 - eps * std::conj(phi) * a1;
      const double n = std::sqrt(std::norm(b1) + std::norm(b2));
      a1 = b1 / n;
      a2 = b2 / n;
    }
    worst = std::max(worst, std::abs(std::norm(full.c1[k]) - std::norm(a1)));
  }
  return worst;
}

}  // namespace

TEST_CASE("undriven Rabi oscillation") {
  const SystemParams p = standard(0.0, 0.0, 0.0);
  const Trajectory tr = integrate({1.0, 0.0}, p, std::nullopt, 40.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    worst = std::max(worst, std::abs(std::norm(tr.c1[k]) - std::pow(std::cos(0.5 * tr.times[k]), 2)));
  CHECK(worst < 1e-9);
}

TEST_CASE("decoupled modes keep their population") {
  SystemParams p = standard(2.4, 0.7, 0.4);
  p.tunneling = 1e-300;
  const Trajectory tr = integrate({1.0, 0.0}, p, std::nullopt, 30.0);
  for (std::size_t k = 0; k < tr.times.size(); ++k) CHECK(std::abs(std::norm(tr.c1[k]) - 1.0) < 1e-12);
}

TEST_CASE("preconditions") {
  const SystemParams p = standard(2.4, 0.0, 0.4);
  CHECK_THROWS_AS(integrate({1.0, 1.0}, p, std::nullopt, 10.0), PreconditionError);
  IntegrateOptions o;
  o.dt = p.drive.period() / 100;
  CHECK_THROWS_AS(integrate({1.0, 0.0}, p, std::nullopt, 10.0, o), PreconditionError);
  CHECK_THROWS_AS(integrate({1.0, 0.0}, p, RampSchedule{0.01, 100}, -10.0), PreconditionError);
  CHECK_THROWS_AS(integrate({1.0, 0.0}, p, RampSchedule{-0.01, 100}, 10.0), PreconditionError);
}

TEST_CASE("norm drift beyond 1e-6 raises an integration failure") {
  const SystemParams p = standard(2.4, 0.0, 300.0);
  IntegrateOptions o;
  o.dt = p.drive.period() / 200;
  try {
    (void)integrate({0.6, 0.8}, p, std::nullopt, 100.0, o);
    FAIL("expected an integration failure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.drift() > 1e-6);
    CHECK(e.time() > 0.0);
  }
}

TEST_CASE("norm conservation up to t = 3000") {
  for (double phi : {0.0, kPi / 4, kPi / 2}) {
    const Trajectory tr = integrate({1.0, 0.0}, standard(2.4, phi, 0.4), std::nullopt, 3000.0);
    CHECK(tr.max_norm_drift <= 1e-9);
    CHECK(max_norm_error(tr) <= 1e-9);
    CHECK(tr.times.size() <= 200000);
    CHECK(tr.times.back() == doctest::Approx(3000.0));
  }
  const Trajectory ramp = integrate({std::sqrt(0.5), std::sqrt(0.5)}, standard(0, kPi / 4, 0.4),
                                    RampSchedule{0.01, 2400}, 2800.0);
  CHECK(ramp.max_norm_drift <= 1e-9);
}

TEST_CASE("step doubling") {
  IntegrateOptions o;
  o.step_doubling_check = true;
  for (double phi : {0.0, kPi / 4}) {
    const Trajectory tr = integrate({1.0, 0.0}, standard(2.4, phi, 0.4), std::nullopt, 50.0, o);
    REQUIRE(tr.step_doubling_error);
    CHECK(*tr.step_doubling_error <= 1e-8);
  }
  const Trajectory r = integrate({1.0, 0.0}, standard(0, kPi / 4, 0.4), RampSchedule{0.01, 30}, 50.0, o);
  CHECK(*r.step_doubling_error <= 1e-8);
}

TEST_CASE("ramp schedule") {
  const RampSchedule r = RampSchedule::to_target(0.01, 2.4, 10.0);
  CHECK(r.hold_from == doctest::Approx(2400.0));
  CHECK(std::abs(r.target_a_over_omega(10.0) - 2.4) <= 1e-12);
  double prev = -1;
  for (double t = 0; t < 3000; t += 7.3) {
    const double a = r.amplitude_at(t);
    CHECK(a >= prev);
    prev = a;
  }
  CHECK(r.amplitude_at(5000) == doctest::Approx(24.0));
  CHECK_THROWS_AS(RampSchedule::to_target(0.0, 2.4, 10.0), PreconditionError);
}

TEST_CASE("ramped run converges across the hold time") {
  // a kink in the drive phase at t_f would spoil the step-doubling agreement
  IntegrateOptions o;
  o.step_doubling_check = true;
  const Trajectory tr = integrate({1.0, 0.0}, standard(0, 0.3, 0.4), RampSchedule{0.5, 12.345}, 20.0, o);
  CHECK(*tr.step_doubling_error <= 1e-8);
}

TEST_CASE("matches a direct lab-frame integration") {
  const SystemParams p = standard(0, 0.3, 0.4);
  const RampSchedule ramp{0.5, 12.345};
  const Trajectory tr = integrate({0.6, cplx(0, 0.8)}, p, ramp, 20.0);
  const auto ref = oracle::lab_frame_rk4({0.6, cplx(0, 0.8)}, p, [&](double t) { return ramp.amplitude_at(t); },
                                         20.0, 200000);
  CHECK(std::abs(tr.c1.back() - ref[0]) <= 1e-7);
  CHECK(std::abs(tr.c2.back() - ref[1]) <= 1e-7);

  const SystemParams q = standard(2.4, -1.1, 0.4);
  const Trajectory tc = integrate({1.0, 0.0}, q, std::nullopt, -7.0);
  const auto rc = oracle::lab_frame_rk4({1.0, 0.0}, q, [&](double) { return q.drive.amplitude; }, -7.0, 100000);
  CHECK(std::abs(tc.c1.back() - rc[0]) <= 1e-7);
  CHECK(std::abs(tc.c2.back() - rc[1]) <= 1e-7);
}

TEST_CASE("time averages") {
  Trajectory flat;
  flat.times = {0, 1, 2, 3};
  flat.c1 = {1, 1, 1, 1};
  flat.c2 = {0, 0, 0, 0};
  CHECK(time_averaged_population(flat, 1, 0.5, 2.5) == doctest::Approx(1.0));
  CHECK(time_averaged_population(flat, 2, 0, 3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(time_averaged_population(flat, 1, 2.0, 2.0), PreconditionError);
  CHECK_THROWS_AS(time_averaged_population(flat, 1, 1.0, 4.0), PreconditionError);
  CHECK_THROWS_AS(time_averaged_population(flat, 3, 0.0, 1.0), PreconditionError);

  const Trajectory rabi = integrate({1.0, 0.0}, standard(0, 0, 0), std::nullopt, 2 * kPi);
  CHECK(time_averaged_population(rabi, 1, 0, 2 * kPi) == doctest::Approx(0.5).epsilon(1e-8));
  const auto w = windowed_population(rabi, 1, 0, 2 * kPi);
  CHECK(w.first_half == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(w.consistent());
}

TEST_CASE("time-reversed mirror dynamics under the antisymmetric drive") {
  // S(-t) = -S(t): populations of mode 2 started in |2> replay those of mode 1
  // started in |1> backwards in time
  const SystemParams p = standard(2.4, 0.0, 0.4);
  const Trajectory fwd = integrate({0.0, 1.0}, p, std::nullopt, 60.0);
  const Trajectory bwd = integrate({1.0, 0.0}, p, std::nullopt, -60.0);
  REQUIRE(fwd.times.size() == bwd.times.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < fwd.times.size(); ++k) {
    CHECK(bwd.times[k] == doctest::Approx(-fwd.times[k]));
    worst = std::max(worst, std::abs(std::norm(fwd.c2[k]) - std::norm(bwd.c1[k])));
  }
  CHECK(worst <= 1e-8);

  // no such relation without the antisymmetry
  const SystemParams q = standard(2.4, kPi / 2, 0.4);
  const Trajectory f2 = integrate({0.0, 1.0}, q, std::nullopt, 60.0);
  const Trajectory b2 = integrate({1.0, 0.0}, q, std::nullopt, -60.0);
  double dev = 0.0;
  for (std::size_t k = 0; k < f2.times.size(); ++k)
    dev = std::max(dev, std::abs(std::norm(f2.c2[k]) - std::norm(b2.c1[k])));
  CHECK(dev > 1e-4);
}

TEST_CASE("averaged model shadows the full populations over short times") {
  for (double x : {1.0, 2.4, 3.5}) {
    for (double phi : {0.0, kPi / 4, kPi / 2}) {
      for (double chi : {0.0, 0.4}) {
        CAPTURE(x);
        CAPTURE(phi);
        CAPTURE(chi);
        CHECK(shadow_error(standard(x, phi, chi), 20.0, true) <= 0.05);
      }
    }
  }
}

TEST_CASE("averaged model shadows the full populations up to t = 200" * doctest::may_fail()) {
  double worst = 0.0;
  for (double x : {1.0, 2.4, 3.5})
    for (double phi : {0.0, kPi / 4, kPi / 2})
      for (double chi : {0.0, 0.4}) worst = std::max(worst, shadow_error(standard(x, phi, chi), 200.0, false));
  MESSAGE("largest population deviation up to t = 200: " << worst);
  CHECK(worst <= 0.05);
}

TEST_CASE("phi = 0 and phi = pi/2 share the self-trapping transition at A/w = 1") {
  double first_trapped[2] = {0, 0};
  int idx = 0;
  for (double phi : {0.0, kPi / 2}) {
    for (double chi : {0.5, 1.0, 1.5, 2.0, 2.5}) {
      const SystemParams p = standard(1.0, phi, chi);
      const Trajectory tr = integrate({1.0, 0.0}, p, std::nullopt, 2000.0);
      const auto win = default_average_window(p);
      const double avg = time_averaged_population(tr, 1, win[0], win[1]);
      if (avg > 0.75 && first_trapped[idx] == 0) first_trapped[idx] = chi;
    }
    ++idx;
  }
  CHECK(first_trapped[0] > 0);
  CHECK(first_trapped[0] == first_trapped[1]);
}

TEST_CASE("ramp localization table") {
  const SystemParams base = standard(0, 0, 0.4);
  const auto rows = ramp_localization({kPi / 4, -kPi / 4}, base, 0.01, 2400, 400, {}, false, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].phi == doctest::Approx(kPi / 4));
  CHECK(rows[0].error.empty());
  CHECK(rows[0].pop1 >= 0.9);
  CHECK(rows[1].pop2 >= 0.9);
  for (const auto& r : rows) CHECK(std::abs(r.pop1 + r.pop2 - 1.0) <= 1e-6);

  const auto still = ramp_localization({0.3}, base, 0.0, 100, 100);
  CHECK(still[0].pop1 >= 0.45);
  CHECK(still[0].pop1 <= 0.55);

  IntegrateOptions bad;
  bad.dt = 1.0;
  const auto failed = ramp_localization({0.0}, base, 0.01, 10, 10, bad);
  CHECK_FALSE(failed[0].error.empty());
  CHECK_THROWS_AS(ramp_localization({0.0}, base, 0.01, 10, 0.0), PreconditionError);
}
