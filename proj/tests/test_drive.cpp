#include <doctest.h>

#include <cmath>

#include "hmfloquet/drive.hpp"
#include "hmfloquet/errors.hpp"
#include "oracles.hpp"

using namespace hmf;

namespace {

DriveParams random_drive() {
  return DriveParams(oracle::uniform(-40, 40), oracle::uniform(0, 0.6), oracle::uniform(1, 20),
                     oracle::uniform(-4, 4));
}

}  // namespace

TEST_CASE("drive values at simple points") {
  const double w = 10;
  CHECK(drive_value(0.0, DriveParams(24, 0.25, w, 0.0)) == doctest::Approx(0.0));
  CHECK(drive_value(0.0, DriveParams(24, 0.25, w, kPi / 2)) == doctest::Approx(-6.0).epsilon(1e-14));
  const DriveParams p(24, 0.25, w, 0.0);
  CHECK(std::abs(drive_value(p.period() / 2, p)) < 1e-12 * p.scale());
}

TEST_CASE("antiderivative values") {
  CHECK(drive_antiderivative(0.0, DriveParams(24, 0.25, 10, kPi / 2)) == doctest::Approx(2.4).epsilon(1e-14));
  for (double t : {0.0, 0.3, -1.7, 55.0}) CHECK(drive_antiderivative(t, DriveParams(0, 0.25, 10, 0.4)) == 0.0);
}

TEST_CASE("phase canonicalization") {
  CHECK(canonical_phase(kPi) == doctest::Approx(-kPi));
  CHECK(canonical_phase(-kPi) == -kPi);
  CHECK(canonical_phase(0.5) == 0.5);
  CHECK(canonical_phase(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  for (int i = 0; i < 200; ++i) {
    const double x = canonical_phase(oracle::uniform(-50, 50));
    CHECK(x >= -kPi);
    CHECK(x < kPi);
    CHECK(canonical_phase(x) == x);
  }
  CHECK_THROWS_AS(DriveParams(1, 0.25, 0.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(DriveParams(1, 0.25, -3.0, 0.0), PreconditionError);
}

TEST_CASE("periodicity over random parameters") {
  for (int i = 0; i < 100; ++i) {
    const DriveParams p = random_drive();
    const double t = oracle::uniform(-100, 100);
    CHECK(std::abs(drive_value(t, p) - drive_value(t + p.period(), p)) <= 1e-12 * p.scale() * (1 + std::abs(t)));
  }
}

TEST_CASE("zero mean over one period") {
  for (int i = 0; i < 50; ++i) {
    const DriveParams p = random_drive();
    const int n = 2000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += drive_value(p.period() * k / n, p);
    CHECK(std::abs(acc / n) <= 1e-10 * p.scale());
    double g = 0.0;
    for (int k = 0; k < n; ++k) g += drive_antiderivative(p.period() * k / n, p);
    CHECK(std::abs(g / n) <= 1e-10 * p.scale() / p.frequency);
  }
}

TEST_CASE("antiderivative differentiates back to the drive") {
  for (int i = 0; i < 100; ++i) {
    const DriveParams p = random_drive();
    const double t = oracle::uniform(-10, 10);
    const double h = 1e-6 * p.period();
    const double fd = (drive_antiderivative(t + h, p) - drive_antiderivative(t - h, p)) / (2 * h);
    CHECK(std::abs(fd - drive_value(t, p)) <= 1e-6 * p.scale());
  }
}

TEST_CASE("symmetry classification") {
  SUBCASE("antisymmetric at phi = 0") {
    const DriveParams p(24, 0.25, 10, 0.0);
    const auto r = classify_symmetries(p, 1e-9);
    CHECK_FALSE(r.shift_symmetric);
    CHECK(r.antisymmetric);
    CHECK_FALSE(r.time_reversal_symmetric);
    REQUIRE(r.antisymmetry_point);
    for (int k = 0; k < 1000; ++k) {
      const double t = p.period() * k / 1000;
      CHECK(std::abs(drive_value(t, p) + drive_value(-t, p)) <= 1e-12 * p.scale());
    }
  }
  SUBCASE("time reversal at phi = pi/2") {
    const DriveParams p(24, 0.25, 10, kPi / 2);
    const auto r = classify_symmetries(p, 1e-9);
    CHECK_FALSE(r.antisymmetric);
    CHECK(r.time_reversal_symmetric);
    REQUIRE(r.time_reversal_point);
    const double t0 = *r.time_reversal_point;
    for (int k = 0; k < 1000; ++k) {
      const double t = p.period() * k / 1000;
      CHECK(std::abs(drive_value(t0 + t, p) - drive_value(t0 - t, p)) <= 1e-12 * p.scale());
    }
  }
  SUBCASE("pure sinusoid has all three") {
    for (double phi : {0.0, 0.7, kPi / 2, -2.0}) {
      const auto r = classify_symmetries(DriveParams(24, 0.0, 10, phi), 1e-9);
      CHECK(r.shift_symmetric);
      CHECK(r.antisymmetric);
      CHECK(r.time_reversal_symmetric);
    }
  }
  SUBCASE("shift symmetry is broken by the second harmonic") {
    for (int i = 0; i < 30; ++i) {
      const DriveParams p(oracle::uniform(1, 40), oracle::uniform(0.05, 0.5), 10, oracle::uniform(-kPi, kPi));
      CHECK_FALSE(classify_symmetries(p, 1e-9).shift_symmetric);
    }
  }
  SUBCASE("flags follow phi mod pi") {
    for (double phi : {-kPi, -kPi / 2, 0.0, kPi / 2, 0.3, -1.2, 2.9}) {
      const auto r = classify_symmetries(DriveParams(24, 0.25, 10, phi), 1e-9);
      const bool anti = std::abs(std::sin(phi)) < 1e-12;
      const bool tr = std::abs(std::cos(phi)) < 1e-12;
      CHECK(r.antisymmetric == anti);
      CHECK(r.time_reversal_symmetric == tr);
    }
  }
  CHECK_THROWS_AS(classify_symmetries(DriveParams(1, 0.25, 10, 0), 0.0), PreconditionError);
}
