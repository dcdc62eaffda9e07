#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "hmfloquet/errors.hpp"
#include "hmfloquet/floquet.hpp"
#include "rk4.hpp"

namespace hmf {

std::array<double, 2> monodromy_quasienergies(const SystemParams& p, int steps_per_period) {
  p.validate();
  if (p.nonlinearity != 0.0) throw PreconditionError("monodromy oracle requires chi = 0");
  if (steps_per_period < 16) throw PreconditionError("too few steps per period");
  const double period = p.drive.period();
  const double h = period / steps_per_period;
  const double v = p.tunneling;
  const auto rhs = [&](double t, const Pair& c) {
    const double s = drive_value(t, p.drive);
    const cplx mi{0.0, -1.0};
    return Pair{mi * (0.5 * s * c.c1 - 0.5 * v * c.c2), mi * (-0.5 * v * c.c1 - 0.5 * s * c.c2)};
  };
  Eigen::Matrix2cd u;
  for (int col = 0; col < 2; ++col) {
    Pair c = col == 0 ? Pair{1.0, 0.0} : Pair{0.0, 1.0};
    for (int i = 0; i < steps_per_period; ++i) c = rk4_step(rhs, i * h, c, h);
    u(0, col) = c.c1;
    u(1, col) = c.c2;
  }
  if (!u.allFinite()) throw NumericalFailure("monodromy integration produced non-finite values");
  const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(u, false);
  std::array<double, 2> eps{};
  for (int k = 0; k < 2; ++k) {
    const cplx lambda = es.eigenvalues()(k);
    if (std::abs(std::abs(lambda) - 1.0) > 1e-8)
      throw NumericalFailure("monodromy matrix is not unitary; integration failed");
    eps[k] = fold_quasienergy(-std::arg(lambda) / period, p.drive.frequency);
  }
  std::sort(eps.begin(), eps.end());
  return eps;
}

}  // namespace hmf
