#pragma once

// Fourier-space representation of the Floquet operator shared by the
// residual, the self-consistent sweeps and the Newton polish.

#include <Eigen/Dense>
#include <vector>

#include "hmfloquet/floquet.hpp"

namespace hmf::detail {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Layout: [a_{-N} .. a_N, b_{-N} .. b_N].
Vec pack(const FloquetState& s);
FloquetState unpack(const Vec& x, int cutoff, double quasienergy);

// Fourier coefficients of |c|^2: g_d = sum_m c_m conj(c_{m-d}), d in [-2N, 2N]
// stored at index d + 2N.
std::vector<cplx> density_coeffs(const cplx* c, int cutoff);
// Fourier coefficients of c^2: q_s = sum_m c_m c_{s-m}, index s + 2N.
std::vector<cplx> square_coeffs(const cplx* c, int cutoff);

// Hermitian operator with the cubic terms frozen at x:
//   drive couplings, n w on the diagonal, -chi g_{j-k}, -v/2 between modes.
Mat frozen_operator(const Vec& x, int cutoff, const SystemParams& p);

double rayleigh(const Vec& x, const Mat& h);

}  // namespace hmf::detail
