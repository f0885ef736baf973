#pragma once

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/units.hpp"

// Centered discrete Fourier transforms between the (nu+, nu-) and (t+, t-)
// grids. The continuous pair implemented here is
//   psi_hat(t) = (1/2pi) iint exp(-i(nu+ t+ + nu- t-)) psi(nu) dnu+ dnu-
//   psi(nu)    = (1/2pi) iint exp(+i(nu+ t+ + nu- t-)) psi_hat(t) dt+ dt-
// which makes the discrete Parseval identity exact: sum(|psi|^2) dnu+ dnu- =
// sum(|psi_hat|^2) dt+ dt- for conjugate axes with dt = 2pi / (N dnu).

namespace biphoton {
namespace detail {

// Centered DFT along a vector: X_m = sum_j x_j exp(sign * i * u_j w_m) with
// u_j = du (j - N/2), w_m = dw (m - N/2), du dw = 2pi/N. Reduces to a plain
// FFT after (-1)^j / (-1)^m phase flips plus the constant exp(sign*i*pi*N/2).
template <typename Scalar>
void centered_dft_inplace(Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& x,
                          int sign, Eigen::FFT<Scalar>& fft) {
  const Eigen::Index n = x.size();
  for (Eigen::Index j = 1; j < n; j += 2) x[j] = -x[j];
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(n);
  if (sign < 0) {
    fft.fwd(out, x);
  } else {
    fft.inv(out, x);  // configured Unscaled: plain exp(+2pi i jk/N) sum
  }
  const Scalar constant = ((n / 2) % 2 == 0) ? Scalar(1) : Scalar(-1);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Scalar s = (m % 2 == 0) ? constant : -constant;
    x[m] = out[m] * s;
  }
}

template <typename Scalar>
Eigen::FFT<Scalar> make_unscaled_fft() {
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
  return fft;
}

// Centered DFT along the plus (row) index for every minus column.
template <typename Scalar>
void centered_dft_plus_axis(typename ComplexGrid2D<Scalar>::Values& v, int sign) {
  auto fft = make_unscaled_fft<Scalar>();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> col(v.rows());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) col[i] = v(i, j);
    centered_dft_inplace(col, sign, fft);
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = col[i];
  }
}

// Centered DFT along the minus (column) index for every plus row.
template <typename Scalar>
void centered_dft_minus_axis(typename ComplexGrid2D<Scalar>::Values& v, int sign) {
  auto fft = make_unscaled_fft<Scalar>();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> row(v.cols());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) row[j] = v(i, j);
    centered_dft_inplace(row, sign, fft);
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = row[j];
  }
}

template <typename Scalar>
Axis<Scalar> conjugate_axis(const Axis<Scalar>& a) {
  const Scalar step = Scalar(two_pi) / (a.step * Scalar(a.count));
  return Axis<Scalar>{-step * Scalar(a.count / 2), step, a.count};
}

}  // namespace detail

/// Transform a frequency-domain amplitude to the time domain (exp(-i nu t)
/// kernel, 1/(2pi) prefactor, cell-area quadrature weight). The global
/// carrier phase exp(-i Omega_p t_s) is dropped; it has unit modulus and no
/// observable used here depends on it. Normalization survives the transform
/// because the discrete Parseval identity is exact for these conventions.
template <typename Scalar>
ComplexGrid2D<Scalar> to_time_domain(const ComplexGrid2D<Scalar>& grid) {
  if (grid.domain != GridDomain::Frequency)
    throw DomainError("to_time_domain: input grid is not frequency-domain");
  ComplexGrid2D<Scalar> out;
  out.domain = GridDomain::Time;
  out.axis_plus = detail::conjugate_axis(grid.axis_plus);
  out.axis_minus = detail::conjugate_axis(grid.axis_minus);
  out.values = grid.values;
  detail::centered_dft_plus_axis<Scalar>(out.values, -1);
  detail::centered_dft_minus_axis<Scalar>(out.values, -1);
  out.values *= std::complex<Scalar>(grid.cell_area() / Scalar(two_pi), 0);
  out.normalized = grid.normalized;
  return out;
}

/// Inverse of to_time_domain (exp(+i nu t) kernel, 1/(2pi) prefactor).
template <typename Scalar>
ComplexGrid2D<Scalar> to_frequency_domain(const ComplexGrid2D<Scalar>& grid) {
  if (grid.domain != GridDomain::Time)
    throw DomainError("to_frequency_domain: input grid is not time-domain");
  ComplexGrid2D<Scalar> out;
  out.domain = GridDomain::Frequency;
  out.axis_plus = detail::conjugate_axis(grid.axis_plus);
  out.axis_minus = detail::conjugate_axis(grid.axis_minus);
  out.values = grid.values;
  detail::centered_dft_plus_axis<Scalar>(out.values, +1);
  detail::centered_dft_minus_axis<Scalar>(out.values, +1);
  out.values *= std::complex<Scalar>(grid.cell_area() / Scalar(two_pi), 0);
  out.normalized = grid.normalized;
  return out;
}

}  // namespace biphoton
