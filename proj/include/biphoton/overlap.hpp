#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/fourier.hpp"
#include "biphoton/grid.hpp"

// The delay-dependent overlap v(T) = iint psi_hat(t+ + T, t-) psi_hat*(t+, t-)
// dt+ dt- of the displaced two-photon amplitudes, which sets the coherence of
// the effective polarization state.

namespace biphoton {

/// |v(T)| samples with the filter provenance they were computed under.
struct VCurve {
  std::vector<double> delay_fs;
  std::vector<double> v_mag;
  std::string provenance = "unfiltered";
};

namespace detail {

// Shared evaluation core. The displaced copy psi_hat(t+ + T, t-) is the
// band-limited (Fourier-shift) interpolant of the grid samples; substituting
// it into the overlap integral and applying the discrete Plancherel identity
// along t+ collapses the double sum to
//   v(T) = (dnu+ dt- / 2pi) sum_m g_m exp(-i nu+_m T),
//   g_m  = sum_j |mu(m, j)|^2,   mu = dt+ x (centered DFT of psi_hat along t+)
// which is exact (no interpolation error) for every real T.
template <typename Scalar>
struct OverlapKernel {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> nu_plus;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> weight;

  explicit OverlapKernel(const ComplexGrid2D<Scalar>& time_grid) {
    if (time_grid.domain != GridDomain::Time)
      throw DomainError("overlap_v: grid is not time-domain");
    if (!time_grid.normalized)
      throw InvalidInputError("overlap_v: grid is not normalized");

    typename ComplexGrid2D<Scalar>::Values mu = time_grid.values;
    centered_dft_plus_axis<Scalar>(mu, +1);
    const Scalar dt_plus = time_grid.axis_plus.step;
    const Scalar dt_minus = time_grid.axis_minus.step;
    const Scalar dnu_plus =
        Scalar(two_pi) / (dt_plus * Scalar(time_grid.n_plus()));

    const Axis<Scalar> nu_axis = conjugate_axis(time_grid.axis_plus);
    nu_plus = nu_axis.values();
    weight.resize(mu.rows());
    const Scalar scale =
        dt_plus * dt_plus * dnu_plus * dt_minus / Scalar(two_pi);
    for (Eigen::Index m = 0; m < mu.rows(); ++m) {
      Scalar g = Scalar(0);
      for (Eigen::Index j = 0; j < mu.cols(); ++j) g += std::norm(mu(m, j));
      weight[m] = g * scale;
    }
  }

  std::complex<Scalar> evaluate(Scalar delay_fs) const {
    std::complex<Scalar> acc(0, 0);
    for (Eigen::Index m = 0; m < weight.size(); ++m) {
      const Scalar phase = -nu_plus[m] * delay_fs;
      acc += weight[m] * std::complex<Scalar>(std::cos(phase), std::sin(phase));
    }
    return acc;
  }
};

}  // namespace detail

/// Overlap of the amplitude displaced by T along t+ with itself. The grid
/// must be normalized; then v(0) = 1 and |v(T)| <= 1 for all T.
template <typename Scalar>
std::complex<Scalar> overlap_v(const ComplexGrid2D<Scalar>& time_grid, Scalar delay_fs) {
  return detail::OverlapKernel<Scalar>(time_grid).evaluate(delay_fs);
}

/// |v(T)| over a delay sweep, evaluated in the time domain.
template <typename Scalar>
VCurve vcurve(const ComplexGrid2D<Scalar>& time_grid,
              const std::vector<Scalar>& delays_fs,
              std::string provenance = "unfiltered") {
  if (delays_fs.empty()) throw InvalidInputError("vcurve: empty delay list");
  const detail::OverlapKernel<Scalar> kernel(time_grid);
  VCurve curve;
  curve.provenance = std::move(provenance);
  curve.delay_fs.reserve(delays_fs.size());
  curve.v_mag.reserve(delays_fs.size());
  for (const Scalar T : delays_fs) {
    curve.delay_fs.push_back(double(T));
    curve.v_mag.push_back(double(std::abs(kernel.evaluate(T))));
  }
  return curve;
}

/// Independent frequency-domain route: by the shift theorem,
/// v(T) = iint |psi(nu+, nu-)|^2 exp(-i nu+ T) dnu+ dnu-. Used as a
/// cross-check against the time-domain evaluation.
template <typename Scalar>
VCurve vcurve_spectral(const ComplexGrid2D<Scalar>& freq_grid,
                       const std::vector<Scalar>& delays_fs,
                       std::string provenance = "unfiltered") {
  if (freq_grid.domain != GridDomain::Frequency)
    throw DomainError("vcurve_spectral: grid is not frequency-domain");
  if (!freq_grid.normalized)
    throw InvalidInputError("vcurve_spectral: grid is not normalized");
  if (delays_fs.empty()) throw InvalidInputError("vcurve_spectral: empty delay list");

  const Eigen::Index np = freq_grid.n_plus();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> marg(np);
  for (Eigen::Index m = 0; m < np; ++m) {
    Scalar acc = Scalar(0);
    for (Eigen::Index l = 0; l < freq_grid.n_minus(); ++l)
      acc += std::norm(freq_grid.values(m, l));
    marg[m] = acc * freq_grid.axis_minus.step;
  }
  const auto nu = freq_grid.axis_plus.values();

  VCurve curve;
  curve.provenance = std::move(provenance);
  for (const Scalar T : delays_fs) {
    std::complex<Scalar> acc(0, 0);
    for (Eigen::Index m = 0; m < np; ++m) {
      const Scalar phase = -nu[m] * T;
      acc += marg[m] * std::complex<Scalar>(std::cos(phase), std::sin(phase));
    }
    curve.delay_fs.push_back(double(T));
    curve.v_mag.push_back(double(std::abs(acc) * freq_grid.axis_plus.step));
  }
  return curve;
}

}  // namespace biphoton
