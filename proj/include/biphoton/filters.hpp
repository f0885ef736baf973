#pragma once

#include <cmath>
#include <complex>

#include "biphoton/errors.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/physics.hpp"
#include "biphoton/units.hpp"

// Detection interference filters: zero-phase Gaussian amplitude responses,
// unit-normalized in intensity, applied pointwise to the joint amplitude.

namespace biphoton {

/// Gaussian interference filter. `bandwidth_fwhm_nm` is the intensity FWHM
/// of |F|^2 (the vendor convention); the amplitude profile is the square
/// root of that Gaussian.
struct FilterSpec {
  double center_nm = 532.0;
  double bandwidth_fwhm_nm = 8.0;

  void validate() const {
    if (bandwidth_fwhm_nm <= 0.0 || center_nm <= 0.0)
      throw InvalidInputError("FilterSpec: center and bandwidth must be > 0");
  }

  /// Intensity-FWHM bandwidth in rad/fs.
  double bandwidth_rad_fs() const {
    validate();
    return two_pi * speed_of_light_nm_fs * bandwidth_fwhm_nm / (center_nm * center_nm);
  }

  bool operator==(const FilterSpec&) const = default;
};

/// Amplitude response F(nu) at detuning nu (rad/fs from the degenerate
/// frequency Omega_p/2): a zero-phase Gaussian centered on the filter's
/// center wavelength and normalized so int |F|^2 dnu = 1.
template <typename Scalar>
std::complex<Scalar> filter_response(Scalar nu, const FilterSpec& filter,
                                     const PumpSpec& pump) {
  const Scalar dnu = Scalar(filter.bandwidth_rad_fs());
  const Scalar center =
      Scalar(angular_frequency(filter.center_nm)) - Scalar(pump.omega_degenerate());
  const Scalar ln2 = Scalar(std::log(2.0));
  // |F|^2 = sqrt(4 ln2 / (pi dnu^2)) exp(-4 ln2 (nu-c)^2 / dnu^2)
  const Scalar norm = std::pow(Scalar(4) * ln2 / (Scalar(M_PI) * dnu * dnu), Scalar(0.25));
  const Scalar r = (nu - center) / dnu;
  return {norm * std::exp(-Scalar(2) * ln2 * r * r), Scalar(0)};
}

/// Pointwise product Psi(nu_s, nu_i) F_s(nu_s) F_i(nu_i) evaluated on the
/// (nu+, nu-) grid through the +- variable mapping. The output is marked
/// unnormalized. Filters narrower than 3 grid cells (as sampled along the
/// diagonal lines of constant nu_s / nu_i) are rejected.
template <typename Scalar>
ComplexGrid2D<Scalar> apply_filters(const ComplexGrid2D<Scalar>& grid,
                                    const FilterSpec& f_s, const FilterSpec& f_i,
                                    const PumpSpec& pump) {
  if (grid.domain != GridDomain::Frequency)
    throw DomainError("apply_filters: input grid is not frequency-domain");
  f_s.validate();
  f_i.validate();

  // One step along either grid axis moves nu_s and nu_i by half a cell.
  const Scalar arm_step =
      Scalar(0.5) * std::max(std::abs(grid.axis_plus.step), std::abs(grid.axis_minus.step));
  const Scalar min_bw = Scalar(std::min(f_s.bandwidth_rad_fs(), f_i.bandwidth_rad_fs()));
  if (min_bw < Scalar(3) * arm_step)
    throw ResolutionError("apply_filters: filter bandwidth narrower than 3 grid cells");

  ComplexGrid2D<Scalar> out = grid;
  out.normalized = false;
  for (Eigen::Index i = 0; i < grid.n_plus(); ++i) {
    const Scalar nu_plus = grid.axis_plus.value(i);
    for (Eigen::Index j = 0; j < grid.n_minus(); ++j) {
      const Scalar nu_minus = grid.axis_minus.value(j);
      const Scalar nu_s = Scalar(0.5) * (nu_plus + nu_minus);
      const Scalar nu_i = Scalar(0.5) * (nu_plus - nu_minus);
      out.values(i, j) *= filter_response(nu_s, f_s, pump) * filter_response(nu_i, f_i, pump);
    }
  }
  return out;
}

}  // namespace biphoton
