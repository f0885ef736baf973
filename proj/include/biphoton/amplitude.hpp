#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/fourier.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/physics.hpp"

// Construction of the joint two-photon amplitude on the (nu+, nu-) grid,
// normalization, and the single-arm marginal spectra.

namespace biphoton {

enum class Arm { Signal, Idler };

/// Joint amplitude psi(nu+, nu-) = alpha(nu+) sinc(Delta L / 2) sampled on
/// the requested grid, with nu_s = (nu+ + nu-)/2 and nu_i = (nu+ - nu-)/2.
/// The overall constant of the perturbative amplitude is never materialized;
/// every observable downstream uses normalized amplitudes. The result is
/// real-valued (both factors are real).
///
/// With `strict`, an under-resolved grid raises ResolutionError instead of
/// attaching warnings to `warnings_out`.
template <typename Scalar>
ComplexGrid2D<Scalar> build_joint_amplitude(const PumpSpec& pump,
                                            const CrystalSpec& crystal,
                                            const GridSpec& grid,
                                            bool strict = false,
                                            std::vector<std::string>* warnings_out = nullptr) {
  grid.validate();
  crystal.validate();
  auto warnings = grid.resolution_warnings(pump, crystal);
  if (!warnings.empty() && strict)
    throw ResolutionError("build_joint_amplitude (strict): " + warnings.front());
  if (warnings_out)
    warnings_out->insert(warnings_out->end(), warnings.begin(), warnings.end());

  ComplexGrid2D<Scalar> out;
  out.domain = GridDomain::Frequency;
  out.axis_plus = Axis<Scalar>::centered(Scalar(grid.span_plus), grid.n_plus);
  out.axis_minus = Axis<Scalar>::centered(Scalar(grid.span_minus), grid.n_minus);
  out.values.resize(grid.n_plus, grid.n_minus);

  for (Eigen::Index i = 0; i < grid.n_plus; ++i) {
    const Scalar nu_plus = out.axis_plus.value(i);
    const Scalar alpha = pump_envelope(nu_plus, pump);
    for (Eigen::Index j = 0; j < grid.n_minus; ++j) {
      const Scalar nu_minus = out.axis_minus.value(j);
      const Scalar nu_s = Scalar(0.5) * (nu_plus + nu_minus);
      const Scalar nu_i = Scalar(0.5) * (nu_plus - nu_minus);
      out.values(i, j) = alpha * phase_matching(nu_s, nu_i, crystal);
    }
  }
  return out;
}

/// Scale the grid so its discrete power sum(|v|^2) * cell_area equals 1.
/// Idempotent; an all-zero grid is rejected.
template <typename Scalar>
ComplexGrid2D<Scalar> normalize(const ComplexGrid2D<Scalar>& grid) {
  const Scalar power = grid.total_power();
  if (!(power > Scalar(0)))
    throw DegenerateInputError("normalize: grid has no power");
  ComplexGrid2D<Scalar> out = grid;
  out.values *= std::complex<Scalar>(Scalar(1) / std::sqrt(power), 0);
  out.normalized = true;
  return out;
}

/// Marginal intensity of one arm: I(nu_obs) = int |psi|^2 dnu_unobs,
/// integrated along the grid line of constant observed detuning and sampled
/// on a uniform wavelength axis lambda = 2 pi c / (Omega_p/2 + nu_obs), peak
/// normalized to 1. The detuning axis is relabeled exactly; no Jacobian
/// reweighting is applied.
template <typename Scalar>
Curve1D<Scalar> marginal_spectrum(const ComplexGrid2D<Scalar>& grid, Arm arm,
                                  const PumpSpec& pump) {
  if (grid.domain != GridDomain::Frequency)
    throw DomainError("marginal_spectrum: input grid is not frequency-domain");

  const Scalar omega0 = Scalar(pump.omega_degenerate());
  const Scalar half_span = Scalar(0.25) * grid.axis_minus.span();
  const Eigen::Index n_out = grid.n_minus();
  const Scalar lam_min = Scalar(two_pi * speed_of_light_nm_fs) / (omega0 + half_span);
  const Scalar lam_max = Scalar(two_pi * speed_of_light_nm_fs) / (omega0 - half_span);

  Curve1D<Scalar> curve;
  curve.x.resize(n_out);
  curve.y.resize(n_out);
  curve.x_unit = "nm";
  curve.y_unit = "relative intensity";

  const auto& ap = grid.axis_plus;
  const auto& am = grid.axis_minus;
  for (Eigen::Index k = 0; k < n_out; ++k) {
    const Scalar lam = lam_min + (lam_max - lam_min) * Scalar(k) / Scalar(n_out - 1);
    const Scalar nu_obs = Scalar(two_pi * speed_of_light_nm_fs) / lam - omega0;
    Scalar acc = Scalar(0);
    for (Eigen::Index i = 0; i < grid.n_plus(); ++i) {
      const Scalar nu_plus = ap.value(i);
      // fixed nu_s: nu- = 2 nu_s - nu+; fixed nu_i: nu- = nu+ - 2 nu_i
      const Scalar nu_minus = (arm == Arm::Signal) ? Scalar(2) * nu_obs - nu_plus
                                                   : nu_plus - Scalar(2) * nu_obs;
      const Scalar pos = (nu_minus - am.min) / am.step;
      const Eigen::Index j0 = static_cast<Eigen::Index>(std::floor(pos));
      if (j0 < 0 || j0 + 1 >= grid.n_minus()) continue;
      const Scalar frac = pos - Scalar(j0);
      const Scalar v0 = std::norm(grid.values(i, j0));
      const Scalar v1 = std::norm(grid.values(i, j0 + 1));
      acc += v0 + (v1 - v0) * frac;
    }
    curve.y[k] = acc * ap.step;
    curve.x[k] = lam;
  }

  const Scalar peak = curve.y.maxCoeff();
  if (!(peak > Scalar(0)))
    throw DegenerateInputError("marginal_spectrum: spectrum has no power");
  curve.y /= peak;
  return curve;
}

}  // namespace biphoton
