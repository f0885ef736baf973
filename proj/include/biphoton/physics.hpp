#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

// Scalar physics of the source: pump envelope, phase matching, walk-off
// timing and the detection-filter time constant. Everything here is a pure
// function over immutable value types.

namespace biphoton {

/// Pulsed pump described by its central wavelength and the FWHM duration of
/// the *field* envelope. The spectral envelope is exp(-(nu/sigma_p)^2) with
/// sigma_p = 4 sqrt(ln 2) / field_fwhm.
struct PumpSpec {
  double central_wavelength_nm = 266.0;
  double field_fwhm_fs = 153.0;

  double sigma_p() const {
    if (field_fwhm_fs <= 0.0) throw InvalidInputError("PumpSpec: field_fwhm must be > 0");
    return 4.0 * std::sqrt(std::log(2.0)) / field_fwhm_fs;
  }

  /// Central angular frequency Omega_p (rad/fs).
  double omega_p() const {
    if (central_wavelength_nm <= 0.0)
      throw InvalidInputError("PumpSpec: central_wavelength must be > 0");
    return angular_frequency(central_wavelength_nm);
  }

  /// Degenerate down-conversion frequency Omega_p / 2.
  double omega_degenerate() const { return 0.5 * omega_p(); }

  static double field_fwhm_from_sigma(double sigma) {
    return 4.0 * std::sqrt(std::log(2.0)) / sigma;
  }

  bool operator==(const PumpSpec&) const = default;
};

/// Nonlinear crystal: length L (mm), group-velocity mismatch D+ (fs/mm)
/// between the o-polarized photons and the e-polarized pump, and the
/// photons' group-velocity dispersion D'' (fs^2/mm).
struct CrystalSpec {
  double length_mm = 0.13;
  double gvm_fs_per_mm = -570.0;
  double gvd_fs2_per_mm = 855.0;

  void validate() const {
    if (length_mm <= 0.0) throw InvalidInputError("CrystalSpec: length must be > 0");
  }

  bool operator==(const CrystalSpec&) const = default;
};

/// One timing contribution in the walk-off chain. `delay_fs` is the signed
/// contribution to the net displacement tau between the HH and VV two-photon
/// amplitudes: positive values advance the HH (first-crystal) amplitude
/// relative to the VV one.
struct WalkoffSegment {
  std::string label;
  double delay_fs = 0.0;

  bool operator==(const WalkoffSegment&) const = default;
};

struct WalkoffLedger {
  std::vector<WalkoffSegment> segments;

  bool operator==(const WalkoffLedger&) const = default;
};

/// The crystal-pair timing chain with the segment values the experiment is
/// characterized by. Sums to a 168 fs HH-vs-VV displacement.
inline WalkoffLedger default_walkoff_ledger() {
  return WalkoffLedger{{
      {"crystal1 pump birefringence (H pump lags V pump)", 61.0},
      {"crystal1 photon advance vs V pump", 74.0},
      {"crystal2 HH photon group advance vs H pump", 107.0},
      {"crystal2 VV photon advance vs H pump", -74.0},
  }};
}

/// Birefringent pre-compensator delay T_p applied between the pump
/// polarization components; the plate set supports |T_p| <= 350 fs.
struct PrecompensatorSpec {
  double delay_tp_fs = 0.0;
  static constexpr double max_abs_delay_fs = 350.0;

  void validate() const {
    if (std::abs(delay_tp_fs) > max_abs_delay_fs)
      throw RangeError("PrecompensatorSpec: |Tp| exceeds the 350 fs plate-set range");
  }

  bool operator==(const PrecompensatorSpec&) const = default;
};

/// Gaussian pump spectral envelope alpha(nu+) = exp(-(nu+/sigma_p)^2).
template <typename Scalar>
Scalar pump_envelope(Scalar nu_plus, const PumpSpec& pump) {
  const Scalar s = Scalar(pump.sigma_p());
  const Scalar r = nu_plus / s;
  return std::exp(-r * r);
}

/// Phase mismatch Delta = D+ (nu_s + nu_i) + D''/4 (nu_s - nu_i)^2, rad/mm.
template <typename Scalar>
Scalar phase_mismatch(Scalar nu_s, Scalar nu_i, const CrystalSpec& crystal) {
  const Scalar sum = nu_s + nu_i;
  const Scalar diff = nu_s - nu_i;
  return Scalar(crystal.gvm_fs_per_mm) * sum +
         Scalar(0.25) * Scalar(crystal.gvd_fs2_per_mm) * diff * diff;
}

/// Longitudinal phase-matching amplitude sinc(Delta L / 2).
template <typename Scalar>
Scalar phase_matching(Scalar nu_s, Scalar nu_i, const CrystalSpec& crystal) {
  crystal.validate();
  return sinc(phase_mismatch(nu_s, nu_i, crystal) * Scalar(0.5) * Scalar(crystal.length_mm));
}

/// Normalized field autocorrelation of the Gaussian pump envelope: a
/// Gaussian in T with FWHM sqrt(2) * field_fwhm, equal to 1 at T = 0.
template <typename Scalar>
Scalar pump_autocorrelation(Scalar delay_fs, const PumpSpec& pump) {
  const Scalar st = Scalar(pump.sigma_p()) * delay_fs;
  return std::exp(-st * st / Scalar(8));
}

/// Net signed HH-vs-VV displacement tau (fs) of the two-photon amplitudes.
inline double walkoff_delay(const WalkoffLedger& ledger) {
  if (ledger.segments.empty())
    throw InvalidInputError("walkoff_delay: ledger has no segments");
  double tau = 0.0;
  for (const auto& seg : ledger.segments) tau += seg.delay_fs;
  return tau;
}

/// Residual displacement T = tau - T_p after pre-compensation.
inline double effective_delay(double tau_fs, const PrecompensatorSpec& precomp) {
  precomp.validate();
  return tau_fs - precomp.delay_tp_fs;
}

/// FWHM temporal width (fs) of a filter's amplitude response, using the same
/// Gaussian convention as the pump envelope: dt = 8 ln 2 * lambda^2 / (2 pi c dlambda).
/// `bandwidth_nm` is the intensity-FWHM bandwidth of the filter.
inline double filter_time_constant(double bandwidth_nm, double center_nm) {
  if (bandwidth_nm <= 0.0 || center_nm <= 0.0)
    throw InvalidInputError("filter_time_constant: bandwidth and center must be > 0");
  const double dnu = two_pi * speed_of_light_nm_fs * bandwidth_nm / (center_nm * center_nm);
  return 8.0 * std::log(2.0) / dnu;
}

}  // namespace biphoton
