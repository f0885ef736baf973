#pragma once

#include <cmath>

// Unit conventions used throughout: time in fs, angular frequency in rad/fs,
// crystal length in mm, wavelength in nm. All conversions go through the
// speed of light in nm/fs so that every constant of interest is O(1)-O(1000).

namespace biphoton {

inline constexpr double speed_of_light_nm_fs = 299.792458;
inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Angular frequency (rad/fs) of light with the given vacuum wavelength (nm).
template <typename Scalar>
Scalar angular_frequency(Scalar wavelength_nm) {
  return Scalar(two_pi) * Scalar(speed_of_light_nm_fs) / wavelength_nm;
}

/// Vacuum wavelength (nm) for the given angular frequency (rad/fs).
template <typename Scalar>
Scalar wavelength(Scalar angular_frequency_rad_fs) {
  return Scalar(two_pi) * Scalar(speed_of_light_nm_fs) / angular_frequency_rad_fs;
}

/// sin(x)/x with the 0/0 limit handled by a series branch for |x| < 1e-4.
template <typename Scalar>
Scalar sinc(Scalar x) {
  const Scalar ax = std::abs(x);
  if (ax < Scalar(1e-4)) {
    const Scalar x2 = x * x;
    return Scalar(1) - x2 / Scalar(6) + x2 * x2 / Scalar(120);
  }
  return std::sin(x) / x;
}

}  // namespace biphoton
