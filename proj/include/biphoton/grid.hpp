#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/physics.hpp"

// Uniform 2D complex grids over the (nu+, nu-) frequency variables or their
// conjugate (t+, t-) time variables, plus the 1D curve type the width
// measurements operate on.

namespace biphoton {

enum class GridDomain { Frequency, Time };

/// Uniformly sampled axis: value(i) = min + i * step, i in [0, count).
template <typename Scalar>
struct Axis {
  Scalar min = Scalar(0);
  Scalar step = Scalar(1);
  Eigen::Index count = 0;

  Scalar value(Eigen::Index i) const { return min + Scalar(i) * step; }
  Scalar span() const { return step * Scalar(count); }

  /// Centered FFT axis with N samples and full width `span`: values
  /// (i - N/2) * span / N. N must be even.
  static Axis centered(Scalar span, Eigen::Index n) {
    const Scalar d = span / Scalar(n);
    return Axis{-d * Scalar(n / 2), d, n};
  }

  Eigen::Array<Scalar, Eigen::Dynamic, 1> values() const {
    Eigen::Array<Scalar, Eigen::Dynamic, 1> v(count);
    for (Eigen::Index i = 0; i < count; ++i) v[i] = value(i);
    return v;
  }
};

/// Sampling request for the joint-amplitude grid. Counts must be powers of
/// two (>= 64); spans are the full widths of the nu+ / nu- axes in rad/fs.
struct GridSpec {
  Eigen::Index n_plus = 1024;
  Eigen::Index n_minus = 1024;
  double span_plus = 0.35;
  double span_minus = 3.0;

  static bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

  void validate() const {
    if (!is_pow2(n_plus) || !is_pow2(n_minus) || n_plus < 64 || n_minus < 64)
      throw InvalidInputError("GridSpec: sample counts must be powers of two >= 64");
    if (span_plus <= 0.0 || span_minus <= 0.0)
      throw InvalidInputError("GridSpec: spans must be > 0");
  }

  /// Resolution warnings relative to the physics the grid must hold: the nu+
  /// axis should cover +-4 sigma_p and the nu- axis both first
  /// phase-matching zeros at +-sqrt(8 pi / (D'' L)).
  std::vector<std::string> resolution_warnings(const PumpSpec& pump,
                                               const CrystalSpec& crystal) const {
    std::vector<std::string> warnings;
    if (span_plus < 8.0 * pump.sigma_p())
      warnings.push_back("grid: span_plus < 8 sigma_p; nu+ support is clipped");
    const double dl = std::abs(crystal.gvd_fs2_per_mm) * crystal.length_mm;
    if (dl > 0.0) {
      const double first_zero = std::sqrt(8.0 * M_PI / dl);
      if (span_minus < 2.0 * first_zero)
        warnings.push_back("grid: span_minus < 2x first phase-matching zero; nu- support is clipped");
    }
    return warnings;
  }

  bool operator==(const GridSpec&) const = default;
};

/// Complex amplitude sampled on a uniform (plus, minus) grid. Values are
/// indexed (i_plus, j_minus) and serialized with the plus coordinate as the
/// outer (row) index. `normalized` marks grids whose discrete power
/// sum(|v|^2) * cell_area equals 1.
template <typename Scalar>
struct ComplexGrid2D {
  using Complex = std::complex<Scalar>;
  using Values =
      Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  GridDomain domain = GridDomain::Frequency;
  Axis<Scalar> axis_plus;
  Axis<Scalar> axis_minus;
  Values values;
  bool normalized = false;

  Eigen::Index n_plus() const { return values.rows(); }
  Eigen::Index n_minus() const { return values.cols(); }
  Scalar cell_area() const { return axis_plus.step * axis_minus.step; }

  /// Discrete power: sum(|values|^2) * cell area.
  Scalar total_power() const {
    return values.abs2().sum() * cell_area();
  }
};

using Grid = ComplexGrid2D<double>;

/// Sampled real curve with uniform x axis.
template <typename Scalar>
struct Curve1D {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> x;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> y;
  std::string x_unit;
  std::string y_unit;
};

using Curve = Curve1D<double>;

/// Linear-interpolated full width at half of the curve maximum. Requires
/// half-max crossings on both sides of the (first) maximum.
template <typename Scalar>
Scalar fwhm(const Curve1D<Scalar>& curve) {
  const auto& y = curve.y;
  const auto& x = curve.x;
  if (y.size() < 3 || y.size() != x.size())
    throw InvalidInputError("fwhm: need at least 3 samples with matching x");
  Eigen::Index peak = 0;
  y.maxCoeff(&peak);
  const Scalar half = y[peak] / Scalar(2);

  Eigen::Index li = -1;
  for (Eigen::Index i = peak; i-- > 0;) {
    if (y[i] < half) { li = i; break; }
  }
  Eigen::Index ri = -1;
  for (Eigen::Index i = peak + 1; i < y.size(); ++i) {
    if (y[i] < half) { ri = i; break; }
  }
  if (li < 0 || ri < 0)
    throw NotMeasurableError("fwhm: no half-max crossing on both sides of the peak");

  const Scalar xl =
      x[li] + (half - y[li]) * (x[li + 1] - x[li]) / (y[li + 1] - y[li]);
  const Scalar xr =
      x[ri - 1] + (half - y[ri - 1]) * (x[ri] - x[ri - 1]) / (y[ri] - y[ri - 1]);
  return xr - xl;
}

}  // namespace biphoton
