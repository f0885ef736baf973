#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "biphoton/errors.hpp"

// Two-qubit polarization states in the {HH, HV, VH, VV} basis, the effective
// density matrices produced by the two-crystal superposition, concurrence,
// and the polarization interference pattern P(theta).

namespace biphoton {

using Matrix4c = Eigen::Matrix4cd;
using complexd = std::complex<double>;

/// Validated 4x4 density matrix, basis order (HH, HV, VH, VV).
class TwoQubitState {
 public:
  static constexpr double hermiticity_tol = 1e-12;
  static constexpr double trace_tol = 1e-12;
  static constexpr double psd_tol = 1e-10;

  static TwoQubitState from_matrix(const Matrix4c& rho) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tol)
      throw InvalidStateError("TwoQubitState: matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > trace_tol ||
        std::abs(rho.trace().imag()) > trace_tol)
      throw InvalidStateError("TwoQubitState: trace is not 1");
    const Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
      throw InvalidStateError("TwoQubitState: matrix is not positive semidefinite");
    return TwoQubitState(rho);
  }

  const Matrix4c& matrix() const { return rho_; }

 private:
  explicit TwoQubitState(Matrix4c rho) : rho_(std::move(rho)) {}
  Matrix4c rho_;
};

/// The Bell state (|HH> + |VV>)/sqrt(2) as a ket.
inline Eigen::Vector4cd phi_plus_ket() {
  Eigen::Vector4cd k = Eigen::Vector4cd::Zero();
  k[0] = k[3] = 1.0 / std::sqrt(2.0);
  return k;
}

/// Effective polarization state of the two-crystal source:
/// 1/2 [ |HH><HH| + |VV><VV| + v e^{-i phi} |HH><VV| + v* e^{i phi} |VV><HH| ].
inline TwoQubitState effective_rho(complexd v, double phi_rad) {
  if (std::abs(v) > 1.0 + 1e-12)
    throw InvalidInputError("effective_rho: |v| must be <= 1");
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = rho(3, 3) = 0.5;
  const complexd coh = 0.5 * v * std::exp(complexd(0.0, -phi_rad));
  rho(0, 3) = coh;
  rho(3, 0) = std::conj(coh);
  return TwoQubitState::from_matrix(rho);
}

/// Mixture model (1-v)/2 (|HH><HH| + |VV><VV|) + v |Phi+><Phi+|; identical
/// to effective_rho(v, 0) for real v in [0, 1].
inline TwoQubitState mixed_model_rho(double v) {
  if (v < 0.0 || v > 1.0)
    throw InvalidInputError("mixed_model_rho: v must be in [0, 1]");
  const Eigen::Vector4cd bell = phi_plus_ket();
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = rho(3, 3) = 0.5 * (1.0 - v);
  rho += v * (bell * bell.adjoint());
  return TwoQubitState::from_matrix(rho);
}

/// Wootters concurrence: C = max(0, l1 - l2 - l3 - l4) over the decreasing
/// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy), computed
/// through the Hermitian form sqrt(rho) R sqrt(rho). Eigenvalue noise below
/// 1e-10 is clamped to zero.
inline double concurrence(const TwoQubitState& state) {
  const Matrix4c& rho = state.matrix();
  Matrix4c yy = Matrix4c::Zero();  // sigma_y x sigma_y in the product basis
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;

  const Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const Matrix4c sqrt_rho = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                            es.eigenvectors().adjoint();

  const Matrix4c m = sqrt_rho * yy * rho.conjugate() * yy * sqrt_rho;
  const Eigen::SelfAdjointEigenSolver<Matrix4c> es2((m + m.adjoint()) / 2.0,
                                                    Eigen::EigenvaluesOnly);
  Eigen::Vector4d mu = es2.eigenvalues();
  // eigenvalues at the solver's noise floor would contribute sqrt(noise)
  // after the square root; zero them first
  const double floor = 1e-12 * std::max(mu.maxCoeff(), 0.0);
  for (int i = 0; i < 4; ++i) mu[i] = (mu[i] > floor) ? std::sqrt(mu[i]) : 0.0;
  std::sort(mu.data(), mu.data() + 4, std::greater<double>());
  const double c = mu[0] - mu[1] - mu[2] - mu[3];
  return c > 1e-10 ? c : 0.0;
}

enum class Branch { Plus, Minus };

/// Coincidence probability P(theta) = 1/4 (1 +- v sin 4 theta) for the
/// {L or R} x |theta> analyzer setting, |theta> = cos 2t |H> + i sin 2t |V>.
/// The + branch corresponds to the circular analyzer fixed to |R>.
inline double interference_pattern(double v, double theta_rad, Branch branch) {
  if (v < 0.0 || v > 1.0)
    throw InvalidInputError("interference_pattern: v must be in [0, 1]");
  const double s = (branch == Branch::Plus) ? 1.0 : -1.0;
  return 0.25 * (1.0 + s * v * std::sin(4.0 * theta_rad));
}

enum class BackgroundMode { Subtract, Fit, Ignore };

struct VisibilityResult {
  double v = 0.0;
  double uncertainty = 0.0;
  double offset = 0.0;      // fitted A + B
  double modulation = 0.0;  // fitted A v (signed)
};

struct VisibilityOptions {
  BackgroundMode mode = BackgroundMode::Ignore;
  double background_counts = 0.0;  // per sample, for Subtract / Fit
};

/// Extract v from P(theta)-shaped samples by least squares on
/// y = a + b sin 4 theta, v = |b| / (a - B). Requires >= 8 samples spanning
/// >= 90 degrees. A flat background and the signal offset are not separately
/// identifiable from the pattern alone, so B is taken from the options:
/// Subtract removes it before an unweighted fit, Fit keeps the samples and
/// uses Poisson (1/max(y,1)) weights with B as the known offset, Ignore
/// fits the raw samples with B = 0.
inline VisibilityResult visibility_from_pattern(
    const std::vector<std::pair<double, double>>& samples,
    const VisibilityOptions& options = {}) {
  if (samples.size() < 8)
    throw InvalidInputError("visibility_from_pattern: need at least 8 samples");
  double tmin = samples.front().first, tmax = samples.front().first;
  for (const auto& s : samples) {
    tmin = std::min(tmin, s.first);
    tmax = std::max(tmax, s.first);
  }
  if (tmax - tmin < M_PI / 2.0 - 1e-9)
    throw InvalidInputError("visibility_from_pattern: samples must span >= 90 degrees");

  const double background = (options.mode == BackgroundMode::Ignore)
                                ? 0.0
                                : options.background_counts;
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  for (const auto& [theta, count] : samples) {
    double y = count;
    if (options.mode == BackgroundMode::Subtract) y -= background;
    const double wgt =
        (options.mode == BackgroundMode::Fit) ? 1.0 / std::max(count, 1.0) : 1.0;
    const Eigen::Vector2d basis(1.0, std::sin(4.0 * theta));
    m += wgt * basis * basis.transpose();
    rhs += wgt * y * basis;
  }
  const Eigen::Vector2d coef = m.ldlt().solve(rhs);
  const double a = coef[0];
  const double b = coef[1];
  const double signal = (options.mode == BackgroundMode::Fit) ? a - background : a;
  if (!(std::abs(signal) > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw FitFailureError("visibility_from_pattern: degenerate fit (zero signal level)");

  // residual-based parameter covariance, delta method for v = |b|/signal
  double rss = 0.0;
  for (const auto& [theta, count] : samples) {
    double y = count;
    if (options.mode == BackgroundMode::Subtract) y -= background;
    const double r = a + b * std::sin(4.0 * theta) - y;
    rss += r * r;
  }
  const double dof = double(samples.size()) - 2.0;
  const double s2 = rss / std::max(dof, 1.0);
  const Eigen::Matrix2d cov = s2 * m.inverse();
  const double v = std::abs(b) / signal;
  const double var_v = (v * v) * (cov(1, 1) / std::max(b * b, 1e-300) +
                                  cov(0, 0) / (signal * signal) -
                                  2.0 * ((b >= 0) ? 1.0 : -1.0) * cov(0, 1) /
                                      (std::abs(b) * signal));

  VisibilityResult result;
  result.v = v;
  result.uncertainty = std::sqrt(std::max(var_v, 0.0));
  result.offset = a;
  result.modulation = b;
  return result;
}

}  // namespace biphoton
