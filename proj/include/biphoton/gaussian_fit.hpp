#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/grid.hpp"

// Least-squares fit of A exp(-4 ln2 (x - x0)^2 / w^2): deterministic
// log-domain weighted linear initialization followed by damped (LM-style)
// refinement. No stochastic elements anywhere in the path.

namespace biphoton {

struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;
  double fwhm = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct GaussianFitOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;  // on parameter steps, relative to their scales
};

namespace detail {

inline double gaussian_model(double x, double a, double x0, double w) {
  const double u = (x - x0) / w;
  return a * std::exp(-4.0 * std::log(2.0) * u * u);
}

// Weighted quadratic fit of log y (weights y^2); returns false when the
// curvature has the wrong sign (flat or non-peaked data).
inline bool log_quadratic_init(const Curve1D<double>& c, double& a, double& x0, double& w) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  const double ymax = c.y.maxCoeff();
  if (!(ymax > 0.0)) return false;
  int used = 0;
  for (Eigen::Index i = 0; i < c.x.size(); ++i) {
    const double y = c.y[i];
    if (y <= ymax * 1e-6) continue;
    const double lw = y * y;
    const double x = c.x[i];
    const Eigen::Vector3d basis(1.0, x, x * x);
    m += lw * basis * basis.transpose();
    rhs += lw * std::log(y) * basis;
    ++used;
  }
  if (used < 5) return false;
  const Eigen::Vector3d coef = m.ldlt().solve(rhs);
  if (!(coef[2] < 0.0)) return false;
  x0 = -coef[1] / (2.0 * coef[2]);
  w = std::sqrt(-4.0 * std::log(2.0) / coef[2]);
  a = std::exp(coef[0] - coef[1] * coef[1] / (4.0 * coef[2]));
  return std::isfinite(a) && std::isfinite(x0) && std::isfinite(w);
}

}  // namespace detail

inline GaussianFit gaussian_fit(const Curve1D<double>& curve,
                                const GaussianFitOptions& options = {}) {
  if (curve.x.size() < 5 || curve.x.size() != curve.y.size())
    throw InvalidInputError("gaussian_fit: need at least 5 samples");

  double a, x0, w;
  if (!detail::log_quadratic_init(curve, a, x0, w)) {
    // fall back to direct peak/width measurement
    Eigen::Index peak = 0;
    const double ymax = curve.y.maxCoeff(&peak);
    try {
      w = fwhm(curve);
    } catch (const NotMeasurableError&) {
      throw FitFailureError("gaussian_fit: degenerate curve (no peak width to start from)");
    }
    a = ymax;
    x0 = curve.x[peak];
  }

  const Eigen::Index n = curve.x.size();
  auto rss_of = [&](double pa, double px, double pw) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = detail::gaussian_model(curve.x[i], pa, px, pw) - curve.y[i];
      s += r * r;
    }
    return s;
  };

  double rss = rss_of(a, x0, w);
  double lambda = 1e-3;
  int iter = 0;
  bool converged = false;
  const double c4 = 4.0 * std::log(2.0);

  for (; iter < options.max_iterations; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = curve.x[i];
      const double u = (x - x0) / w;
      const double e = std::exp(-c4 * u * u);
      const double f = a * e;
      const Eigen::Vector3d jac(e, f * 2.0 * c4 * u / w, f * 2.0 * c4 * u * u / w);
      jtj += jac * jac.transpose();
      jtr += jac * (f - curve.y[i]);
    }

    bool accepted = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
      const double na = a + step[0], nx = x0 + step[1], nw = w + step[2];
      const double nrss = (nw != 0.0) ? rss_of(na, nx, nw) : rss + 1.0;
      if (nrss <= rss) {
        const double ws = std::abs(w) + 1e-300;
        const bool small = std::abs(step[0]) <= options.tolerance * (std::abs(a) + 1e-300) &&
                           std::abs(step[1]) <= options.tolerance * ws &&
                           std::abs(step[2]) <= options.tolerance * ws;
        a = na; x0 = nx; w = nw; rss = nrss;
        lambda = std::max(lambda / 3.0, 1e-14);
        accepted = true;
        if (small) converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (converged) break;
    if (!accepted) {
      // stalled: the step is below numerical resolution
      converged = true;
      break;
    }
  }

  if (!converged)
    throw FitFailureError("gaussian_fit: no convergence after " +
                          std::to_string(options.max_iterations) +
                          " iterations (rss=" + std::to_string(rss) + ")");

  GaussianFit fit;
  fit.amplitude = a;
  fit.center = x0;
  fit.fwhm = std::abs(w);
  fit.rms_residual = std::sqrt(rss / double(n));
  fit.iterations = iter + 1;
  fit.converged = converged;
  return fit;
}

}  // namespace biphoton
