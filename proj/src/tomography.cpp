#include "biphoton/tomography.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

// Maximum-likelihood reconstruction: Poisson likelihood over
// mu_k = s * p_k(rho) + background, with rho = G'G / tr(G'G) for a
// lower-triangular G (16 real parameters) and log s as a 17th parameter.
// Positivity, Hermiticity and unit trace hold for every parameter value, so
// the reconstruction is physical regardless of the counts. The ascent is a
// damped Newton step on the expected (Fisher) information with explicit
// accept/reject, which keeps the likelihood non-decreasing.

namespace biphoton {
namespace {

constexpr int kNumParams = 17;  // 16 for G, 1 for log-scale
using ParamVector = Eigen::Matrix<double, kNumParams, 1>;

// lower-triangular off-diagonal index order
constexpr std::array<std::pair<int, int>, 6> kLowerIdx = {
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

Matrix4c g_from_params(const ParamVector& p) {
  Matrix4c g = Matrix4c::Zero();
  for (int d = 0; d < 4; ++d) g(d, d) = p[d];
  for (int k = 0; k < 6; ++k) {
    const auto [r, c] = kLowerIdx[k];
    g(r, c) = complexd(p[4 + 2 * k], p[5 + 2 * k]);
  }
  return g;
}

ParamVector params_from_g(const Matrix4c& g, double log_scale) {
  ParamVector p;
  for (int d = 0; d < 4; ++d) p[d] = g(d, d).real();
  for (int k = 0; k < 6; ++k) {
    const auto [r, c] = kLowerIdx[k];
    p[4 + 2 * k] = g(r, c).real();
    p[5 + 2 * k] = g(r, c).imag();
  }
  p[16] = log_scale;
  return p;
}

struct Model {
  std::array<Eigen::Vector4cd, 16> kets;
  std::array<double, 16> counts;
  std::array<double, 16> background;

  explicit Model(const CountRecord& record) {
    const auto pairs = projection_set();
    for (int k = 0; k < 16; ++k) {
      const auto k1 = analyzer_ket(pairs[k].arm1);
      const auto k2 = analyzer_ket(pairs[k].arm2);
      kets[k] << k1[0] * k2[0], k1[0] * k2[1], k1[1] * k2[0], k1[1] * k2[1];
      counts[k] = double(record.entries[k].counts);
      background[k] = record.background_rate_cps * record.entries[k].duration_s;
    }
  }

  double log_likelihood(const ParamVector& p) const {
    const Matrix4c g = g_from_params(p);
    const double s = std::exp(p[16]);
    const double norm = g.squaredNorm();
    double ll = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double a = (g * kets[k]).squaredNorm();
      const double mu = std::max(s * a / norm + background[k], 1e-300);
      ll += (counts[k] > 0.0 ? counts[k] * std::log(mu) : 0.0) - mu;
    }
    return ll;
  }

  // gradient of ll and the expected information matrix
  void derivatives(const ParamVector& p, ParamVector& grad,
                   Eigen::Matrix<double, kNumParams, kNumParams>& fisher) const {
    const Matrix4c g = g_from_params(p);
    const double s = std::exp(p[16]);
    const double norm = g.squaredNorm();

    // d norm / d theta_t
    ParamVector dnorm = ParamVector::Zero();
    for (int d = 0; d < 4; ++d) dnorm[d] = 2.0 * g(d, d).real();
    for (int k = 0; k < 6; ++k) {
      const auto [r, c] = kLowerIdx[k];
      dnorm[4 + 2 * k] = 2.0 * g(r, c).real();
      dnorm[5 + 2 * k] = 2.0 * g(r, c).imag();
    }

    grad.setZero();
    fisher.setZero();
    for (int k = 0; k < 16; ++k) {
      const Eigen::Vector4cd w = g * kets[k];
      const double a = w.squaredNorm();
      const double mu = std::max(s * a / norm + background[k], 1e-300);

      ParamVector dmu;
      for (int d = 0; d < 4; ++d) {
        const double da = 2.0 * (std::conj(w[d]) * kets[k][d]).real();
        dmu[d] = s * (da * norm - a * dnorm[d]) / (norm * norm);
      }
      for (int t = 0; t < 6; ++t) {
        const auto [r, c] = kLowerIdx[t];
        const complexd z = std::conj(w[r]) * kets[k][c];
        const double da_re = 2.0 * z.real();
        const double da_im = -2.0 * z.imag();
        dmu[4 + 2 * t] = s * (da_re * norm - a * dnorm[4 + 2 * t]) / (norm * norm);
        dmu[5 + 2 * t] = s * (da_im * norm - a * dnorm[5 + 2 * t]) / (norm * norm);
      }
      dmu[16] = s * a / norm;

      grad += (counts[k] / mu - 1.0) * dmu;
      fisher += (dmu * dmu.transpose()) / mu;
    }
  }
};

struct RunResult {
  ParamVector params;
  double ll = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

RunResult maximize(const Model& model, const Matrix4c& g0, double log_scale0,
                   const MLESettings& settings) {
  RunResult run;
  ParamVector p = params_from_g(g0, log_scale0);
  double ll = model.log_likelihood(p);
  run.trace.push_back(ll);
  double lambda = 1e-3;

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    ParamVector grad;
    Eigen::Matrix<double, kNumParams, kNumParams> fisher;
    model.derivatives(p, grad, fisher);

    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::Matrix<double, kNumParams, kNumParams> damped = fisher;
      damped.diagonal() += lambda * fisher.diagonal().cwiseMax(1e-12);
      const ParamVector step = damped.ldlt().solve(grad);
      ParamVector cand = p + step;
      // gauge: keep G at unit Frobenius norm (rho and mu are invariant)
      Matrix4c gc = g_from_params(cand);
      const double n = gc.norm();
      if (n > 0.0) {
        gc /= n;
        cand = params_from_g(gc, cand[16]);
      }
      const double cll = model.log_likelihood(cand);
      if (cll >= ll) {
        const double dp = (cand - p).cwiseAbs().maxCoeff();
        p = cand;
        ll = cll;
        run.trace.push_back(ll);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (dp < settings.tolerance) {
          run.converged = true;
        }
      } else {
        lambda *= 8.0;
        if (lambda > 1e15) break;
      }
    }
    run.iterations = iter + 1;
    if (run.converged || !accepted) {
      if (!accepted) run.converged = true;  // no improving step exists numerically
      break;
    }
  }
  run.params = p;
  run.ll = ll;
  return run;
}

}  // namespace

namespace detail {

Matrix4c linear_inversion(const CountRecord& record) {
  record.validate();
  // sigma_mu = sum_a c[mu][a] Pi_a with a in (H, V, D, L)
  constexpr double c[4][4] = {{1, 1, 0, 0},    // I
                              {-1, -1, 2, 0},  // X
                              {-1, -1, 0, 2},  // Y
                              {1, -1, 0, 0}};  // Z
  Eigen::Matrix2cd pauli[4];
  pauli[0] = Eigen::Matrix2cd::Identity();
  pauli[1] << 0, 1, 1, 0;
  pauli[2] << 0, complexd(0, -1), complexd(0, 1), 0;
  pauli[3] << 1, 0, 0, -1;

  // relative frequencies; the basis block (H/V x H/V) carries the scale
  double phat[4][4];
  double scale = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto& e = record.entries[4 * a + b];
      phat[a][b] = double(e.counts) - record.background_rate_cps * e.duration_s;
      if (a < 2 && b < 2) scale += phat[a][b];
    }
  scale = std::max(scale, 1e-9);
  for (auto& row : phat)
    for (double& v : row) v /= scale;

  Matrix4c rho = Matrix4c::Zero();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double expect = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) expect += c[mu][a] * c[nu][b] * phat[a][b];
      Matrix4c op;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              op(2 * i + k, 2 * j + l) = pauli[mu](i, j) * pauli[nu](k, l);
      rho += 0.25 * expect * op;
    }
  return rho;
}

Matrix4c project_to_physical(const Matrix4c& rho) {
  const Matrix4c herm = 0.5 * (rho + rho.adjoint());
  const Eigen::SelfAdjointEigenSolver<Matrix4c> es(herm);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const double tr = ev.sum();
  if (!(tr > 0.0)) return Matrix4c::Identity() / 4.0;
  ev /= tr;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

MleResult mle_reconstruct(const CountRecord& record, const MLESettings& settings) {
  settings.validate();
  record.validate();
  const Model model(record);

  // scale seed: the (H/V x H/V) settings partition unity
  double raw_total = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const auto& e = record.entries[4 * a + b];
      raw_total += double(e.counts) - record.background_rate_cps * e.duration_s;
    }
  const double scale0 = std::max(raw_total, 1.0);

  const Matrix4c rho0 = detail::project_to_physical(detail::linear_inversion(record));

  RunResult best;
  for (int r = 0; r < settings.restarts; ++r) {
    const double wmix = double(r) / double(settings.restarts);
    Matrix4c mixed = (1.0 - wmix) * rho0 + wmix * Matrix4c::Identity() / 4.0;
    mixed += 1e-9 * Matrix4c::Identity();
    mixed /= mixed.trace().real();
    // lower-triangular G with G'G = mixed: Cholesky of the index-reversed
    // matrix, adjoint, reversed back
    const Eigen::LLT<Matrix4c> llt(Matrix4c(mixed.reverse()));
    Matrix4c g0 = Matrix4c(llt.matrixL()).adjoint().reverse();
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) g0(i, j) = 0.0;  // scrub rounding strays
      if (g0(i, i).real() < 0.0) g0.row(i) = -g0.row(i);
    }
    g0 /= g0.norm();

    RunResult run = maximize(model, g0, std::log(scale0), settings);
    if (run.ll > best.ll) best = run;
  }

  MleResult result;
  const Matrix4c g = g_from_params(best.params);
  Matrix4c rho = (g.adjoint() * g);
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());  // scrub rounding asymmetry
  result.rho = rho;
  result.log_likelihood = best.ll;
  result.iterations = best.iterations;
  result.converged = best.converged;
  result.likelihood_trace = std::move(best.trace);
  return result;
}

}  // namespace biphoton
