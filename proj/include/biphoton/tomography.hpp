#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "biphoton/density_matrix.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/rng.hpp"

// Simulated 16-projector coincidence tomography with Poisson counting noise
// and maximum-likelihood reconstruction over physical states.

namespace biphoton {

enum class AnalyzerState { H, V, D, L };

inline const char* analyzer_letter(AnalyzerState s) {
  switch (s) {
    case AnalyzerState::H: return "H";
    case AnalyzerState::V: return "V";
    case AnalyzerState::D: return "D";
    case AnalyzerState::L: return "L";
  }
  return "?";
}

inline AnalyzerState analyzer_from_letter(char c) {
  switch (c) {
    case 'H': return AnalyzerState::H;
    case 'V': return AnalyzerState::V;
    case 'D': return AnalyzerState::D;
    case 'L': return AnalyzerState::L;
  }
  throw InvalidInputError(std::string("unknown analyzer state '") + c + "'");
}

/// Single-qubit analyzer ket: |D> = (|H>+|V>)/sqrt2, |L> = (|H>+i|V>)/sqrt2.
inline Eigen::Vector2cd analyzer_ket(AnalyzerState s) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (s) {
    case AnalyzerState::H: return {1.0, 0.0};
    case AnalyzerState::V: return {0.0, 1.0};
    case AnalyzerState::D: return {r, r};
    case AnalyzerState::L: return {r, complexd(0.0, r)};
  }
  return {1.0, 0.0};
}

struct ProjectorPair {
  AnalyzerState arm1 = AnalyzerState::H;
  AnalyzerState arm2 = AnalyzerState::H;

  std::string label() const {
    return std::string(analyzer_letter(arm1)) + analyzer_letter(arm2);
  }
  bool operator==(const ProjectorPair&) const = default;
};

/// The 16 joint projection settings, {H,V,D,L} x {H,V,D,L} in fixed order
/// (arm 1 outer, arm 2 inner): HH, HV, HD, HL, VH, ... LL.
inline std::vector<ProjectorPair> projection_set() {
  const std::array<AnalyzerState, 4> states = {AnalyzerState::H, AnalyzerState::V,
                                               AnalyzerState::D, AnalyzerState::L};
  std::vector<ProjectorPair> set;
  set.reserve(16);
  for (auto a : states)
    for (auto b : states) set.push_back({a, b});
  return set;
}

/// Born probability tr(rho Pi1 x Pi2) = <pair| rho |pair>.
inline double born_probability(const TwoQubitState& state, const ProjectorPair& pair) {
  Eigen::Vector4cd ket;
  const auto k1 = analyzer_ket(pair.arm1);
  const auto k2 = analyzer_ket(pair.arm2);
  ket << k1[0] * k2[0], k1[0] * k2[1], k1[1] * k2[0], k1[1] * k2[1];
  return (ket.adjoint() * state.matrix() * ket)(0, 0).real();
}

struct CountEntry {
  ProjectorPair pair;
  long long counts = 0;
  double duration_s = 10.0;
};

struct CountRecord {
  std::vector<CountEntry> entries;  // exactly 16, in projection_set() order
  double background_rate_cps = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    const auto expected = projection_set();
    if (entries.size() != 16)
      throw InvalidInputError("CountRecord: expected exactly 16 entries");
    for (std::size_t i = 0; i < 16; ++i) {
      if (!(entries[i].pair == expected[i]))
        throw InvalidInputError("CountRecord: pair order must match the projection set");
      if (entries[i].counts < 0)
        throw InvalidInputError("CountRecord: counts must be >= 0");
    }
  }
};

/// Coincidence counts for every setting: Poisson with mean
/// mean_total * p(pair) + background_rate * duration, drawn from a single
/// stream seeded by `seed` in projection_set() order.
inline CountRecord simulate_counts(const TwoQubitState& rho, double mean_total,
                                   double background_rate_cps, double duration_s,
                                   std::uint64_t seed) {
  if (mean_total <= 0.0)
    throw InvalidInputError("simulate_counts: mean_total must be > 0");
  Rng rng(seed);
  CountRecord record;
  record.background_rate_cps = background_rate_cps;
  record.seed = seed;
  for (const auto& pair : projection_set()) {
    const double mean =
        mean_total * born_probability(rho, pair) + background_rate_cps * duration_s;
    record.entries.push_back({pair, rng.poisson(mean), duration_s});
  }
  return record;
}

/// Expected counts without noise (rounded to the integer count type).
inline CountRecord expected_counts(const TwoQubitState& rho, double mean_total,
                                   double background_rate_cps, double duration_s) {
  if (mean_total <= 0.0)
    throw InvalidInputError("expected_counts: mean_total must be > 0");
  CountRecord record;
  record.background_rate_cps = background_rate_cps;
  record.seed = 0;
  for (const auto& pair : projection_set()) {
    const double mean =
        mean_total * born_probability(rho, pair) + background_rate_cps * duration_s;
    record.entries.push_back({pair, std::llround(mean), duration_s});
  }
  return record;
}

struct MLESettings {
  int max_iterations = 500;
  double tolerance = 1e-10;
  int restarts = 3;

  void validate() const {
    if (max_iterations <= 0 || tolerance <= 0.0 || restarts <= 0)
      throw InvalidInputError("MLESettings: all fields must be positive");
  }

  bool operator==(const MLESettings&) const = default;
};

struct MleResult {
  Matrix4c rho;
  double log_likelihood = 0.0;  // up to the count-factorial constant
  int iterations = 0;
  bool converged = false;
  std::vector<double> likelihood_trace;  // per accepted iteration

  TwoQubitState state() const { return TwoQubitState::from_matrix(rho); }
};

MleResult mle_reconstruct(const CountRecord& record, const MLESettings& settings = {});

/// Magnitude of the Stokes vector sqrt(s1^2 + s2^2 + s3^2).
inline double stokes_magnitude(double s1, double s2, double s3) {
  return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

/// Overlap fidelity <phi| rho |phi> with a pure target state.
inline double fidelity(const TwoQubitState& state, const Eigen::Vector4cd& ket) {
  return (ket.adjoint() * state.matrix() * ket)(0, 0).real();
}

namespace detail {
/// Linear-inversion estimate from relative frequencies (may be unphysical);
/// used to seed the likelihood maximization.
Matrix4c linear_inversion(const CountRecord& record);
/// Nearest-physical projection: clamp negative eigenvalues, renormalize.
Matrix4c project_to_physical(const Matrix4c& rho);
}  // namespace detail

}  // namespace biphoton
