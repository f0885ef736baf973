// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/amplitude.hpp"
#include "biphoton/app.hpp"
#include "biphoton/density_matrix.hpp"
#include "biphoton/filters.hpp"
#include "biphoton/fourier.hpp"
#include "biphoton/gaussian_fit.hpp"
#include "biphoton/overlap.hpp"
#include "biphoton/rng.hpp"
#include "biphoton/tomography.hpp"

using namespace biphoton;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GaussianFit fit_vcurve(const VCurve& c) {
  Curve data;
  data.x = Eigen::Map<const Eigen::ArrayXd>(c.delay_fs.data(), Eigen::Index(c.delay_fs.size()));
  data.y = Eigen::Map<const Eigen::ArrayXd>(c.v_mag.data(), Eigen::Index(c.v_mag.size()));
  return gaussian_fit(data);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_1_vcurve_width(const RunConfig& config) {
  const auto t0 = Clock::now();
  const Grid time_grid = pipeline_time_amplitude(config, false, false);
  const VCurve curve = vcurve(time_grid, sweep_delays(config.sweep));
  const GaussianFit fit = fit_vcurve(curve);
  const double elapsed = seconds_since(t0);

  const double target = 216.0;
  const bool width_ok = std::abs(fit.fwhm - target) / target <= 0.10;
  const bool time_ok = elapsed < 60.0;
  report(1, width_ok && time_ok,
         fmt("unfiltered |v(T)| Gaussian-fit FWHM = %.2f fs (target 216 fs +-10%%), "
             "1024x1024 grid, 161 points, %.1f s (< 60 s)",
             fit.fwhm, elapsed));
}

// ---------------------------------------------------------------- criterion 2
void criterion_2_spectrum(const RunConfig& config) {
  const Grid freq =
      normalize(build_joint_amplitude<double>(config.pump, config.crystal, config.grid));
  const Curve spec = marginal_spectrum(freq, Arm::Signal, config.pump);

  // widths under both measurement conventions; the gate uses the Gaussian
  // fit, which is how every width in the source experiment is quoted
  const GaussianFit fit = gaussian_fit(spec);
  const double raw_width = fwhm(spec);
  Eigen::Index ipeak = 0;
  spec.y.maxCoeff(&ipeak);
  const double raw_peak = spec.x[ipeak];

  auto value_at = [&](double x) {
    double best = 1e9, val = 0.0;
    for (Eigen::Index i = 0; i < spec.x.size(); ++i)
      if (std::abs(spec.x[i] - x) < best) {
        best = std::abs(spec.x[i] - x);
        val = spec.y[i];
      }
    return val;
  };
  const double asym = std::abs(value_at(557.0) - value_at(507.0));

  const bool width_ok = std::abs(fit.fwhm - 40.0) <= 4.0;
  const bool peak_ok = std::abs(fit.center - 532.0) <= 2.0;
  const bool asym_ok = asym > 0.05;
  report(2, width_ok && peak_ok && asym_ok,
         fmt("unfiltered marginal: Gaussian-fit FWHM = %.2f nm (40 +- 4), fit center = "
             "%.2f nm (532 +- 2), |I(557)-I(507)| = %.3f (> 0.05); raw half-max width "
             "%.2f nm, raw peak %.2f nm",
             fit.fwhm, fit.center, asym, raw_width, raw_peak));
}

// ---------------------------------------------------------------- criterion 3
void criterion_3_filter_ordering(const RunConfig& config) {
  const Grid base =
      normalize(build_joint_amplitude<double>(config.pump, config.crystal, config.grid));
  const auto delays = sweep_delays(config.sweep);

  auto width_with = [&](double bandwidth_nm) {
    Grid g = base;
    if (bandwidth_nm > 0.0) {
      const FilterSpec f{532.0, bandwidth_nm};
      g = apply_filters(base, f, f, config.pump);
    }
    return fit_vcurve(vcurve(to_time_domain(normalize(g)), delays)).fwhm;
  };

  const double w_none = width_with(0.0);
  const double w40 = width_with(40.0);
  const double w8 = width_with(8.0);

  const bool ok = (w8 > w40) && (w40 >= w_none);
  report(3, ok,
         fmt("v-curve FWHM ordering: 8 nm %.2f fs > 40 nm %.2f fs >= unfiltered %.2f fs "
             "(experiment: 237 / 205 / 216 fs)",
             w8, w40, w_none));
  std::printf(
      "  note: the measured 40-nm width (205 fs) falls below the 216 fs pump\n"
      "  autocorrelation; the filter convolution can only broaden the v-curve, so that\n"
      "  ordering is unexplained by this model (the source experiment reports the same\n"
      "  open discrepancy and suggests self-phase modulation as a candidate cause).\n");
}

// ---------------------------------------------------------------- criterion 4
void criterion_4_concurrence_identity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = double(i) / 100.0;
    worst = std::max(worst, std::abs(concurrence(mixed_model_rho(v)) - v));
  }
  const double elapsed = seconds_since(t0);
  report(4, worst <= 1e-10 && elapsed < 1.0,
         fmt("concurrence(mixed_model_rho(v)) = v on the 101-point grid, max |error| = "
             "%.2e (<= 1e-10), %.2f s (< 1 s)",
             worst, elapsed));
}

// ---------------------------------------------------------------- criterion 5
void criterion_5_tomography_roundtrip() {
  const auto t0 = Clock::now();
  const std::vector<double> vs = {0.0, 0.25, 0.5, 0.75, 0.95, 1.0};

  double worst_noiseless = 0.0;
  for (const double v : vs) {
    const CountRecord record = expected_counts(mixed_model_rho(v), 9000.0, 9.0, 10.0);
    const double c = concurrence(mle_reconstruct(record).state());
    worst_noiseless = std::max(worst_noiseless, std::abs(c - v));
  }

  MLESettings mc_settings;
  mc_settings.restarts = 1;  // the linear-inversion start is reliable here
  double worst_mean_err = 0.0;
  const int n_seeds = 100;
  std::vector<double> means(vs.size(), 0.0);
  for (std::size_t iv = 0; iv < vs.size(); ++iv) {
    const TwoQubitState truth = mixed_model_rho(vs[iv]);
    double acc = 0.0;
    for (int seed = 0; seed < n_seeds; ++seed) {
      const CountRecord record =
          simulate_counts(truth, 9000.0, 9.0, 10.0, 10'000 + 1000 * iv + seed);
      acc += concurrence(mle_reconstruct(record, mc_settings).state());
    }
    means[iv] = acc / n_seeds;
    worst_mean_err = std::max(worst_mean_err, std::abs(means[iv] - vs[iv]));
  }
  const double elapsed = seconds_since(t0);

  report(5, worst_noiseless <= 0.01 && worst_mean_err <= 0.05 && elapsed < 120.0,
         fmt("noiseless max |C - v| = %.4f (<= 0.01); Poisson (4500 max counts, 100 "
             "seeds) max |mean C - v| = %.4f (<= 0.05); %.1f s (< 120 s)",
             worst_noiseless, worst_mean_err, elapsed));
}

// ---------------------------------------------------------------- criterion 6
void criterion_6_interference_consistency() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> uv(0.0, 1.0);
  std::uniform_real_distribution<double> ut(0.0, M_PI);
  const double r = 1.0 / std::sqrt(2.0);

  double worst_born = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double v = uv(gen);
    const double theta = ut(gen);
    const TwoQubitState rho = effective_rho(v, 0.0);
    const Eigen::Vector2cd kl(r, complexd(0.0, r));
    const Eigen::Vector2cd kr(r, complexd(0.0, -r));
    const Eigen::Vector2cd kt(std::cos(2.0 * theta), complexd(0.0, std::sin(2.0 * theta)));
    auto born = [&](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
      Eigen::Vector4cd ket;
      ket << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
      return (ket.adjoint() * rho.matrix() * ket)(0, 0).real();
    };
    worst_born = std::max(
        worst_born, std::abs(born(kr, kt) - interference_pattern(v, theta, Branch::Plus)));
    worst_born = std::max(
        worst_born, std::abs(born(kl, kt) - interference_pattern(v, theta, Branch::Minus)));
  }

  // noiseless extraction exact to 1e-6
  auto make_samples = [](double v, double scale, Rng* rng) {
    std::vector<std::pair<double, double>> samples;
    for (int k = 0; k < 64; ++k) {
      const double theta = M_PI * double(k) / 64.0;
      const double mean = scale * interference_pattern(v, theta, Branch::Plus);
      samples.emplace_back(theta, rng ? double(rng->poisson(mean)) : mean);
    }
    return samples;
  };
  const double v_clean = visibility_from_pattern(make_samples(0.92, 1000.0, nullptr)).v;
  const bool clean_ok = std::abs(v_clean - 0.92) < 1e-6;

  // Poisson at the ~450-counts scale, seed averaged
  double v_mean = 0.0;
  const int n_seeds = 100;
  for (int seed = 0; seed < n_seeds; ++seed) {
    Rng rng(31'000 + seed);
    v_mean += visibility_from_pattern(make_samples(0.92, 940.0, &rng)).v / n_seeds;
  }
  const bool noisy_ok = std::abs(v_mean - 0.92) <= 0.02;

  report(6, worst_born <= 1e-12 && clean_ok && noisy_ok,
         fmt("Born-rule vs 1/4(1 +- v sin4t): max |diff| = %.2e over 1000 draws (<= "
             "1e-12); noiseless extraction |v-0.92| = %.2e (< 1e-6); Poisson mean v = "
             "%.4f (0.92 +- 0.02)",
             worst_born, std::abs(v_clean - 0.92), v_mean));
}

// ---------------------------------------------------------------- criterion 7
void criterion_7_fourier_oracles(const RunConfig& config) {
  // Parseval on the default grid
  const Grid freq =
      normalize(build_joint_amplitude<double>(config.pump, config.crystal, config.grid));
  const Grid time = to_time_domain(freq);
  const double parseval = std::abs(time.total_power() - freq.total_power()) / freq.total_power();

  // v(T) route agreement
  const auto delays = sweep_delays(config.sweep);
  const VCurve a = vcurve(time, delays);
  const VCurve b = vcurve_spectral(freq, delays);
  double route_diff = 0.0;
  for (std::size_t i = 0; i < delays.size(); ++i)
    route_diff = std::max(route_diff, std::abs(a.v_mag[i] - b.v_mag[i]));

  // frequency-product vs time-convolution filtering on 128x128 grids
  auto convolution_error = [&](double bandwidth_nm, double span_plus) {
    const Eigen::Index n = 128;
    const GridSpec spec{n, n, span_plus, 3.0};
    const Grid base = build_joint_amplitude<double>(config.pump, config.crystal, spec);
    const FilterSpec f{532.0, bandwidth_nm};
    const Grid route_freq = to_time_domain(apply_filters(base, f, f, config.pump));
    const Grid hat0 = to_time_domain(base);

    const double dnu = f.bandwidth_rad_fs();
    const double aa = 2.0 * std::log(2.0) / (dnu * dnu);
    const double cf = std::pow(4.0 * std::log(2.0) / (M_PI * dnu * dnu), 0.25);
    auto fhat = [&](double t) {
      return cf * std::sqrt(M_PI / aa) / std::sqrt(two_pi) * std::exp(-t * t / (4.0 * aa));
    };
    const double pp = hat0.axis_plus.span(), pm = hat0.axis_minus.span();
    Eigen::ArrayXXd table(2 * n - 1, 2 * n - 1);
    for (Eigen::Index di = 0; di < 2 * n - 1; ++di)
      for (Eigen::Index dj = 0; dj < 2 * n - 1; ++dj) {
        double val = 0.0;
        for (int ip = -1; ip <= 1; ++ip)
          for (int im = -1; im <= 1; ++im) {
            const double tp = double(di - (n - 1)) * hat0.axis_plus.step + ip * pp;
            const double tm = double(dj - (n - 1)) * hat0.axis_minus.step + im * pm;
            val += fhat(tp + tm) * fhat(tp - tm);
          }
        table(di, dj) = val;
      }

    const double weight = hat0.cell_area() / M_PI;
    double max_err = 0.0, max_val = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        std::complex<double> acc(0, 0);
        for (Eigen::Index p = 0; p < n; ++p)
          for (Eigen::Index q = 0; q < n; ++q)
            acc += hat0.values(p, q) * table(i - p + n - 1, j - q + n - 1);
        max_err = std::max(max_err, std::abs(acc * weight - route_freq.values(i, j)));
        max_val = std::max(max_val, std::abs(route_freq.values(i, j)));
      }
    return max_err / max_val;
  };
  const double conv8 = convolution_error(8.0, 0.35);
  const double conv40 = convolution_error(40.0, 1.4);

  const bool ok = parseval <= 1e-9 && route_diff <= 1e-9 && conv8 <= 1e-7 && conv40 <= 1e-7;
  report(7, ok,
         fmt("Parseval rel err = %.2e (<= 1e-9); v(T) route diff = %.2e (<= 1e-9); "
             "filter product-vs-convolution rel err = %.2e / %.2e for 8 / 40 nm on "
             "128x128 (<= 1e-7)",
             parseval, route_diff, conv8, conv40));
}

// ---------------------------------------------------------------- criterion 8
void criterion_8_timing_chain(const RunConfig& config) {
  const double tau = walkoff_delay(config.walkoff);
  const bool tau_ok = (tau == 168.0);

  bool delay_ok = true;
  for (double tp = -350.0; tp <= 350.0; tp += 17.5) {
    const double t = effective_delay(tau, PrecompensatorSpec{tp});
    delay_ok = delay_ok && (t == tau - tp);
  }
  bool range_ok = false;
  try {
    effective_delay(tau, PrecompensatorSpec{351.0});
  } catch (const RangeError&) {
    range_ok = true;
  }
  report(8, tau_ok && delay_ok && range_ok,
         fmt("bundled walk-off ledger: tau = %.1f fs (= 168 exactly); T = tau - Tp across "
             "the +-350 fs compensator range; out-of-range Tp rejected",
             tau));
}

// ---------------------------------------------------------------- criterion 9
void criterion_9_determinism(const RunConfig& base) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "biphoton_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  RunConfig config = base;
  config.grid = GridSpec{256, 256, 0.35, 3.0};
  config.sweep.steps = 41;
  const fs::path cfg_path = root / "run.ini";
  {
    std::ofstream out(cfg_path);
    out << serialize_config(config);
  }

  auto run_cli = [&](const std::string& sub, const fs::path& out_dir) {
    const std::string cmd = std::string(BIPHOTON_CLI_PATH) + " " + sub + " --config " +
                            cfg_path.string() + " --out " + out_dir.string() +
                            " > /dev/null";
    return std::system(cmd.c_str());
  };

  bool ok = true;
  std::string detail;
  for (const std::string sub : {"vcurve", "tomo", "pattern"}) {
    if (run_cli(sub, root / (sub + "_a")) != 0) ok = false;
    if (run_cli(sub, root / (sub + "_b")) != 0) ok = false;
    for (const char* leg : {"_a", "_b"}) {
      if (!fs::exists(root / (sub + leg) / "manifest.json")) ok = false;
    }
    if (!ok) break;
    using nlohmann::json;
    std::ifstream ja(root / (sub + "_a") / "manifest.json");
    std::ifstream jb(root / (sub + "_b") / "manifest.json");
    const json ma = json::parse(ja), mb = json::parse(jb);
    if (ma["files"] != mb["files"]) {
      ok = false;
      detail = sub + " manifests differ";
      break;
    }
    if (ma["config_hash"] != mb["config_hash"]) ok = false;
  }
  report(9, ok,
         detail.empty()
             ? "identical config + seed: byte-identical artifacts (manifest checksum "
               "equality) for vcurve, tomo and pattern CLI runs"
             : detail);
  fs::remove_all(root);
}

}  // namespace

int main() {
  std::printf("acceptance suite: two-crystal cascade simulator\n");
  const RunConfig config;  // bundled defaults = the experimental parameter set

  criterion_1_vcurve_width(config);
  criterion_2_spectrum(config);
  criterion_3_filter_ordering(config);
  criterion_4_concurrence_identity();
  criterion_5_tomography_roundtrip();
  criterion_6_interference_consistency();
  criterion_7_fourier_oracles(config);
  criterion_8_timing_chain(config);
  criterion_9_determinism(config);

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures;
}
