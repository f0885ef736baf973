#include "biphoton/app.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "biphoton/amplitude.hpp"
#include "biphoton/density_matrix.hpp"
#include "biphoton/filters.hpp"
#include "biphoton/fourier.hpp"
#include "biphoton/gaussian_fit.hpp"
#include "biphoton/version.hpp"

namespace biphoton {

int worker_count() {
  const char* env = std::getenv("BIPHOTON_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn) {
  const int workers = std::min<Eigen::Index>(worker_count(), n);
  if (workers <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Eigen::Index> next(0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Eigen::Index i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> sweep_delays(const SweepConfig& sweep) {
  std::vector<double> delays;
  delays.reserve(sweep.steps);
  if (sweep.steps == 1) {
    delays.push_back(sweep.t_min_fs);
    return delays;
  }
  const double step = (sweep.t_max_fs - sweep.t_min_fs) / double(sweep.steps - 1);
  for (int i = 0; i < sweep.steps; ++i) delays.push_back(sweep.t_min_fs + step * double(i));
  return delays;
}

Grid pipeline_time_amplitude(const RunConfig& config, bool filtered, bool strict) {
  Grid freq = build_joint_amplitude<double>(config.pump, config.crystal, config.grid, strict);
  if (filtered) {
    if (!config.filters.enabled)
      throw InvalidInputError("pipeline: filters requested but disabled in config");
    freq = apply_filters(freq, config.filters.arm1, config.filters.arm2, config.pump);
  }
  return to_time_domain(normalize(freq));
}

ResolvedV resolve_v(const RunConfig& config, const std::optional<double>& override_v,
                    bool strict) {
  ResolvedV out;
  out.tau_fs = walkoff_delay(config.walkoff);
  out.effective_delay_fs = effective_delay(out.tau_fs, config.precompensator);
  if (override_v) {
    out.v = *override_v;
    out.from_pipeline = false;
    return out;
  }
  const Grid time_grid = pipeline_time_amplitude(config, config.filters.enabled, strict);
  out.v = std::abs(overlap_v(time_grid, out.effective_delay_fs));
  out.v = std::min(out.v, 1.0);
  return out;
}

namespace {

ArtifactWriter make_writer(const RunConfig& config, const RunOptions& options) {
  RunConfig effective = config;
  if (options.seed_override) {
    effective.tomography.seed = *options.seed_override;
    effective.pattern.seed = *options.seed_override;
  }
  const std::string dir = options.out_dir.empty() ? effective.output.directory : options.out_dir;
  return ArtifactWriter(dir, serialize_config(effective), version_string);
}

bool want_csv(const RunConfig& c) { return c.output.formats != OutputFormats::JsonOnly; }
bool want_json(const RunConfig& c) { return c.output.formats != OutputFormats::CsvOnly; }

std::string filter_provenance(const FiltersConfig& f) {
  return "filtered_" + format_shortest(f.arm1.bandwidth_fwhm_nm) + "nm_" +
         format_shortest(f.arm2.bandwidth_fwhm_nm) + "nm";
}

VCurve sweep_vcurve(const Grid& time_grid, const std::vector<double>& delays,
                    std::string provenance) {
  const detail::OverlapKernel<double> kernel(time_grid);
  VCurve curve;
  curve.provenance = std::move(provenance);
  curve.delay_fs = delays;
  curve.v_mag.assign(delays.size(), 0.0);
  parallel_for(Eigen::Index(delays.size()), [&](Eigen::Index i) {
    curve.v_mag[std::size_t(i)] = std::abs(kernel.evaluate(delays[std::size_t(i)]));
  });
  return curve;
}

Json fit_to_json(const VCurve& curve) {
  Curve data;
  data.x = Eigen::Map<const Eigen::ArrayXd>(curve.delay_fs.data(), Eigen::Index(curve.delay_fs.size()));
  data.y = Eigen::Map<const Eigen::ArrayXd>(curve.v_mag.data(), Eigen::Index(curve.v_mag.size()));
  const GaussianFit fit = gaussian_fit(data);
  Json j = Json::object();
  j.set("provenance", Json::string(curve.provenance));
  j.set("amplitude", Json::number(fit.amplitude));
  j.set("center_fs", Json::number(fit.center));
  j.set("fwhm_fs", Json::number(fit.fwhm));
  j.set("rms_residual", Json::number(fit.rms_residual));
  j.set("iterations", Json::integer(fit.iterations));
  j.set("converged", Json::boolean(fit.converged));
  return j;
}

Json rho_to_json(const Matrix4c& rho, const std::string& source) {
  Json j = Json::object();
  j.set("basis", Json::string("HH,HV,VH,VV"));
  j.set("source", Json::string(source));
  Json rows = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json row = Json::array();
    for (int k = 0; k < 4; ++k) {
      Json pair = Json::array();
      pair.push(Json::number(rho(i, k).real()));
      pair.push(Json::number(rho(i, k).imag()));
      row.push(std::move(pair));
    }
    rows.push(std::move(row));
  }
  j.set("matrix", std::move(rows));
  return j;
}

}  // namespace

RunResultFiles run_vcurve(const RunConfig& config, const RunOptions& options) {
  config.validate();
  ArtifactWriter writer = make_writer(config, options);
  const std::vector<double> delays = sweep_delays(config.sweep);

  std::vector<VCurve> curves;
  curves.push_back(sweep_vcurve(pipeline_time_amplitude(config, false, options.strict), delays,
                                "unfiltered"));
  if (config.filters.enabled)
    curves.push_back(sweep_vcurve(pipeline_time_amplitude(config, true, options.strict), delays,
                                  filter_provenance(config.filters)));

  if (want_csv(config)) writer.write("vcurve.csv", csv_vcurve(curves));
  if (want_json(config)) {
    Json fits = Json::array();
    if (delays.size() >= 5) {
      for (const auto& c : curves) fits.push(fit_to_json(c));
    }
    Json doc = Json::object();
    doc.set("curves", std::move(fits));
    writer.write("vcurve_fit.json", doc.dump());
  }
  writer.finalize();
  return {writer.directory(), writer.files()};
}

RunResultFiles run_spectrum(const RunConfig& config, const RunOptions& options) {
  config.validate();
  ArtifactWriter writer = make_writer(config, options);

  const Grid unfiltered =
      normalize(build_joint_amplitude<double>(config.pump, config.crystal, config.grid, options.strict));
  const Curve s_unf = marginal_spectrum(unfiltered, Arm::Signal, config.pump);
  const Curve i_unf = marginal_spectrum(unfiltered, Arm::Idler, config.pump);

  Curve s_fil, i_fil;
  if (config.filters.enabled) {
    const Grid filtered = normalize(
        apply_filters(unfiltered, config.filters.arm1, config.filters.arm2, config.pump));
    s_fil = marginal_spectrum(filtered, Arm::Signal, config.pump);
    i_fil = marginal_spectrum(filtered, Arm::Idler, config.pump);
  }

  std::string csv = "wavelength_nm,signal_unfiltered,idler_unfiltered";
  if (config.filters.enabled) csv += ",signal_filtered,idler_filtered";
  csv += "\n";
  for (Eigen::Index k = 0; k < s_unf.x.size(); ++k) {
    csv += format_shortest(s_unf.x[k]) + "," + format_shortest(s_unf.y[k]) + "," +
           format_shortest(i_unf.y[k]);
    if (config.filters.enabled)
      csv += "," + format_shortest(s_fil.y[k]) + "," + format_shortest(i_fil.y[k]);
    csv += "\n";
  }
  if (want_csv(config)) writer.write("spectrum.csv", csv);
  writer.finalize();
  return {writer.directory(), writer.files()};
}

RunResultFiles run_tomo(const RunConfig& config, const RunOptions& options) {
  config.validate();
  RunConfig effective = config;
  if (options.seed_override) effective.tomography.seed = *options.seed_override;
  ArtifactWriter writer = make_writer(config, options);

  const ResolvedV resolved = resolve_v(effective, effective.tomography.v, options.strict);
  const TwoQubitState truth = effective_rho(resolved.v, effective.compensator_phi_rad);

  const auto& tomo = effective.tomography;
  const CountRecord record =
      (tomo.noise == NoiseMode::Poisson)
          ? simulate_counts(truth, tomo.mean_total, tomo.background_rate_cps, tomo.duration_s,
                            tomo.seed)
          : expected_counts(truth, tomo.mean_total, tomo.background_rate_cps, tomo.duration_s);

  const MleResult mle = mle_reconstruct(record, tomo.mle);
  const TwoQubitState reconstructed = mle.state();
  const double c = concurrence(reconstructed);
  const double fid = fidelity(reconstructed, phi_plus_ket());
  const double v_pred = 2.0 * std::abs(reconstructed.matrix()(0, 3));

  if (want_json(config)) {
    Json counts = Json::object();
    Json pairs = Json::array();
    for (const auto& e : record.entries) {
      Json p = Json::object();
      p.set("pair", Json::string(e.pair.label()));
      p.set("counts", Json::integer(e.counts));
      p.set("duration_s", Json::number(e.duration_s));
      pairs.push(std::move(p));
    }
    counts.set("pairs", std::move(pairs));
    counts.set("background_rate_cps", Json::number(record.background_rate_cps));
    counts.set("seed", Json::integer((long long)record.seed));
    counts.set("mean_total", Json::number(tomo.mean_total));
    counts.set("noise", Json::string(tomo.noise == NoiseMode::Poisson ? "poisson" : "none"));
    writer.write("counts.json", counts.dump());

    writer.write("rho.json", rho_to_json(reconstructed.matrix(), "mle").dump());

    Json metrics = Json::object();
    metrics.set("v_input", Json::number(resolved.v));
    metrics.set("v_source", Json::string(resolved.from_pipeline ? "pipeline" : "explicit"));
    metrics.set("tau_fs", Json::number(resolved.tau_fs));
    metrics.set("effective_delay_fs", Json::number(resolved.effective_delay_fs));
    metrics.set("concurrence", Json::number(c));
    metrics.set("fidelity_phi_plus", Json::number(fid));
    metrics.set("visibility_prediction", Json::number(v_pred));
    metrics.set("log_likelihood", Json::number(mle.log_likelihood));
    metrics.set("iterations", Json::integer(mle.iterations));
    metrics.set("converged", Json::boolean(mle.converged));
    writer.write("metrics.json", metrics.dump());
  }
  writer.finalize();
  return {writer.directory(), writer.files()};
}

RunResultFiles run_pattern(const RunConfig& config, const RunOptions& options) {
  config.validate();
  RunConfig effective = config;
  if (options.seed_override) effective.pattern.seed = *options.seed_override;
  ArtifactWriter writer = make_writer(config, options);

  const auto& pat = effective.pattern;
  const ResolvedV resolved = resolve_v(effective, pat.v, options.strict);
  const double v = resolved.v;

  const bool poisson = pat.noise == NoiseMode::Poisson;
  Rng rng(pat.seed);

  std::string csv = poisson ? "theta_deg,p_plus,p_minus,counts_plus,counts_minus\n"
                            : "theta_deg,p_plus,p_minus\n";
  std::vector<std::pair<double, double>> samples_plus, samples_minus;
  for (int k = 0; k < pat.steps; ++k) {
    const double theta_deg = 180.0 * double(k) / double(pat.steps);
    const double theta = theta_deg * M_PI / 180.0;
    const double pp = interference_pattern(v, theta, Branch::Plus);
    const double pm = interference_pattern(v, theta, Branch::Minus);
    csv += format_shortest(theta_deg) + "," + format_shortest(pp) + "," + format_shortest(pm);
    if (poisson) {
      const long long cp = rng.poisson(pat.count_scale * pp + pat.background_counts);
      const long long cm = rng.poisson(pat.count_scale * pm + pat.background_counts);
      csv += "," + std::to_string(cp) + "," + std::to_string(cm);
      samples_plus.emplace_back(theta, double(cp));
      samples_minus.emplace_back(theta, double(cm));
    } else {
      samples_plus.emplace_back(theta, pat.count_scale * pp + pat.background_counts);
      samples_minus.emplace_back(theta, pat.count_scale * pm + pat.background_counts);
    }
    csv += "\n";
  }
  if (want_csv(config)) writer.write("pattern.csv", csv);

  if (want_json(config)) {
    VisibilityOptions vis_options;
    vis_options.mode = pat.background_mode;
    vis_options.background_counts = pat.background_counts;
    Json branches = Json::array();
    const char* names[2] = {"plus", "minus"};
    const std::vector<std::pair<double, double>>* sets[2] = {&samples_plus, &samples_minus};
    for (int b = 0; b < 2; ++b) {
      const VisibilityResult res = visibility_from_pattern(*sets[b], vis_options);
      Json j = Json::object();
      j.set("branch", Json::string(names[b]));
      j.set("v", Json::number(res.v));
      j.set("uncertainty", Json::number(res.uncertainty));
      branches.push(std::move(j));
    }
    Json doc = Json::object();
    doc.set("v_input", Json::number(v));
    doc.set("background_mode",
            Json::string(pat.background_mode == BackgroundMode::Subtract ? "subtract"
                         : pat.background_mode == BackgroundMode::Fit   ? "fit"
                                                                        : "ignore"));
    doc.set("branches", std::move(branches));
    writer.write("visibility.json", doc.dump());
  }
  writer.finalize();
  return {writer.directory(), writer.files()};
}

RunResultFiles run_timing(const RunConfig& config, const RunOptions& options) {
  config.validate();
  ArtifactWriter writer = make_writer(config, options);

  const double tau = walkoff_delay(config.walkoff);
  const double t_eff = effective_delay(tau, config.precompensator);

  Json doc = Json::object();
  Json segments = Json::array();
  for (const auto& seg : config.walkoff.segments) {
    Json s = Json::object();
    s.set("label", Json::string(seg.label));
    s.set("delay_fs", Json::number(seg.delay_fs));
    segments.push(std::move(s));
  }
  doc.set("segments", std::move(segments));
  doc.set("tau_fs", Json::number(tau));
  doc.set("tp_fs", Json::number(config.precompensator.delay_tp_fs));
  doc.set("effective_delay_fs", Json::number(t_eff));
  writer.write("timing.json", doc.dump());
  writer.finalize();
  return {writer.directory(), writer.files()};
}

}  // namespace biphoton
