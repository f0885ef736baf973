#include "biphoton/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  const char* begin = v.c_str();
  char* end = nullptr;
  const double out = std::strtod(begin, &end);
  if (end != begin + v.size() || v.empty())
    throw ConfigError(path + ": '" + value + "' is not a number");
  return out;
}

long long parse_int(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(path + ": '" + value + "' is not an integer");
  return out;
}

bool parse_bool(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(path + ": '" + value + "' is not true/false");
}

// "label:delay; label:delay; ..."
std::vector<WalkoffSegment> parse_segments(const std::string& path, const std::string& value) {
  std::vector<WalkoffSegment> segments;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.rfind(':');
    if (colon == std::string::npos)
      throw ConfigError(path + ": segment '" + item + "' is missing ':'");
    WalkoffSegment seg;
    seg.label = trim(item.substr(0, colon));
    seg.delay_fs = parse_double(path, item.substr(colon + 1));
    if (seg.label.empty())
      throw ConfigError(path + ": segment '" + item + "' has an empty label");
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::string serialize_segments(const std::vector<WalkoffSegment>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out += "; ";
    out += segments[i].label + ":" + format_double(segments[i].delay_fs);
  }
  return out;
}

NoiseMode parse_noise(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  if (v == "poisson") return NoiseMode::Poisson;
  if (v == "none") return NoiseMode::None;
  throw ConfigError(path + ": '" + value + "' is not poisson/none");
}

BackgroundMode parse_background_mode(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  if (v == "subtract") return BackgroundMode::Subtract;
  if (v == "fit") return BackgroundMode::Fit;
  if (v == "ignore") return BackgroundMode::Ignore;
  throw ConfigError(path + ": '" + value + "' is not subtract/fit/ignore");
}

OutputFormats parse_formats(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  if (v == "all") return OutputFormats::All;
  if (v == "csv") return OutputFormats::CsvOnly;
  if (v == "json") return OutputFormats::JsonOnly;
  throw ConfigError(path + ": '" + value + "' is not all/csv/json");
}

std::optional<double> parse_auto_double(const std::string& path, const std::string& value) {
  if (trim(value) == "auto") return std::nullopt;
  const double v = parse_double(path, value);
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string& path, const std::string& value)>;

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> table = {
      {"pump.wavelength_nm", [](RunConfig& c, const std::string& p, const std::string& v) { c.pump.central_wavelength_nm = parse_double(p, v); }},
      {"pump.field_fwhm_fs", [](RunConfig& c, const std::string& p, const std::string& v) { c.pump.field_fwhm_fs = parse_double(p, v); }},
      {"crystal.length_mm", [](RunConfig& c, const std::string& p, const std::string& v) { c.crystal.length_mm = parse_double(p, v); }},
      {"crystal.gvm_fs_per_mm", [](RunConfig& c, const std::string& p, const std::string& v) { c.crystal.gvm_fs_per_mm = parse_double(p, v); }},
      {"crystal.gvd_fs2_per_mm", [](RunConfig& c, const std::string& p, const std::string& v) { c.crystal.gvd_fs2_per_mm = parse_double(p, v); }},
      {"grid.n_plus", [](RunConfig& c, const std::string& p, const std::string& v) { c.grid.n_plus = parse_int(p, v); }},
      {"grid.n_minus", [](RunConfig& c, const std::string& p, const std::string& v) { c.grid.n_minus = parse_int(p, v); }},
      {"grid.span_plus", [](RunConfig& c, const std::string& p, const std::string& v) { c.grid.span_plus = parse_double(p, v); }},
      {"grid.span_minus", [](RunConfig& c, const std::string& p, const std::string& v) { c.grid.span_minus = parse_double(p, v); }},
      {"filters.enabled", [](RunConfig& c, const std::string& p, const std::string& v) { c.filters.enabled = parse_bool(p, v); }},
      {"filters.arm1_center_nm", [](RunConfig& c, const std::string& p, const std::string& v) { c.filters.arm1.center_nm = parse_double(p, v); }},
      {"filters.arm1_bandwidth_nm", [](RunConfig& c, const std::string& p, const std::string& v) { c.filters.arm1.bandwidth_fwhm_nm = parse_double(p, v); }},
      {"filters.arm2_center_nm", [](RunConfig& c, const std::string& p, const std::string& v) { c.filters.arm2.center_nm = parse_double(p, v); }},
      {"filters.arm2_bandwidth_nm", [](RunConfig& c, const std::string& p, const std::string& v) { c.filters.arm2.bandwidth_fwhm_nm = parse_double(p, v); }},
      {"sweep.t_min_fs", [](RunConfig& c, const std::string& p, const std::string& v) { c.sweep.t_min_fs = parse_double(p, v); }},
      {"sweep.t_max_fs", [](RunConfig& c, const std::string& p, const std::string& v) { c.sweep.t_max_fs = parse_double(p, v); }},
      {"sweep.steps", [](RunConfig& c, const std::string& p, const std::string& v) { c.sweep.steps = int(parse_int(p, v)); }},
      {"walkoff.segments", [](RunConfig& c, const std::string& p, const std::string& v) { c.walkoff.segments = parse_segments(p, v); }},
      {"precompensator.tp_fs", [](RunConfig& c, const std::string& p, const std::string& v) { c.precompensator.delay_tp_fs = parse_double(p, v); }},
      {"precompensator.phi_rad", [](RunConfig& c, const std::string& p, const std::string& v) { c.compensator_phi_rad = parse_double(p, v); }},
      {"tomography.mean_total", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.mean_total = parse_double(p, v); }},
      {"tomography.background_rate_cps", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.background_rate_cps = parse_double(p, v); }},
      {"tomography.duration_s", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.duration_s = parse_double(p, v); }},
      {"tomography.seed", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.seed = std::uint64_t(parse_int(p, v)); }},
      {"tomography.noise", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.noise = parse_noise(p, v); }},
      {"tomography.v", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.v = parse_auto_double(p, v); }},
      {"tomography.mle_max_iterations", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.mle.max_iterations = int(parse_int(p, v)); }},
      {"tomography.mle_tolerance", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.mle.tolerance = parse_double(p, v); }},
      {"tomography.mle_restarts", [](RunConfig& c, const std::string& p, const std::string& v) { c.tomography.mle.restarts = int(parse_int(p, v)); }},
      {"pattern.v", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.v = parse_auto_double(p, v); }},
      {"pattern.steps", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.steps = int(parse_int(p, v)); }},
      {"pattern.count_scale", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.count_scale = parse_double(p, v); }},
      {"pattern.noise", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.noise = parse_noise(p, v); }},
      {"pattern.seed", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.seed = std::uint64_t(parse_int(p, v)); }},
      {"pattern.background_mode", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.background_mode = parse_background_mode(p, v); }},
      {"pattern.background_counts", [](RunConfig& c, const std::string& p, const std::string& v) { c.pattern.background_counts = parse_double(p, v); }},
      {"output.directory", [](RunConfig& c, const std::string&, const std::string& v) { c.output.directory = trim(v); }},
      {"output.formats", [](RunConfig& c, const std::string& p, const std::string& v) { c.output.formats = parse_formats(p, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (pump.central_wavelength_nm <= 0.0) throw ConfigError("pump.wavelength_nm must be > 0");
  if (pump.field_fwhm_fs <= 0.0) throw ConfigError("pump.field_fwhm_fs must be > 0");
  if (crystal.length_mm <= 0.0) throw ConfigError("crystal.length_mm must be > 0");
  try {
    grid.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (filters.enabled) {
    try {
      filters.arm1.validate();
      filters.arm2.validate();
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("filters: ") + e.what());
    }
  }
  if (sweep.steps < 1) throw ConfigError("sweep.steps must be >= 1");
  if (sweep.t_max_fs < sweep.t_min_fs) throw ConfigError("sweep.t_max_fs must be >= sweep.t_min_fs");
  try {
    precompensator.validate();
  } catch (const RangeError& e) {
    throw ConfigError(std::string("precompensator.tp_fs: ") + e.what());
  }
  if (tomography.mean_total <= 0.0) throw ConfigError("tomography.mean_total must be > 0");
  if (tomography.background_rate_cps < 0.0) throw ConfigError("tomography.background_rate_cps must be >= 0");
  if (tomography.duration_s <= 0.0) throw ConfigError("tomography.duration_s must be > 0");
  if (tomography.v && (*tomography.v < 0.0 || *tomography.v > 1.0))
    throw ConfigError("tomography.v must be in [0, 1] or auto");
  try {
    tomography.mle.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("tomography: ") + e.what());
  }
  if (pattern.v && (*pattern.v < 0.0 || *pattern.v > 1.0))
    throw ConfigError("pattern.v must be in [0, 1] or auto");
  if (pattern.steps < 8) throw ConfigError("pattern.steps must be >= 8");
  if (pattern.count_scale <= 0.0) throw ConfigError("pattern.count_scale must be > 0");
  if (pattern.background_counts < 0.0) throw ConfigError("pattern.background_counts must be >= 0");
  if (output.directory.empty()) throw ConfigError("output.directory must not be empty");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  config.walkoff.segments.clear();  // fully replaced when the key is present
  bool walkoff_seen = false;

  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' outside any section");
    const std::string path = section + "." + key;
    const auto it = schema().find(path);
    if (it == schema().end()) throw ConfigError("unknown key: " + path);
    it->second(config, path, value);
    if (path == "walkoff.segments") walkoff_seen = true;
  }
  if (!walkoff_seen) config.walkoff = default_walkoff_ledger();
  config.validate();
  return config;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[pump]\n";
  out << "wavelength_nm = " << format_double(c.pump.central_wavelength_nm) << "\n";
  out << "field_fwhm_fs = " << format_double(c.pump.field_fwhm_fs) << "\n";
  out << "\n[crystal]\n";
  out << "length_mm = " << format_double(c.crystal.length_mm) << "\n";
  out << "gvm_fs_per_mm = " << format_double(c.crystal.gvm_fs_per_mm) << "\n";
  out << "gvd_fs2_per_mm = " << format_double(c.crystal.gvd_fs2_per_mm) << "\n";
  out << "\n[grid]\n";
  out << "n_plus = " << c.grid.n_plus << "\n";
  out << "n_minus = " << c.grid.n_minus << "\n";
  out << "span_plus = " << format_double(c.grid.span_plus) << "\n";
  out << "span_minus = " << format_double(c.grid.span_minus) << "\n";
  out << "\n[filters]\n";
  out << "enabled = " << (c.filters.enabled ? "true" : "false") << "\n";
  out << "arm1_center_nm = " << format_double(c.filters.arm1.center_nm) << "\n";
  out << "arm1_bandwidth_nm = " << format_double(c.filters.arm1.bandwidth_fwhm_nm) << "\n";
  out << "arm2_center_nm = " << format_double(c.filters.arm2.center_nm) << "\n";
  out << "arm2_bandwidth_nm = " << format_double(c.filters.arm2.bandwidth_fwhm_nm) << "\n";
  out << "\n[sweep]\n";
  out << "t_min_fs = " << format_double(c.sweep.t_min_fs) << "\n";
  out << "t_max_fs = " << format_double(c.sweep.t_max_fs) << "\n";
  out << "steps = " << c.sweep.steps << "\n";
  out << "\n[walkoff]\n";
  out << "segments = " << serialize_segments(c.walkoff.segments) << "\n";
  out << "\n[precompensator]\n";
  out << "tp_fs = " << format_double(c.precompensator.delay_tp_fs) << "\n";
  out << "phi_rad = " << format_double(c.compensator_phi_rad) << "\n";
  out << "\n[tomography]\n";
  out << "mean_total = " << format_double(c.tomography.mean_total) << "\n";
  out << "background_rate_cps = " << format_double(c.tomography.background_rate_cps) << "\n";
  out << "duration_s = " << format_double(c.tomography.duration_s) << "\n";
  out << "seed = " << c.tomography.seed << "\n";
  out << "noise = " << (c.tomography.noise == NoiseMode::Poisson ? "poisson" : "none") << "\n";
  out << "v = " << (c.tomography.v ? format_double(*c.tomography.v) : std::string("auto")) << "\n";
  out << "mle_max_iterations = " << c.tomography.mle.max_iterations << "\n";
  out << "mle_tolerance = " << format_double(c.tomography.mle.tolerance) << "\n";
  out << "mle_restarts = " << c.tomography.mle.restarts << "\n";
  out << "\n[pattern]\n";
  out << "v = " << (c.pattern.v ? format_double(*c.pattern.v) : std::string("auto")) << "\n";
  out << "steps = " << c.pattern.steps << "\n";
  out << "count_scale = " << format_double(c.pattern.count_scale) << "\n";
  out << "noise = " << (c.pattern.noise == NoiseMode::Poisson ? "poisson" : "none") << "\n";
  out << "seed = " << c.pattern.seed << "\n";
  out << "background_mode = "
      << (c.pattern.background_mode == BackgroundMode::Subtract ? "subtract"
          : c.pattern.background_mode == BackgroundMode::Fit   ? "fit"
                                                               : "ignore")
      << "\n";
  out << "background_counts = " << format_double(c.pattern.background_counts) << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.output.directory << "\n";
  out << "formats = "
      << (c.output.formats == OutputFormats::All       ? "all"
          : c.output.formats == OutputFormats::CsvOnly ? "csv"
                                                       : "json")
      << "\n";
  return out.str();
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace biphoton
