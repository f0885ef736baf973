#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "biphoton/app.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/version.hpp"

// CLI entry point:
//   biphoton <vcurve|spectrum|tomo|pattern|timing> --config <path>
//            [--out <dir>] [--strict] [--seed <n>]
// Exit codes: 0 success, 2 configuration error, 3 numeric/convergence
// failure, 4 I/O error.

namespace {

int dispatch(const std::string& command, const std::string& config_path,
             const biphoton::RunOptions& options) {
  using namespace biphoton;
  const RunConfig config = load_config_file(config_path);
  RunResultFiles result;
  if (command == "vcurve") result = run_vcurve(config, options);
  else if (command == "spectrum") result = run_spectrum(config, options);
  else if (command == "tomo") result = run_tomo(config, options);
  else if (command == "pattern") result = run_pattern(config, options);
  else result = run_timing(config, options);
  std::printf("%s: wrote %zu file(s) + manifest.json to %s\n", command.c_str(),
              result.files.size(), result.directory.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-crystal pulsed-pump down-conversion simulator"};
  app.set_version_flag("--version", biphoton::version_string);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool strict = false;
  std::optional<std::uint64_t> seed;

  for (const char* name : {"vcurve", "spectrum", "tomo", "pattern", "timing"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_flag("--strict", strict, "escalate grid-resolution warnings to errors");
    sub->add_option("--seed", seed, "seed override for stochastic workflows");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  biphoton::RunOptions options;
  options.out_dir = out_dir;
  options.strict = strict;
  options.seed_override = seed;

  try {
    return dispatch(app.get_subcommands().front()->get_name(), config_path, options);
  } catch (const biphoton::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const biphoton::RangeError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const biphoton::ResolutionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const biphoton::InvalidInputError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const biphoton::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const biphoton::Error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
