#pragma once

#include <functional>
#include <string>
#include <vector>

#include "biphoton/config.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/io.hpp"
#include "biphoton/overlap.hpp"
#include "biphoton/tomography.hpp"

// Experiment orchestration behind the CLI subcommands. Each run_* function
// executes one workflow against a RunConfig, writes its artifacts plus a
// manifest into the output directory and returns the emitted file records.

namespace biphoton {

struct RunOptions {
  std::string out_dir;  // empty = config's output.directory
  bool strict = false;
  std::optional<std::uint64_t> seed_override;
};

struct RunResultFiles {
  std::string directory;
  std::vector<ArtifactWriter::FileRecord> files;
};

RunResultFiles run_vcurve(const RunConfig& config, const RunOptions& options = {});
RunResultFiles run_spectrum(const RunConfig& config, const RunOptions& options = {});
RunResultFiles run_tomo(const RunConfig& config, const RunOptions& options = {});
RunResultFiles run_pattern(const RunConfig& config, const RunOptions& options = {});
RunResultFiles run_timing(const RunConfig& config, const RunOptions& options = {});

/// Number of worker threads: BIPHOTON_WORKERS, default 1.
int worker_count();

/// Deterministic parallel map: fn(i) for i in [0, n); results are slotted by
/// index, so the outcome is bitwise independent of the partitioning.
void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn);

/// Normalized time-domain amplitude for the configured source, optionally
/// after the configured filters.
Grid pipeline_time_amplitude(const RunConfig& config, bool filtered, bool strict);

/// |v(T)| at the walk-off chain's effective delay T = tau - Tp, with the
/// filters applied when the config enables them.
struct ResolvedV {
  double v = 0.0;
  double tau_fs = 0.0;
  double effective_delay_fs = 0.0;
  bool from_pipeline = true;
};
ResolvedV resolve_v(const RunConfig& config, const std::optional<double>& override_v, bool strict);

std::vector<double> sweep_delays(const SweepConfig& sweep);

}  // namespace biphoton
