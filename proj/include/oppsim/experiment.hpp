#ifndef OPPSIM_EXPERIMENT_HPP
#define OPPSIM_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "oppsim/config.hpp"
#include "oppsim/metrics.hpp"

namespace oppsim {

struct SweepPoint {
  std::string label;  // embedded in output file names
  SimConfig config;
};

/// A batch: one or more configurations, each run over a list of seeds and
/// averaged.
struct ExperimentSpec {
  std::string name = "custom";
  std::vector<SweepPoint> points;
  std::vector<std::uint64_t> seeds;  // default 1..10
  std::filesystem::path out_dir = "out";
  unsigned jobs = 0;  // 0 = hardware concurrency
  bool gnuplot = false;

  static std::vector<std::uint64_t> default_seeds(std::uint64_t base = 1, std::size_t runs = 10);
};

/// key = value lines, '#' comments, dotted namespaces.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Resolves a key/value map over the standard defaults into a validated
/// SimConfig. Unknown keys and out-of-range values raise ConfigError.
SimConfig config_from_kv(const std::map<std::string, std::string>& kv);

/// Same key set applied over an existing configuration (flags/presets).
SimConfig apply_config_kv(SimConfig base, const std::map<std::string, std::string>& kv);

/// All recognised configuration keys (for --help and error messages).
const std::vector<std::string>& config_keys();

/// Canned experiment reproducing one figure of the evaluation; throws
/// ConfigError for unknown tags, listing the available ones.
ExperimentSpec preset(const std::string& tag);
std::vector<std::string> preset_names();

struct PointResult {
  std::string label;
  std::vector<MetricsSeries> runs;  // one per seed, in seed order
  MetricsSeries averaged;
};

struct BatchResult {
  std::vector<PointResult> points;
};

/// Runs every (point, seed) pair — possibly in parallel, output is
/// independent of scheduling — and averages per point.
BatchResult run_batch(const ExperimentSpec& spec);

/// Writes per-run CSVs, averaged CSVs, a summary JSON (and optional .dat
/// mirrors) under spec.out_dir. Returns the summary JSON path.
std::filesystem::path write_batch_outputs(const ExperimentSpec& spec, const BatchResult& result);

/// One line per point: label, final hit rate, final overhead.
std::string summary_table(const BatchResult& result);

}  // namespace oppsim

#endif  // OPPSIM_EXPERIMENT_HPP
