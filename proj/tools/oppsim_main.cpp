#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oppsim/engine.hpp"
#include "oppsim/experiment.hpp"

namespace {

// key=value pairs from --set and from dedicated long flags.
std::map<std::string, std::string> collect_overrides(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> kv;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw oppsim::ConfigError("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oppsim - data dissemination simulator for opportunistic networks"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "run one experiment (config file, preset or flags)");
  std::string config_path, preset_tag, out_dir = "out";
  std::uint64_t seed_base = 1;
  unsigned runs = 10, jobs = 0;
  bool gnuplot = false, quiet = false;
  std::vector<std::string> sets;
  std::string trace_csv, event_log;

  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--preset", preset_tag, "canned experiment tag (see `oppsim presets`)");
  run->add_option("--seed", seed_base, "first seed (runs use seed, seed+1, ...)");
  run->add_option("--runs", runs, "number of seeded runs to average")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "parallel runs (0 = hardware)");
  run->add_flag("--gnuplot", gnuplot, "also write .dat mirrors of every CSV");
  run->add_flag("--quiet", quiet, "suppress the summary table");
  run->add_option("--set", sets, "override any config key (key=value, repeatable)");
  run->add_option("--trace-csv", trace_csv,
                  "write a mobility trace (t,node,x,y) for the first run");
  run->add_option("--event-log", event_log,
                  "write a JSON-lines event log for the first run");

  // Every config key doubles as a long flag: --policy sch, --oc.capacity 5, ...
  // (--seed belongs to the batch: per-run seeds derive from it.)
  std::map<std::string, std::string> flag_values;
  for (const std::string& key : oppsim::config_keys()) {
    if (key == "seed") continue;
    run->add_option_function<std::string>(
        "--" + key, [&flag_values, key](const std::string& v) { flag_values[key] = v; },
        "config key " + key);
  }

  // ---- presets ----
  auto* presets = app.add_subcommand("presets", "list canned experiment tags");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const std::string& name : oppsim::preset_names()) std::cout << name << '\n';
      return 0;
    }

    std::map<std::string, std::string> overrides = collect_overrides(sets);
    for (const auto& [k, v] : flag_values) overrides[k] = v;  // flags beat --set

    oppsim::ExperimentSpec spec;
    if (!preset_tag.empty()) {
      spec = oppsim::preset(preset_tag);
      if (!config_path.empty()) {
        const auto file_kv = oppsim::parse_config_file(config_path);
        for (oppsim::SweepPoint& p : spec.points)
          p.config = oppsim::apply_config_kv(p.config, file_kv);
      }
      for (oppsim::SweepPoint& p : spec.points)
        p.config = oppsim::apply_config_kv(p.config, overrides);
    } else {
      std::map<std::string, std::string> kv;
      if (!config_path.empty()) kv = oppsim::parse_config_file(config_path);
      for (const auto& [k, v] : overrides) kv[k] = v;
      oppsim::SimConfig cfg = oppsim::config_from_kv(kv);
      std::string label = oppsim::to_string(cfg.scenario) + "_" + oppsim::to_string(cfg.policy) +
                          "_rt" + std::to_string(cfg.theta_i);
      for (char& ch : label) ch = static_cast<char>(std::tolower(ch));
      spec.points.push_back({label, cfg});
    }

    if (run->count("--seed") || run->count("--runs") || spec.seeds.empty())
      spec.seeds = oppsim::ExperimentSpec::default_seeds(seed_base, runs);
    spec.out_dir = out_dir;
    spec.jobs = jobs;
    spec.gnuplot = gnuplot;

    // Debug sinks apply to a dedicated single run of the first point.
    if (!trace_csv.empty() || !event_log.empty()) {
      oppsim::SimConfig cfg = spec.points.front().config;
      cfg.seed = spec.seeds.front();
      oppsim::Simulation sim(cfg);
      std::ofstream trace_out, event_out;
      if (!trace_csv.empty()) {
        trace_out.open(trace_csv);
        sim.set_trace(&trace_out);
      }
      if (!event_log.empty()) {
        event_out.open(event_log);
        sim.set_event_log(&event_out);
      }
      sim.run();
    }

    const oppsim::BatchResult result = oppsim::run_batch(spec);
    const auto summary = oppsim::write_batch_outputs(spec, result);
    if (!quiet) {
      std::cout << oppsim::summary_table(result);
      std::cout << "summary: " << summary.string() << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
