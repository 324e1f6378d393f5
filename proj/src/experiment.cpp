#include "oppsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "oppsim/engine.hpp"

namespace oppsim {

std::vector<std::uint64_t> ExperimentSpec::default_seeds(std::uint64_t base, std::size_t runs) {
  std::vector<std::uint64_t> seeds(runs);
  for (std::size_t i = 0; i < runs; ++i) seeds[i] = base + i;
  return seeds;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

void apply_one(SimConfig& c, const std::string& key, const std::string& v) {
  if (key == "scenario") c.scenario = scenario_from_string(v);
  else if (key == "policy") c.policy = policy_from_string(v);
  else if (key == "rt") c.theta_i = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "channel_rec_threshold") c.theta_c = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "area.width_m") c.area_width_m = parse_double(key, v);
  else if (key == "area.height_m") c.area_height_m = parse_double(key, v);
  else if (key == "grid.rows") c.grid_rows = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "grid.cols") c.grid_cols = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "channels") c.channels = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "items_per_channel") c.items_per_channel = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "communities") c.communities = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "nodes_per_community") c.nodes_per_community = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "speed.min_mps") c.speed_min_mps = parse_double(key, v);
  else if (key == "speed.max_mps") c.speed_max_mps = parse_double(key, v);
  else if (key == "tx_range_m") c.tx_range_m = parse_double(key, v);
  else if (key == "duration_s") c.duration_s = parse_double(key, v);
  else if (key == "sample_period_s") c.sample_period_s = parse_double(key, v);
  else if (key == "oc.capacity") c.oc_capacity = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "mobility.step_s") c.step_s = parse_double(key, v);
  else if (key == "mobility.stay_prob") c.stay_prob = parse_double(key, v);
  else if (key == "mobility.zipf_exp") c.zipf_exp = parse_double(key, v);
  else if (key == "placement") {
    if (v == "uniform") c.placement = PlacementMode::Uniform;
    else if (v == "popularity") c.placement = PlacementMode::Popularity;
    else if (v == "inverse") c.placement = PlacementMode::Inverse;
    else throw ConfigError("key 'placement': expected uniform, popularity or inverse");
  } else if (key == "dynamics.kind") {
    using K = DynamicsDescriptor::Kind;
    if (v == "none") c.dynamics.kind = K::None;
    else if (v == "subscription_rotation") c.dynamics.kind = K::SubscriptionRotation;
    else if (v == "new_channel") c.dynamics.kind = K::NewChannel;
    else if (v == "item_doubling") c.dynamics.kind = K::ItemDoubling;
    else if (v == "periodic_injection") c.dynamics.kind = K::PeriodicInjection;
    else
      throw ConfigError(
          "key 'dynamics.kind': expected none, subscription_rotation, new_channel, "
          "item_doubling or periodic_injection");
  } else if (key == "dynamics.at_s") c.dynamics.at_s = parse_double(key, v);
  else if (key == "dynamics.period_s") c.dynamics.period_s = parse_double(key, v);
  else if (key == "dynamics.items") c.dynamics.items = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "dynamics.subscribers_per_community")
    c.dynamics.subscribers_per_community = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "ttl.enabled") c.ttl.enabled = parse_bool(key, v);
  else if (key == "ttl.mean_s") c.ttl.mean_s = parse_double(key, v);
  else if (key == "ttl.sigma_s") c.ttl.sigma_s = parse_double(key, v);
  else if (key == "ttl.floor_s") c.ttl.floor_s = parse_double(key, v);
  else if (key == "selfish.kind") {
    using K = SelfishnessDescriptor::Kind;
    if (v == "none") c.selfish.kind = K::None;
    else if (v == "uniform") c.selfish.kind = K::Uniform;
    else if (v == "social") c.selfish.kind = K::Social;
    else throw ConfigError("key 'selfish.kind': expected none, uniform or social");
  } else if (key == "selfish.joint_p") c.selfish.joint_p = parse_double(key, v);
  else if (key == "selfish.p0") c.selfish.p0 = parse_double(key, v);
  else if (key == "selfish.direction") {
    if (v == "direct") c.selfish.inverse = false;
    else if (v == "inverse") c.selfish.inverse = true;
    else throw ConfigError("key 'selfish.direction': expected direct or inverse");
  } else if (key == "community.mode") {
    if (v == "oracle") c.community_mode = CommunityMode::Oracle;
    else if (v == "activation") c.community_mode = CommunityMode::Activation;
    else throw ConfigError("key 'community.mode': expected oracle or activation");
  } else if (key == "community.decay") c.community_decay = parse_double(key, v);
  else if (key == "community.gap_ratio") c.community_gap_ratio = parse_double(key, v);
  else if (key == "community.refresh_period_s") c.community_refresh_s = parse_double(key, v);
  else if (key == "community.max_groups")
    c.community_max_groups = static_cast<std::uint32_t>(parse_uint(key, v));
  else if (key == "seed") c.seed = parse_uint(key, v);
  else if (key == "debug_checks") c.debug_checks = parse_bool(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "scenario", "policy", "rt", "channel_rec_threshold",
      "area.width_m", "area.height_m", "grid.rows", "grid.cols",
      "channels", "items_per_channel", "communities", "nodes_per_community",
      "speed.min_mps", "speed.max_mps", "tx_range_m",
      "duration_s", "sample_period_s", "oc.capacity",
      "mobility.step_s", "mobility.stay_prob", "mobility.zipf_exp",
      "placement",
      "dynamics.kind", "dynamics.at_s", "dynamics.period_s", "dynamics.items",
      "dynamics.subscribers_per_community",
      "ttl.enabled", "ttl.mean_s", "ttl.sigma_s", "ttl.floor_s",
      "selfish.kind", "selfish.joint_p", "selfish.p0", "selfish.direction",
      "community.mode", "community.decay", "community.gap_ratio",
      "community.refresh_period_s", "community.max_groups",
      "seed", "debug_checks"};
  return keys;
}

SimConfig apply_config_kv(SimConfig base, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) apply_one(base, key, value);
  base.validate();
  return base;
}

SimConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  return apply_config_kv(SimConfig{}, kv);
}

namespace {

std::string rt_label(Policy policy, std::uint32_t rt, Scenario scenario) {
  std::string s = to_string(scenario) + "_" + to_string(policy) + "_rt" + std::to_string(rt);
  std::transform(s.begin(), s.end(), s.begin(), ::tolower);
  return s;
}

SweepPoint point(SimConfig base, Policy policy, std::uint32_t rt, std::string suffix = "") {
  base.policy = policy;
  base.theta_i = rt;
  return {rt_label(policy, rt, base.scenario) + suffix, base};
}

ExperimentSpec static_preset(const std::string& name, Scenario scenario,
                             std::vector<std::pair<Policy, std::uint32_t>> sweep) {
  ExperimentSpec spec;
  spec.name = name;
  SimConfig base;
  base.scenario = scenario;
  for (auto [policy, rt] : sweep) spec.points.push_back(point(base, policy, rt));
  spec.seeds = ExperimentSpec::default_seeds();
  return spec;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1",  "fig2",  "fig3",  "fig4",  "fig5",  "fig6",  "fig7",
          "fig8",  "fig9",  "fig10", "fig11", "fig12", "fig13", "fig14",
          "fig15", "fig16", "fig17", "fig19"};
}

ExperimentSpec preset(const std::string& tag) {
  // Static scenario comparisons.
  if (tag == "fig1")
    return static_preset(tag, Scenario::OT,
                         {{Policy::SCH, 3}, {Policy::SCH, 12}, {Policy::RH, 30}, {Policy::RH, 75}});
  if (tag == "fig2")
    return static_preset(tag, Scenario::ZT, {{Policy::SCH, 3}, {Policy::RH, 30}, {Policy::RH, 75}});
  if (tag == "fig3")
    return static_preset(tag, Scenario::TT, {{Policy::SCH, 3}, {Policy::RH, 30}, {Policy::RH, 75}});

  // Dynamics.
  if (tag == "fig4" || tag == "fig5" || tag == "fig6" || tag == "fig7") {
    ExperimentSpec spec;
    spec.name = tag;
    SimConfig base;
    base.dynamics.at_s = 10000;
    std::vector<std::pair<Policy, std::uint32_t>> sweep;
    if (tag == "fig4") {
      base.dynamics.kind = DynamicsDescriptor::Kind::SubscriptionRotation;
      sweep = {{Policy::SCH, 5}, {Policy::RH, 75}};
    } else if (tag == "fig5") {
      base.dynamics.kind = DynamicsDescriptor::Kind::NewChannel;
      base.dynamics.items = 100;
      base.dynamics.subscribers_per_community = 15;
      sweep = {{Policy::SCH, 3}, {Policy::RH, 30}};
    } else if (tag == "fig6") {
      base.dynamics.kind = DynamicsDescriptor::Kind::ItemDoubling;
      sweep = {{Policy::SCH, 3}, {Policy::RH, 75}};
    } else {
      base.dynamics.kind = DynamicsDescriptor::Kind::PeriodicInjection;
      base.dynamics.period_s = 30000;
      base.dynamics.items = 100;
      base.duration_s = 100000;
      sweep = {{Policy::SCH, 3}, {Policy::RH, 75}};
    }
    for (auto [policy, rt] : sweep) spec.points.push_back(point(base, policy, rt));
    spec.seeds = ExperimentSpec::default_seeds();
    return spec;
  }

  // Cache size sensitivity.
  if (tag == "fig8" || tag == "fig9") {
    ExperimentSpec spec =
        static_preset(tag, Scenario::ZT, {{Policy::SCH, 3}, {Policy::RH, 30}, {Policy::RH, 75}});
    for (SweepPoint& p : spec.points) p.config.oc_capacity = tag == "fig8" ? 2 : 5;
    return spec;
  }

  // Initial placement.
  if (tag == "fig10" || tag == "fig11") {
    ExperimentSpec spec =
        static_preset(tag, Scenario::ZT, {{Policy::SCH, 3}, {Policy::RH, 30}, {Policy::RH, 75}});
    for (SweepPoint& p : spec.points)
      p.config.placement = tag == "fig10" ? PlacementMode::Popularity : PlacementMode::Inverse;
    return spec;
  }

  // Item TTLs.
  if (tag == "fig12" || tag == "fig13" || tag == "fig14") {
    ExperimentSpec spec = static_preset(tag, Scenario::ZT, {{Policy::SCH, 3}, {Policy::RH, 75}});
    const double mean = tag == "fig12" ? 7500 : tag == "fig13" ? 10000 : 15000;
    for (SweepPoint& p : spec.points) {
      p.config.ttl.enabled = true;
      p.config.ttl.mean_s = mean;
    }
    return spec;
  }

  // Uniform exchange probabilities.
  if (tag == "fig15" || tag == "fig16" || tag == "fig17") {
    ExperimentSpec spec = static_preset(tag, Scenario::ZT, {{Policy::SCH, 3}, {Policy::RH, 75}});
    const double p = tag == "fig15" ? 0.9 : tag == "fig16" ? 0.5 : 0.33;
    for (SweepPoint& sp : spec.points) {
      sp.config.selfish.kind = SelfishnessDescriptor::Kind::Uniform;
      sp.config.selfish.joint_p = p;
    }
    return spec;
  }

  // Social exchange probabilities.
  if (tag == "fig19") {
    ExperimentSpec spec;
    spec.name = tag;
    SimConfig base;
    base.selfish.kind = SelfishnessDescriptor::Kind::Social;
    for (double p0 : {1.0, 0.75}) {
      for (bool inverse : {false, true}) {
        SimConfig c = base;
        c.selfish.p0 = p0;
        c.selfish.inverse = inverse;
        const std::string suffix = std::string(inverse ? "_inverse" : "_direct") + "_p0" +
                                   (p0 == 1.0 ? std::string("100") : std::string("075"));
        spec.points.push_back(point(c, Policy::SCH, 3, suffix));
      }
    }
    spec.seeds = ExperimentSpec::default_seeds();
    return spec;
  }

  std::string available;
  for (const std::string& name : preset_names()) available += " " + name;
  throw ConfigError("unknown preset '" + tag + "'; available:" + available);
}

BatchResult run_batch(const ExperimentSpec& spec) {
  if (spec.points.empty()) throw ConfigError("experiment has no sweep points");
  if (spec.seeds.empty()) throw ConfigError("experiment has no seeds");
  for (const SweepPoint& p : spec.points) p.config.validate();

  struct Task {
    std::size_t point;
    std::size_t run;
    SimConfig cfg;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < spec.points.size(); ++p) {
    for (std::size_t r = 0; r < spec.seeds.size(); ++r) {
      SimConfig cfg = spec.points[p].config;
      cfg.seed = spec.seeds[r];
      tasks.push_back({p, r, std::move(cfg)});
    }
  }

  std::vector<MetricsSeries> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        Simulation sim(tasks[i].cfg);
        results[i] = sim.run();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  unsigned jobs = spec.jobs ? spec.jobs : std::thread::hardware_concurrency();
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  BatchResult batch;
  batch.points.resize(spec.points.size());
  for (std::size_t p = 0; p < spec.points.size(); ++p) {
    batch.points[p].label = spec.points[p].label;
    batch.points[p].runs.resize(spec.seeds.size());
  }
  for (std::size_t i = 0; i < tasks.size(); ++i)
    batch.points[tasks[i].point].runs[tasks[i].run] = std::move(results[i]);
  for (PointResult& p : batch.points) p.averaged = average_runs(p.runs);
  return batch;
}

std::filesystem::path write_batch_outputs(const ExperimentSpec& spec, const BatchResult& result) {
  std::filesystem::create_directories(spec.out_dir);

  auto write = [&](const std::filesystem::path& path, const MetricsSeries& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_csv(out, series);
    if (spec.gnuplot) {
      std::filesystem::path dat = path;
      dat.replace_extension(".dat");
      std::ofstream dout(dat, std::ios::binary);
      write_dat(dout, series);
    }
  };

  nlohmann::ordered_json summary;
  summary["experiment"] = spec.name;
  summary["seeds"] = spec.seeds;
  summary["points"] = nlohmann::ordered_json::array();

  for (const PointResult& p : result.points) {
    for (const MetricsSeries& run : p.runs) {
      write(spec.out_dir / (spec.name + "_" + p.label + "_seed" + std::to_string(run.seed) +
                            ".csv"),
            run);
    }
    const std::string avg_name = spec.name + "_" + p.label + "_avg.csv";
    write(spec.out_dir / avg_name, p.averaged);

    nlohmann::ordered_json entry;
    entry["label"] = p.label;
    entry["final_hit_rate"] = p.averaged.final_hit_rate();
    entry["final_overhead_total"] = p.averaged.final_sample().overhead_total;
    entry["final_overhead_data"] = p.averaged.final_sample().overhead_data;
    entry["final_overhead_control"] = p.averaged.final_sample().overhead_control;
    entry["avg_csv"] = avg_name;
    summary["points"].push_back(entry);
  }

  const std::filesystem::path summary_path = spec.out_dir / (spec.name + "_summary.json");
  std::ofstream out(summary_path, std::ios::binary);
  out << summary.dump(2) << '\n';
  return summary_path;
}

std::string summary_table(const BatchResult& result) {
  std::ostringstream out;
  out << "point                              final_HR  final_overhead\n";
  for (const PointResult& p : result.points) {
    char line[128];
    std::snprintf(line, sizeof line, "%-34s %8.4f  %14.1f\n", p.label.c_str(),
                  p.averaged.final_hit_rate(), p.averaged.final_overhead());
    out << line;
  }
  return out.str();
}

}  // namespace oppsim
