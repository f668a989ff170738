#include "depthfuse/cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "depthfuse/errors.hpp"
#include "depthfuse/scenario_sim.hpp"

namespace depthfuse {

namespace fs = std::filesystem;

namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

spdlog::level::level_enum level_from_env() {
  const char* env = std::getenv("DEPTHFUSE_LOG_LEVEL");
  const std::string v = env ? env : "";
  if (v == "error") return spdlog::level::err;
  if (v == "info") return spdlog::level::info;
  if (v == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = std::make_shared<spdlog::logger>(
      "depthfuse", std::make_shared<spdlog::sinks::stderr_sink_st>());
  logger->set_pattern("depthfuse: %l: %v");
  logger->set_level(level_from_env());
  return logger;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void add_filter_options(CLI::App& app, FusionConfig& f) {
  app.add_option("--sigma-p-sq", f.noise.sigma_p_sq, "Process variance on distance (m^2)");
  app.add_option("--sigma-pdot-sq", f.noise.sigma_pdot_sq, "Process variance on rate (m^2/s^2)");
  app.add_option("--sigma-z-sq", f.noise.sigma_z_sq, "Depth measurement variance (m^2)");
  app.add_option("--gate-window", f.gate.window, "Depth gate window (samples)");
  app.add_option("--gate-threshold", f.gate.rel_threshold, "Depth gate ratio threshold");
  app.add_option("--gate-recovery", f.gate.recovery_after,
                 "Consecutive rejections before the gate re-anchors (0 = never)");
  app.add_option("--sh-window", f.sh_outlier.window, "S-H filter window (samples)");
  app.add_option("--sh-threshold", f.sh_outlier.rel_threshold, "S-H filter ratio threshold");
  app.add_option("--velocity-window", f.velocity.window,
                 "Monocular estimates in the velocity slope (2 = finite difference)");
  app.add_option("--max-sensitivity", f.velocity.max_sensitivity_cm_per_px,
                 "Largest |df/dx| (cm/px) accepted for the monocular velocity");
  app.add_option("--max-speed", f.velocity.max_speed, "Bound on |distance rate| (m/s)");
  app.add_flag("--mono-measurement", f.velocity.as_measurement,
               "Also correct with the monocular distance");
  app.add_option("--mono-variance", f.velocity.measurement_variance,
                 "Monocular measurement variance (m^2)");
}

// Fills the options of `sub` that were not given on the command line from a
// flat key=value file whose keys are the long flag names.
void apply_config_file(CLI::App& sub, const std::string& path) {
  if (!fs::exists(path)) throw IoError("config file '" + path + "' does not exist");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  for (const auto& item : items) {
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "default")) {
      throw ConfigError("config file: sections are not supported ('" + item.fullname() + "')");
    }
    CLI::Option* opt = item.name == "config" ? nullptr : sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw ConfigError("config file: unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config file: " + item.name + ": " + e.what());
    }
  }
}

std::vector<TimedValue> series(std::span<const FusionOutput> outputs,
                               std::optional<double> FusionOutput::*field) {
  std::vector<TimedValue> v;
  for (const auto& o : outputs) {
    if (const auto& x = o.*field) v.push_back({o.timestamp, *x});
  }
  return v;
}

void emit_results(const fs::path& out_dir, std::span<const SensorLogRecord> records,
                  const PipelineResult& result, spdlog::logger& log) {
  write_file(out_dir / "trace.csv", format_trace(result.outputs));
  if (result.reports.empty()) {
    log.warn("log has no ground truth; metrics.json not written");
    return;
  }
  write_file(out_dir / "metrics.json", metrics_to_json(result.reports));
  write_file(out_dir / "plotdata.csv", format_plot_data(records, result.outputs));
  for (const auto& r : result.reports) {
    log.info("{}: |mean err| {:.2f} cm, rmse {:.2f} cm, std {:.2f} cm ({} frames, {} excluded)",
             to_string(r.method), r.mean_abs_of_signed_error, r.rmse, r.std_dev, r.n_frames,
             r.n_excluded);
  }
}

}  // namespace

PipelineResult run_pipeline(std::span<const SensorLogRecord> records, const FusionConfig& cfg) {
  std::vector<SensorFrame> frames;
  frames.reserve(records.size());
  for (const auto& r : records) frames.push_back(r.sensor_frame());

  PipelineResult result;
  result.outputs = run_fusion(frames, cfg);

  std::vector<TimedValue> truth;
  for (const auto& r : records) {
    if (r.gt_cb_m) truth.push_back({r.t, *r.gt_cb_m});
  }
  if (truth.empty()) return result;

  const std::pair<Method, std::optional<double> FusionOutput::*> methods[] = {
      {Method::keypoint, &FusionOutput::monocular_cb},
      {Method::depth, &FusionOutput::depth_cb},
      {Method::fused, &FusionOutput::fused_cb},
  };
  for (const auto& [method, field] : methods) {
    const auto est = series(result.outputs, field);
    if (est.empty()) {
      result.reports.push_back({method, 0.0, 0.0, 0.0, 0, truth.size()});
      continue;
    }
    result.reports.push_back(compute_metrics(method, est, truth));
  }
  return result;
}

int run_cli(int argc, const char* const* argv) {
  auto log = make_logger();

  CLI::App app{"Camera-to-body distance fusion: simulate scenarios and replay sensor logs"};
  app.require_subcommand(1);

  ScenarioConfig scenario;
  FusionConfig fusion;
  std::string scenario_name;
  std::string out_dir;
  std::string log_path;
  std::string config_path;

  auto* sim = app.add_subcommand("simulate", "Run a seeded scenario and fuse it");
  sim->add_option("--config", config_path, "key=value parameter file (flags take precedence)");
  sim->add_option("--scenario", scenario_name, "discrete | continuous | lateral (required)")
      ->check(CLI::IsMember({"discrete", "continuous", "lateral"}));
  sim->add_option("--seed", scenario.seed, "Random seed");
  sim->add_option("--duration", scenario.duration, "Seconds of data");
  sim->add_option("--fps", scenario.frame_rate, "Frame rate (Hz)");
  sim->add_option("--out", out_dir, "Output directory (required)");
  sim->add_option("--keypoint-noise-px", scenario.keypoint_noise_px, "Keypoint noise std (px)");
  sim->add_option("--height-mismatch", scenario.height_mismatch,
                  "Subject S-H length over the modelled one");
  sim->add_option("--depth-base-sigma", scenario.depth_noise.base_sigma,
                  "Depth noise inside the optimal range (m)");
  sim->add_option("--depth-optimal-max", scenario.depth_noise.optimal_max,
                  "End of the optimal depth range (m)");
  sim->add_option("--depth-growth-rate", scenario.depth_noise.growth_rate,
                  "Exponential noise growth beyond the optimal range (1/m)");
  sim->add_option("--depth-overshoot-rate", scenario.depth_noise.overshoot_bias_rate,
                  "Overshoot bias per meter beyond the optimal range");
  sim->add_option("--outlier-prob", scenario.outlier.probability_per_frame,
                  "Fraction of outlier frames");
  sim->add_option("--outlier-magnitude", scenario.outlier.magnitude_sigma,
                  "Outlier magnitude spread (m)");
  sim->add_option("--outlier-min-magnitude", scenario.outlier.min_magnitude,
                  "Smallest outlier offset (m)");
  sim->add_option("--outlier-positive-fraction", scenario.outlier.positive_fraction,
                  "Share of outliers pointing away from the camera");
  sim->add_option("--edge-multiplier", scenario.outlier.edge_fov_multiplier,
                  "Outlier rate multiplier near the image edge");
  sim->add_option("--continuous-mean", scenario.continuous.mean, "Mean distance (m)");
  sim->add_option("--continuous-amplitude", scenario.continuous.amplitude, "Amplitude (m)");
  sim->add_option("--continuous-period", scenario.continuous.period, "Period (s)");
  sim->add_option("--discrete-near", scenario.discrete.near, "Nearest plateau (m)");
  sim->add_option("--discrete-far", scenario.discrete.far, "Farthest plateau (m)");
  sim->add_option("--lateral-distance", scenario.lateral.distance, "Sweep distance (m)");
  add_filter_options(*sim, fusion);

  auto* replay = app.add_subcommand("replay", "Fuse a recorded sensor log");
  replay->add_option("--config", config_path, "key=value parameter file (flags take precedence)");
  replay->add_option("--log", log_path, "Sensor log CSV (required)");
  replay->add_option("--out", out_dir, "Output directory (required)");
  add_filter_options(*replay, fusion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    log->error("{}", e.what());
    std::cerr << app.help();
    return kExitConfig;
  }

  CLI::App* active = sim->parsed() ? sim : replay;
  try {
    if (!config_path.empty()) apply_config_file(*active, config_path);
  } catch (const IoError& e) {
    log->error("{}", e.what());
    return kExitIo;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return kExitConfig;
  }
  for (const auto& [value, flag] :
       {std::pair{&scenario_name, "--scenario"}, {&out_dir, "--out"}, {&log_path, "--log"}}) {
    if (value->empty() && active->get_option_no_throw(flag) != nullptr) {
      log->error("{} is required", flag);
      std::cerr << active->help();
      return kExitConfig;
    }
  }

  try {
    fusion.validate();
    if (sim->parsed()) {
      scenario.kind = parse_scenario_kind(scenario_name);
      scenario.model = fusion.model;
      scenario.validate();
      ensure_dir(out_dir);

      const auto frames = simulate(scenario);
      const std::string stream_csv = format_sensor_log(to_log_records(frames));
      write_file(fs::path(out_dir) / "stream.csv", stream_csv);
      // Fuse what was written so replaying stream.csv reproduces the trace.
      const auto records = parse_sensor_log(stream_csv);
      log->info("simulated {} frames of the {} scenario (seed {})", records.size(),
                to_string(scenario.kind), scenario.seed);
      emit_results(out_dir, records, run_pipeline(records, fusion), *log);
    } else {
      if (!fs::exists(log_path)) throw IoError("log file '" + log_path + "' does not exist");
      const auto records = parse_sensor_log(read_file(log_path));
      if (records.empty()) throw ParseError(2, "log contains no records");
      ensure_dir(out_dir);
      log->info("replaying {} records from {}", records.size(), log_path);
      emit_results(out_dir, records, run_pipeline(records, fusion), *log);
    }
  } catch (const IoError& e) {
    log->error("{}", e.what());
    return kExitIo;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return kExitConfig;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace depthfuse
