#include "uwb1a/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uwb1a/errors.hpp"
#include "uwb1a/metrics.hpp"
#include "uwb1a/observability.hpp"
#include "uwb1a/pipeline.hpp"
#include "uwb1a/replay_io.hpp"
#include "uwb1a/simulator.hpp"

namespace uwb1a::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json noise_json(const NoiseConfig& n) {
  return json{{"sigma_r", n.sigma_r},       {"sigma_theta", n.sigma_theta},
              {"sigma_gyro", n.sigma_gyro}, {"sigma_acc", n.sigma_acc},
              {"sigma_mag", n.sigma_mag},   {"seed", n.seed}};
}

json estimator_json(const EstimatorConfig& c) {
  return json{{"th_distance", c.th_distance},
              {"th_linear_motion", c.th_linear_motion},
              {"window_ratio", c.window_ratio},
              {"window_cap", c.window_cap},
              {"smooth_ranges", c.smooth_ranges},
              {"blend_w", c.blend_w},
              {"variance_weighted_blend", c.variance_weighted_blend},
              {"sigma_a", c.sigma_a},
              {"sigma_b", c.sigma_b},
              {"sigma_r_meas", c.sigma_r_meas},
              {"sigma_theta_meas", c.sigma_theta_meas},
              {"init_sigma_theta", c.init_sigma_theta},
              {"init_sigma_v", c.init_sigma_v},
              {"init_sigma_w", c.init_sigma_w},
              {"kf_q", c.kf_q},
              {"kf_gate_sigma", c.kf_gate_sigma},
              {"kf_init_sigma_rdot", c.kf_init_sigma_rdot},
              {"gate_tau", c.gate_tau}};
}

void apply_config_entry(EstimatorConfig& c, const std::string& key,
                        const std::string& value) {
  auto as_double = [&] {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad numeric value for " + key);
    }
  };
  auto as_bool = [&] {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw std::invalid_argument("config: bad boolean value for " + key);
  };
  if (key == "th_distance") c.th_distance = as_double();
  else if (key == "th_linear_motion") c.th_linear_motion = as_double();
  else if (key == "window_ratio") c.window_ratio = as_double();
  else if (key == "window_cap") c.window_cap = static_cast<std::size_t>(as_double());
  else if (key == "smooth_ranges") c.smooth_ranges = as_bool();
  else if (key == "blend_w") c.blend_w = as_double();
  else if (key == "variance_weighted_blend") c.variance_weighted_blend = as_bool();
  else if (key == "sigma_a") c.sigma_a = as_double();
  else if (key == "sigma_b") c.sigma_b = as_double();
  else if (key == "sigma_r_meas") c.sigma_r_meas = as_double();
  else if (key == "sigma_theta_meas") c.sigma_theta_meas = as_double();
  else if (key == "init_sigma_theta") c.init_sigma_theta = as_double();
  else if (key == "init_sigma_v") c.init_sigma_v = as_double();
  else if (key == "init_sigma_w") c.init_sigma_w = as_double();
  else if (key == "kf_q") c.kf_q = as_double();
  else if (key == "kf_gate_sigma") c.kf_gate_sigma = as_double();
  else if (key == "kf_init_sigma_rdot") c.kf_init_sigma_rdot = as_double();
  else if (key == "gate_tau") c.gate_tau = as_double();
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

// Same `key: value` dialect as the log headers; a leading "# " is optional
// in standalone config files.
void apply_config_file(EstimatorConfig& c, const std::string& path) {
  std::istringstream is(read_file(path));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::string body = line;
    if (body.rfind("# ", 0) == 0) body = body.substr(2);
    else if (body[0] == '#') continue;
    const auto colon = body.find(": ");
    if (colon == std::string::npos || colon == 0) {
      throw std::invalid_argument("config: malformed line '" + line + "'");
    }
    apply_config_entry(c, body.substr(0, colon), body.substr(colon + 2));
  }
  c.validate();
}

bool parse_pair(const std::string& text, double& a, double& b) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return false;
  try {
    a = std::stod(text.substr(0, comma));
    b = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    return false;
  }
  return std::isfinite(a) && std::isfinite(b);
}

int cmd_simulate(const std::string& scenario_name, std::uint64_t seed,
                 const std::string& out_dir, const std::optional<std::string>& anchor) {
  Scenario sc;
  try {
    sc = get_scenario(scenario_name, seed);
  } catch (const std::invalid_argument&) {
    std::cerr << "unknown scenario '" << scenario_name << "'; available:";
    for (const auto& n : scenario_names()) std::cerr << " " << n;
    std::cerr << "\n";
    return 2;
  }
  if (anchor) {
    double ax = 0, ay = 0;
    if (!parse_pair(*anchor, ax, ay)) {
      std::cerr << "bad --anchor, expected X,Y\n";
      return 2;
    }
    sc.anchor = {ax, ay};
  }

  auto [truth, log] = simulate_scenario(sc);

  const fs::path dir(out_dir);
  write_file_atomic((dir / "sensor_log.csv").string(), write_sensor_log(log));
  write_file_atomic((dir / "truth.csv").string(), write_truth_track(truth));

  json stages = json::array();
  for (const StageProfile& s : sc.stages) {
    stages.push_back({{"duration", s.duration}, {"v", s.v}, {"w", s.w}});
  }
  json manifest{{"scenario", sc.name},
                {"seed", seed},
                {"anchor", {{"x", sc.anchor.x}, {"y", sc.anchor.y}}},
                {"start",
                 {{"x", sc.start.x}, {"y", sc.start.y}, {"theta", sc.start.theta}}},
                {"noise", noise_json(sc.noise)},
                {"stages", stages},
                {"rates",
                 {{"range_rate", sc.range_rate},
                  {"heading_rate", sc.heading_rate},
                  {"step", sc.step}}},
                {"with_imu", sc.with_imu},
                {"tracker", estimator_json(sc.tracker)},
                {"files", {{"sensor_log", "sensor_log.csv"}, {"truth", "truth.csv"}}}};
  write_file_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
  return 0;
}

json metrics_json(const ErrorSeries& series, std::size_t n_samples) {
  json j{{"rmse", series.rmse},
         {"max_error", series.max_error},
         {"heading_mae", series.heading_mae},
         {"n_samples", n_samples}};
  if (series.ate) j["ate"] = *series.ate;
  return j;
}

int cmd_track(const std::string& log_path, const std::optional<std::string>& truth_path,
              const std::string& mode, const std::optional<std::string>& config_path,
              const std::string& out_dir, double window, bool align_rigid) {
  const SensorLog log = parse_sensor_log(read_file(log_path));

  std::optional<TruthTrack> truth;
  if (truth_path) {
    truth = parse_truth_track(read_file(*truth_path));
  } else if (log.truth) {
    truth = log.truth;
  }

  // Scenario preset (when the log names one), then config file on top.
  EstimatorConfig cfg;
  if (!log.meta.scenario.empty()) {
    try {
      cfg = get_scenario(log.meta.scenario, 0).tracker;
    } catch (const std::invalid_argument&) {
      cfg = EstimatorConfig{};
    }
  }
  if (config_path) apply_config_file(cfg, *config_path);
  cfg.validate();

  const fs::path dir(out_dir);
  const bool run_with = mode == "with" || mode == "both";
  const bool run_vanilla = mode == "vanilla" || mode == "both";

  std::optional<double> rmse_with, rmse_vanilla;
  for (int pass = 0; pass < 2; ++pass) {
    const bool is_with = pass == 0;
    if (is_with && !run_with) continue;
    if (!is_with && !run_vanilla) continue;
    const char* tag = is_with ? "with" : "vanilla";

    PipelineResult res = run_pipeline(
        log, cfg, is_with ? TrackMode::WithSpeedEstimator : TrackMode::Vanilla);
    write_file_atomic((dir / (std::string("pose_track_") + tag + ".csv")).string(),
                      write_pose_track(res.track));
    if (is_with) {
      write_file_atomic((dir / "speed_trace.csv").string(),
                        write_speed_trace_csv(res.speed_trace));
    }
    if (truth) {
      ErrorSeries series = evaluate(res.track, *truth, window,
                                    align_rigid ? std::optional(Alignment::Rigid2d)
                                                : std::optional(Alignment::None));
      json mj = metrics_json(series, res.track.samples.size());
      mj["mode"] = tag;
      mj["blend_count"] = res.blend_count;
      write_file_atomic((dir / (std::string("metrics_") + tag + ".json")).string(),
                        mj.dump(2) + "\n");
      write_file_atomic((dir / (std::string("errors_") + tag + ".csv")).string(),
                        write_error_series_csv(series));
      (is_with ? rmse_with : rmse_vanilla) = series.rmse;
    }
  }

  if (!truth) {
    std::cout << "note: no truth track available; metrics skipped\n";
  }
  if (mode == "both" && rmse_with && rmse_vanilla) {
    json cmp{{"rmse_with", *rmse_with},
             {"rmse_vanilla", *rmse_vanilla},
             {"improvement", *rmse_vanilla > 0.0 ? 1.0 - *rmse_with / *rmse_vanilla : 0.0}};
    write_file_atomic((dir / "comparison.json").string(), cmp.dump(2) + "\n");
  }
  return 0;
}

struct GridAxis {
  double lo = 0.0, hi = 0.0;
  int n = 1;
};

GridAxis parse_axis(const std::string& text) {
  const auto parts = [&] {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto pos = text.find(':', start);
      if (pos == std::string::npos) {
        out.push_back(text.substr(start));
        break;
      }
      out.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
    return out;
  }();
  if (parts.size() != 3) throw std::invalid_argument("grid axis needs lo:hi:count");
  GridAxis ax;
  ax.lo = std::stod(parts[0]);
  ax.hi = std::stod(parts[1]);
  ax.n = std::stoi(parts[2]);
  if (ax.n < 1) throw std::invalid_argument("grid axis count must be >= 1");
  return ax;
}

double axis_value(const GridAxis& ax, int i) {
  if (ax.n == 1) return ax.lo;
  return ax.lo + (ax.hi - ax.lo) * static_cast<double>(i) / static_cast<double>(ax.n - 1);
}

json report_json(const RobotState& s, bool velocity_rows, double tol) {
  json j{{"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}, {"w", s.w}};
  if (s.x == 0.0 && s.y == 0.0) {
    j["valid"] = false;
    return j;
  }
  const ObservabilityReport rep = is_observable(s, velocity_rows, tol);
  j["valid"] = true;
  j["rank"] = rep.rank;
  j["observable"] = rep.observable;
  j["singular_values"] = rep.singular_values;
  j["conditions"] = {{"v_nonzero", rep.v_nonzero},
                     {"not_radial_line", rep.not_radial_line},
                     {"velocity_rows", rep.velocity_rows}};
  return j;
}

int cmd_observability(const std::optional<std::string>& grid_spec,
                      const std::optional<std::string>& state_spec,
                      bool no_velocity_rows, double tol,
                      const std::optional<std::string>& out_path) {
  json reports = json::array();
  const bool velocity_rows = !no_velocity_rows;
  if (state_spec) {
    std::vector<double> vals;
    std::size_t start = 0;
    const std::string& s = *state_spec;
    while (true) {
      const auto pos = s.find(',', start);
      const std::string piece =
          pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start);
      try {
        vals.push_back(std::stod(piece));
      } catch (const std::exception&) {
        std::cerr << "bad --state, expected x,y,theta,v[,w]\n";
        return 2;
      }
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (vals.size() != 4 && vals.size() != 5) {
      std::cerr << "bad --state, expected x,y,theta,v[,w]\n";
      return 2;
    }
    RobotState st{vals[0], vals[1], wrap_angle(vals[2]), vals[3],
                  vals.size() == 5 ? vals[4] : 0.0};
    reports.push_back(report_json(st, velocity_rows, tol));
  } else if (grid_spec) {
    GridAxis gx, gy, gtheta, gv;
    bool saw_x = false, saw_y = false, saw_theta = false, saw_v = false;
    std::size_t start = 0;
    const std::string& spec = *grid_spec;
    try {
      while (start <= spec.size()) {
        const auto pos = spec.find(';', start);
        const std::string piece =
            pos == std::string::npos ? spec.substr(start) : spec.substr(start, pos - start);
        const auto eq = piece.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("grid entry needs axis=lo:hi:count");
        const std::string axis = piece.substr(0, eq);
        const GridAxis parsed = parse_axis(piece.substr(eq + 1));
        if (axis == "x") { gx = parsed; saw_x = true; }
        else if (axis == "y") { gy = parsed; saw_y = true; }
        else if (axis == "theta") { gtheta = parsed; saw_theta = true; }
        else if (axis == "v") { gv = parsed; saw_v = true; }
        else throw std::invalid_argument("unknown grid axis '" + axis + "'");
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
    } catch (const std::exception& e) {
      std::cerr << "bad --grid: " << e.what() << "\n";
      return 2;
    }
    if (!saw_x || !saw_y || !saw_theta || !saw_v) {
      std::cerr << "grid must set x, y, theta, and v axes\n";
      return 2;
    }
    for (int ix = 0; ix < gx.n; ++ix) {
      for (int iy = 0; iy < gy.n; ++iy) {
        for (int it = 0; it < gtheta.n; ++it) {
          for (int iv = 0; iv < gv.n; ++iv) {
            RobotState st{axis_value(gx, ix), axis_value(gy, iy),
                          wrap_angle(axis_value(gtheta, it)), axis_value(gv, iv), 0.0};
            reports.push_back(report_json(st, velocity_rows, tol));
          }
        }
      }
    }
  } else {
    std::cerr << "observability needs --grid or --state\n";
    return 2;
  }

  const std::string text = reports.dump(2) + "\n";
  if (out_path) {
    write_file_atomic(*out_path, text);
  } else {
    std::cout << text;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"single-anchor UWB + IMU localization toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a scenario's sensor log and truth");
  std::string scenario;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string anchor_text;
  sim->add_option("--scenario", scenario, "scenario name")->required();
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--anchor", anchor_text, "anchor override as X,Y");

  // track
  auto* trk = app.add_subcommand("track", "replay a sensor log through the fusion pipeline");
  std::string log_path, truth_path, mode = "with", config_path, track_out = ".";
  double window = 5.0;
  bool align_rigid = false;
  trk->add_option("--log", log_path, "sensor log CSV")->required();
  trk->add_option("--truth", truth_path, "truth track CSV (enables metrics)");
  trk->add_option("--mode", mode, "with|vanilla|both")
      ->check(CLI::IsMember({"with", "vanilla", "both"}));
  trk->add_option("--config", config_path, "estimator config file");
  trk->add_option("--out", track_out, "output directory");
  trk->add_option("--window", window, "windowed-RMSE window [s]");
  trk->add_flag("--align-rigid", align_rigid, "report ATE after rigid 2-D alignment");

  // observability
  auto* obs = app.add_subcommand("observability", "rank reports over a state grid");
  std::string grid_spec, state_spec, obs_out;
  bool no_velocity_rows = false;
  double tol = 1e-10;
  obs->add_option("--grid", grid_spec, "axes as x=lo:hi:n;y=...;theta=...;v=...");
  obs->add_option("--state", state_spec, "single state as x,y,theta,v[,w]");
  obs->add_flag("--no-velocity-rows", no_velocity_rows,
                "drop the velocity measurement gradients");
  obs->add_option("--tol", tol, "relative SVD rank tolerance");
  obs->add_option("--out", obs_out, "write the JSON report here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(scenario, seed, out_dir,
                          anchor_text.empty() ? std::nullopt
                                              : std::optional(anchor_text));
    }
    if (trk->parsed()) {
      return cmd_track(log_path,
                       truth_path.empty() ? std::nullopt : std::optional(truth_path),
                       mode,
                       config_path.empty() ? std::nullopt : std::optional(config_path),
                       track_out, window, align_rigid);
    }
    if (obs->parsed()) {
      return cmd_observability(
          grid_spec.empty() ? std::nullopt : std::optional(grid_spec),
          state_spec.empty() ? std::nullopt : std::optional(state_spec),
          no_velocity_rows, tol,
          obs_out.empty() ? std::nullopt : std::optional(obs_out));
    }
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace uwb1a::cli
