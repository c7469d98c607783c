#include "uwb1a/replay_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "uwb1a/errors.hpp"

namespace uwb1a {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError("malformed numeric field '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite numeric field", line);
  }
  return value;
}

std::uint64_t parse_u64(std::string_view field, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("malformed integer field '" + std::string(field) + "'", line);
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Splits into lines; a single trailing newline is canonical and consumed.
std::vector<std::string_view> split_lines(const std::string& text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

struct HeaderScan {
  std::map<std::string, std::string> kv;
  std::size_t first_data_line = 0;  // 0-based index into lines
};

HeaderScan scan_header(const std::vector<std::string_view>& lines,
                       const std::string& magic) {
  if (lines.empty() || lines[0] != "# uwb1a " + magic) {
    throw ParseError("missing '# uwb1a " + magic + "' header", 1);
  }
  HeaderScan scan;
  std::size_t i = 1;
  for (; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) throw ParseError("blank line", i + 1);
    if (line[0] != '#') break;
    if (line.size() < 3 || line[1] != ' ') {
      throw ParseError("malformed header comment", i + 1);
    }
    const std::string_view body = line.substr(2);
    const std::size_t colon = body.find(": ");
    if (colon == std::string_view::npos || colon == 0) {
      throw ParseError("malformed header key-value", i + 1);
    }
    const std::string key(body.substr(0, colon));
    const std::string value(body.substr(colon + 2));
    if (!scan.kv.emplace(key, value).second) {
      throw ParseError("duplicate header key '" + key + "'", i + 1);
    }
  }
  scan.first_data_line = i;

  auto version = scan.kv.find("format_version");
  if (version == scan.kv.end()) throw ParseError("missing format_version", 1);
  if (version->second != "1") {
    throw ParseError("unknown format_version '" + version->second + "'", 1);
  }
  auto units = scan.kv.find("units");
  if (units == scan.kv.end() || units->second != "si") {
    throw ParseError("units must be 'si'", 1);
  }
  return scan;
}

void emit_common_header(std::ostringstream& os, const std::string& magic) {
  os << "# uwb1a " << magic << "\n";
  os << "# format_version: 1\n";
  os << "# units: si\n";
}

const char* const kKnownLogKeys[] = {
    "format_version", "units", "anchor", "scenario", "seed",
    "sigma_r", "sigma_theta", "sigma_gyro", "sigma_acc", "sigma_mag",
    "range_rate", "heading_rate", "step", "stages",
};

bool is_known_log_key(const std::string& key) {
  for (const char* k : kKnownLogKeys) {
    if (key == k) return true;
  }
  return false;
}

}  // namespace

std::string write_sensor_log(const SensorLog& log) {
  std::ostringstream os;
  emit_common_header(os, "sensor-log");
  const LogMeta& m = log.meta;
  os << "# anchor: " << fmt6(m.anchor.x) << "," << fmt6(m.anchor.y) << "\n";
  if (!m.scenario.empty()) os << "# scenario: " << m.scenario << "\n";
  os << "# seed: " << m.noise.seed << "\n";
  os << "# sigma_r: " << fmt6(m.noise.sigma_r) << "\n";
  os << "# sigma_theta: " << fmt6(m.noise.sigma_theta) << "\n";
  os << "# sigma_gyro: " << fmt6(m.noise.sigma_gyro) << "\n";
  os << "# sigma_acc: " << fmt6(m.noise.sigma_acc) << "\n";
  os << "# sigma_mag: " << fmt6(m.noise.sigma_mag) << "\n";
  os << "# range_rate: " << fmt6(m.range_rate) << "\n";
  os << "# heading_rate: " << fmt6(m.heading_rate) << "\n";
  os << "# step: " << fmt6(m.step) << "\n";
  if (!m.stages.empty()) {
    os << "# stages: ";
    for (std::size_t i = 0; i < m.stages.size(); ++i) {
      if (i) os << ";";
      os << fmt6(m.stages[i].duration) << ":" << fmt6(m.stages[i].v) << ":"
         << fmt6(m.stages[i].w);
    }
    os << "\n";
  }
  for (const auto& [key, value] : m.extra) {
    if (!is_known_log_key(key)) os << "# " << key << ": " << value << "\n";
  }

  // Merge the streams in time order (ties: range, imu, heading) so the file
  // reads chronologically.
  std::size_t ir = 0, ii = 0, ih = 0;
  auto next_kind = [&]() -> int {
    double tr = ir < log.ranges.size() ? log.ranges[ir].t : INFINITY;
    double ti = ii < log.imu.size() ? log.imu[ii].t : INFINITY;
    double th = ih < log.headings.size() ? log.headings[ih].t : INFINITY;
    if (tr == INFINITY && ti == INFINITY && th == INFINITY) return -1;
    if (tr <= ti && tr <= th) return 0;
    if (ti <= th) return 1;
    return 2;
  };
  for (int k = next_kind(); k >= 0; k = next_kind()) {
    if (k == 0) {
      const RangeSample& s = log.ranges[ir++];
      os << "range," << fmt6(s.t) << "," << fmt6(s.r) << "\n";
    } else if (k == 1) {
      const ImuSample& s = log.imu[ii++];
      os << "imu," << fmt6(s.t);
      for (double v : s.acc) os << "," << fmt6(v);
      for (double v : s.gyro) os << "," << fmt6(v);
      for (double v : s.mag) os << "," << fmt6(v);
      os << "\n";
    } else {
      const HeadingSample& s = log.headings[ih++];
      os << "heading," << fmt6(s.t) << "," << fmt6(s.theta) << "\n";
    }
  }
  return os.str();
}

SensorLog parse_sensor_log(const std::string& text) {
  const auto lines = split_lines(text);
  const HeaderScan scan = scan_header(lines, "sensor-log");

  SensorLog log;
  for (const auto& [key, value] : scan.kv) {
    if (key == "format_version" || key == "units") continue;
    const std::size_t line = 1;  // header values blame the file head
    if (key == "anchor") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw ParseError("anchor needs two fields", line);
      log.meta.anchor.x = parse_double(parts[0], line);
      log.meta.anchor.y = parse_double(parts[1], line);
    } else if (key == "scenario") {
      log.meta.scenario = value;
    } else if (key == "seed") {
      log.meta.noise.seed = parse_u64(value, line);
    } else if (key == "sigma_r") {
      log.meta.noise.sigma_r = parse_double(value, line);
    } else if (key == "sigma_theta") {
      log.meta.noise.sigma_theta = parse_double(value, line);
    } else if (key == "sigma_gyro") {
      log.meta.noise.sigma_gyro = parse_double(value, line);
    } else if (key == "sigma_acc") {
      log.meta.noise.sigma_acc = parse_double(value, line);
    } else if (key == "sigma_mag") {
      log.meta.noise.sigma_mag = parse_double(value, line);
    } else if (key == "range_rate") {
      log.meta.range_rate = parse_double(value, line);
    } else if (key == "heading_rate") {
      log.meta.heading_rate = parse_double(value, line);
    } else if (key == "step") {
      log.meta.step = parse_double(value, line);
    } else if (key == "stages") {
      for (const auto stage_sv : split(value, ';')) {
        const auto parts = split(stage_sv, ':');
        if (parts.size() != 3) throw ParseError("stage needs duration:v:w", line);
        StageProfile sp;
        sp.duration = parse_double(parts[0], line);
        sp.v = parse_double(parts[1], line);
        sp.w = parse_double(parts[2], line);
        if (!(sp.duration > 0.0)) throw ParseError("stage duration must be > 0", line);
        log.meta.stages.push_back(sp);
      }
    } else {
      log.meta.extra[key] = value;
    }
  }
  try {
    log.meta.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 1);
  }

  double last_r = -INFINITY, last_h = -INFINITY, last_i = -INFINITY;
  for (std::size_t i = scan.first_data_line; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    const auto fields = split(lines[i], ',');
    if (fields.empty() || fields[0].empty()) throw ParseError("empty row", line);
    const std::string_view kind = fields[0];
    if (kind == "range") {
      if (fields.size() != 3) throw ParseError("range row needs kind,t,r", line);
      RangeSample s;
      s.t = parse_double(fields[1], line);
      s.r = parse_double(fields[2], line);
      if (s.r < 0.0) throw ParseError("negative range", line);
      if (!(s.t > last_r)) throw ParseError("non-monotone range timestamp", line);
      last_r = s.t;
      log.ranges.push_back(s);
    } else if (kind == "heading") {
      if (fields.size() != 3) throw ParseError("heading row needs kind,t,theta", line);
      HeadingSample s;
      s.t = parse_double(fields[1], line);
      s.theta = parse_double(fields[2], line);
      if (!(s.t > last_h)) throw ParseError("non-monotone heading timestamp", line);
      last_h = s.t;
      log.headings.push_back(s);
    } else if (kind == "imu") {
      if (fields.size() != 11) {
        throw ParseError("imu row needs kind,t,ax,ay,az,gx,gy,gz,mx,my,mz", line);
      }
      ImuSample s;
      s.t = parse_double(fields[1], line);
      for (int k = 0; k < 3; ++k) s.acc[static_cast<std::size_t>(k)] = parse_double(fields[static_cast<std::size_t>(2 + k)], line);
      for (int k = 0; k < 3; ++k) s.gyro[static_cast<std::size_t>(k)] = parse_double(fields[static_cast<std::size_t>(5 + k)], line);
      for (int k = 0; k < 3; ++k) s.mag[static_cast<std::size_t>(k)] = parse_double(fields[static_cast<std::size_t>(8 + k)], line);
      if (!(s.t > last_i)) throw ParseError("non-monotone imu timestamp", line);
      last_i = s.t;
      log.imu.push_back(s);
    } else {
      throw ParseError("unknown row kind '" + std::string(kind) + "'", line);
    }
  }
  return log;
}

std::string write_truth_track(const TruthTrack& track) {
  std::ostringstream os;
  emit_common_header(os, "truth-track");
  for (const TruthSample& s : track.samples) {
    os << fmt6(s.t) << "," << fmt6(s.state.x) << "," << fmt6(s.state.y) << ","
       << fmt6(s.state.theta) << "," << fmt6(s.state.v) << "," << fmt6(s.state.w)
       << "\n";
  }
  return os.str();
}

TruthTrack parse_truth_track(const std::string& text) {
  const auto lines = split_lines(text);
  const HeaderScan scan = scan_header(lines, "truth-track");
  TruthTrack track;
  double last_t = -INFINITY;
  for (std::size_t i = scan.first_data_line; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    const auto fields = split(lines[i], ',');
    if (fields.size() != 6) throw ParseError("truth row needs t,x,y,theta,v,w", line);
    TruthSample s;
    s.t = parse_double(fields[0], line);
    s.state.x = parse_double(fields[1], line);
    s.state.y = parse_double(fields[2], line);
    s.state.theta = parse_double(fields[3], line);
    s.state.v = parse_double(fields[4], line);
    s.state.w = parse_double(fields[5], line);
    if (!(s.t > last_t)) throw ParseError("non-monotone truth timestamp", line);
    last_t = s.t;
    track.samples.push_back(s);
  }
  return track;
}

std::string write_pose_track(const PoseTrack& track) {
  std::ostringstream os;
  emit_common_header(os, "pose-track");
  for (const PoseSample& s : track.samples) {
    os << fmt6(s.t) << "," << fmt6(s.state.x) << "," << fmt6(s.state.y) << ","
       << fmt6(s.state.theta) << "," << fmt6(s.state.v) << "," << fmt6(s.state.w)
       << "," << fmt6(std::sqrt(std::max(0.0, s.cov_diag[0]))) << ","
       << fmt6(std::sqrt(std::max(0.0, s.cov_diag[1]))) << ","
       << (s.speed_corrected ? "1" : "0") << "\n";
  }
  return os.str();
}

PoseTrack parse_pose_track(const std::string& text) {
  const auto lines = split_lines(text);
  const HeaderScan scan = scan_header(lines, "pose-track");
  PoseTrack track;
  double last_t = -INFINITY;
  for (std::size_t i = scan.first_data_line; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    const auto fields = split(lines[i], ',');
    if (fields.size() != 9) {
      throw ParseError("pose row needs t,x,y,theta,v,w,sigma_x,sigma_y,speed_corrected",
                       line);
    }
    PoseSample s;
    s.t = parse_double(fields[0], line);
    s.state.x = parse_double(fields[1], line);
    s.state.y = parse_double(fields[2], line);
    s.state.theta = parse_double(fields[3], line);
    s.state.v = parse_double(fields[4], line);
    s.state.w = parse_double(fields[5], line);
    const double sx = parse_double(fields[6], line);
    const double sy = parse_double(fields[7], line);
    s.cov_diag[0] = sx * sx;
    s.cov_diag[1] = sy * sy;
    if (fields[8] == "1") {
      s.speed_corrected = true;
    } else if (fields[8] == "0") {
      s.speed_corrected = false;
    } else {
      throw ParseError("speed_corrected must be 0 or 1", line);
    }
    if (!(s.t > last_t)) throw ParseError("non-monotone pose timestamp", line);
    last_t = s.t;
    track.samples.push_back(s);
  }
  return track;
}

std::string write_error_series_csv(const ErrorSeries& series) {
  std::ostringstream os;
  emit_common_header(os, "error-series");
  for (std::size_t i = 0; i < series.errors.size(); ++i) {
    os << fmt6(series.errors[i].t) << "," << fmt6(series.errors[i].value) << ","
       << fmt6(series.windowed[i].value) << "\n";
  }
  return os.str();
}

std::string write_speed_trace_csv(const std::vector<SpeedTracePoint>& trace) {
  std::ostringstream os;
  emit_common_header(os, "speed-trace");
  for (const SpeedTracePoint& p : trace) {
    os << fmt6(p.t) << "," << fmt6(p.raw_v) << "," << fmt6(p.windowed_v) << ","
       << (p.blended ? "1" : "0") << "," << (p.stale ? "1" : "0") << "\n";
  }
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("short write: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace uwb1a
