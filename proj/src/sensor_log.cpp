#include "depthfuse/sensor_log.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string_view>

#include "depthfuse/errors.hpp"

namespace depthfuse {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line, const char* name) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, std::string("malformed ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

std::optional<double> parse_channel(std::string_view field, std::size_t line, const char* name) {
  if (field.empty()) return std::nullopt;
  const double v = parse_number(field, line, name);
  if (!(v > 0.0)) {
    throw ParseError(line, std::string(name) + " must be positive, got '" + std::string(field) + "'");
  }
  return v;
}

void append_optional(std::string& out, const std::optional<double>& v) {
  if (v) out += format_fixed6(*v);
}

}  // namespace

std::string format_fixed6(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<SensorLogRecord> parse_sensor_log(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) throw ParseError(1, "empty log: missing header");
  ++line_no;
  std::string_view header = strip_cr(raw);
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  if (header != kSensorLogHeader) {
    throw ParseError(1, "header mismatch: expected '" + std::string(kSensorLogHeader) + "', got '" +
                            std::string(header) + "'");
  }

  std::vector<SensorLogRecord> records;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    SensorLogRecord r;
    r.line = line_no;
    if (fields[0].empty()) throw ParseError(line_no, "missing timestamp");
    r.t = parse_number(fields[0], line_no, "t");
    r.sh_px = parse_channel(fields[1], line_no, "sh_px");
    r.depth_cb_m = parse_channel(fields[2], line_no, "depth_cb_m");
    r.gt_cb_m = parse_channel(fields[3], line_no, "gt_cb_m");
    if (!records.empty() && !(r.t > records.back().t)) {
      throw NonMonotoneTimestampError(
          records.size(), "line " + std::to_string(line_no) + ": timestamp " +
                              std::string(fields[0]) + " does not increase");
    }
    records.push_back(r);
  }
  return records;
}

std::vector<SensorLogRecord> parse_sensor_log(const std::string& text) {
  std::istringstream in(text);
  return parse_sensor_log(in);
}

std::string format_sensor_log(std::span<const SensorLogRecord> records) {
  std::string out = std::string(kSensorLogHeader) + "\n";
  for (const auto& r : records) {
    out += format_fixed6(r.t);
    out += ',';
    append_optional(out, r.sh_px);
    out += ',';
    append_optional(out, r.depth_cb_m);
    out += ',';
    append_optional(out, r.gt_cb_m);
    out += '\n';
  }
  return out;
}

std::vector<SensorLogRecord> to_log_records(std::span<const SimulatedFrame> frames) {
  std::vector<SensorLogRecord> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    out.push_back({f.truth.timestamp, f.sh_px, f.depth_m, f.truth.true_cb, 0});
  }
  return out;
}

std::string format_trace(std::span<const FusionOutput> outputs) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& o : outputs) {
    out += format_fixed6(o.timestamp);
    out += ',';
    append_optional(out, o.fused_cb);
    out += ',';
    append_optional(out, o.monocular_cb);
    out += ',';
    append_optional(out, o.depth_cb);
    out += ',';
    out += o.gate_open ? '1' : '0';
    out += ',';
    out += format_fixed6(o.covariance_trace);
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  if (!std::getline(in, raw) || strip_cr(raw) != kTraceHeader) {
    throw ParseError(1, "trace header mismatch");
  }
  std::vector<TraceRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 6) throw ParseError(line_no, "expected 6 fields");
    TraceRecord r;
    r.t = parse_number(f[0], line_no, "t");
    r.fused_m = parse_channel(f[1], line_no, "fused_m");
    r.keypoint_m = parse_channel(f[2], line_no, "keypoint_m");
    r.depth_m = parse_channel(f[3], line_no, "depth_m");
    if (f[4] != "0" && f[4] != "1") throw ParseError(line_no, "gate_open must be 0 or 1");
    r.gate_open = f[4] == "1";
    r.cov_trace = parse_number(f[5], line_no, "cov_trace");
    out.push_back(r);
  }
  return out;
}

std::string format_plot_data(std::span<const SensorLogRecord> records,
                             std::span<const FusionOutput> outputs) {
  std::string out = std::string(kPlotDataHeader) + "\n";
  auto row = [&out](double t, const char* series, double v) {
    out += format_fixed6(t);
    out += ',';
    out += series;
    out += ',';
    out += format_fixed6(v);
    out += '\n';
  };
  const std::size_t n = std::min(records.size(), outputs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    const auto& o = outputs[i];
    if (r.gt_cb_m) row(r.t, "truth", *r.gt_cb_m);
    if (o.monocular_cb) row(r.t, "keypoint", *o.monocular_cb);
    if (o.depth_cb) row(r.t, "depth", *o.depth_cb);
    if (o.fused_cb) row(r.t, "fused", *o.fused_cb);
    if (r.gt_cb_m) {
      if (o.monocular_cb) row(r.t, "keypoint_err", *o.monocular_cb - *r.gt_cb_m);
      if (o.depth_cb) row(r.t, "depth_err", *o.depth_cb - *r.gt_cb_m);
      if (o.fused_cb) row(r.t, "fused_err", *o.fused_cb - *r.gt_cb_m);
    }
  }
  return out;
}

}  // namespace depthfuse
