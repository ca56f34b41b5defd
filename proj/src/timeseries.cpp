#include "seisvm/timeseries.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "seisvm/error.hpp"
#include "seisvm/io_util.hpp"

namespace seisvm {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

TimeSeries load_csv(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  std::vector<double> samples;
  double fs = 0.0;
  bool have_fs = false;
  bool have_start = false;
  UtcTime start;
  std::string station;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ValidationError(where() + "malformed header line, expected '# key=value'");
      }
      const std::string_view key = trim(body.substr(0, eq));
      const std::string_view value = trim(body.substr(eq + 1));
      try {
        if (key == "fs") {
          fs = io::parse_real(value, "fs");
          have_fs = true;
        } else if (key == "start") {
          start = parse_rfc3339(value);
          have_start = true;
        } else if (key == "station") {
          station = std::string(value);
        } else {
          throw ValidationError("unknown header key '" + std::string(key) + "'");
        }
      } catch (const ValidationError& e) {
        throw ValidationError(where() + e.what());
      }
      continue;
    }
    double v = 0.0;
    try {
      v = io::parse_real(line, "sample");
    } catch (const ValidationError& e) {
      throw ValidationError(where() + e.what());
    }
    if (!std::isfinite(v)) {
      throw ValidationError(where() + "non-finite sample '" + std::string(line) + "'");
    }
    samples.push_back(v);
  }
  if (!have_fs) throw ValidationError(path.string() + ": header lacks '# fs=' line");
  if (!have_start) throw ValidationError(path.string() + ": header lacks '# start=' line");
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw ValidationError(path.string() + ": fs must be positive, got " + io::format_real(fs));
  }
  return TimeSeries(std::move(samples), fs, start, std::move(station));
}

void save_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  std::string out;
  out.reserve(ts.size() * 12 + 128);
  out += "# fs=" + io::format_real(ts.fs()) + "\n";
  out += "# start=" + format_rfc3339(ts.start_time()) + "\n";
  if (!ts.station_id().empty()) out += "# station=" + ts.station_id() + "\n";
  for (double v : ts.samples()) {
    out += io::format_real(v);
    out += '\n';
  }
  io::write_text(path, out);
}

TimeSeries load_raw(const std::filesystem::path& path) {
  const auto sidecar = raw_sidecar_path(path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(io::read_text(sidecar));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(sidecar.string() + ": malformed header: " + e.what());
  }
  double fs = 0.0;
  UtcTime start;
  std::string station;
  std::size_t n = 0;
  try {
    fs = header.at("fs").get<double>();
    start = parse_rfc3339(header.at("start").get<std::string>());
    if (header.contains("station")) station = header.at("station").get<std::string>();
    n = header.at("n").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(sidecar.string() + ": malformed header: " + e.what());
  }
  if (!(fs > 0.0)) {
    throw ValidationError(sidecar.string() + ": fs must be positive");
  }
  std::vector<double> samples = io::read_f64le(path);
  if (samples.size() != n) {
    throw ValidationError(path.string() + ": header declares n=" + std::to_string(n) +
                          " but payload holds " + std::to_string(samples.size()) + " samples");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw ValidationError(path.string() + ": non-finite sample at byte offset " +
                            std::to_string(8 * i));
    }
  }
  return TimeSeries(std::move(samples), fs, start, std::move(station));
}

void save_raw(const TimeSeries& ts, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["fs"] = ts.fs();
  header["start"] = format_rfc3339(ts.start_time());
  header["station"] = ts.station_id();
  header["n"] = ts.size();
  io::write_f64le(path, ts.samples());
  io::write_text(raw_sidecar_path(path), header.dump(2) + "\n");
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> samples, double fs, UtcTime start_time,
                       std::string station_id)
    : samples_(std::move(samples)),
      fs_(fs),
      start_time_(start_time),
      station_id_(std::move(station_id)) {
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw ValidationError("sampling rate must be positive and finite");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw ValidationError("non-finite sample at index " + std::to_string(i));
    }
  }
}

TimeSeriesFormat parse_timeseries_format(std::string_view name) {
  if (name == "csv") return TimeSeriesFormat::csv;
  if (name == "raw-f64le" || name == "raw") return TimeSeriesFormat::raw_f64le;
  throw ValidationError("unknown time series format '" + std::string(name) + "'");
}

TimeSeriesFormat timeseries_format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? TimeSeriesFormat::csv : TimeSeriesFormat::raw_f64le;
}

std::filesystem::path raw_sidecar_path(const std::filesystem::path& payload) {
  auto p = payload;
  p += ".json";
  return p;
}

TimeSeries load_timeseries(const std::filesystem::path& path, TimeSeriesFormat format) {
  return format == TimeSeriesFormat::csv ? load_csv(path) : load_raw(path);
}

void save_timeseries(const TimeSeries& ts, const std::filesystem::path& path,
                     TimeSeriesFormat format) {
  if (format == TimeSeriesFormat::csv) {
    save_csv(ts, path);
  } else {
    save_raw(ts, path);
  }
}

TimeSeries slice_utc(const TimeSeries& ts, UtcTime start, UtcTime end) {
  if (!(start < end)) {
    throw ValidationError("inverted window: start " + format_rfc3339(start) +
                          " is not before end " + format_rfc3339(end));
  }
  if (start < ts.start_time()) {
    throw ValidationError("window starts before record");
  }
  if (end > ts.end_time()) {
    throw ValidationError("window exceeds record");
  }
  const double fs = ts.fs();
  const auto index_of = [&](UtcTime t) {
    return static_cast<std::size_t>(std::llround(seconds_between(t, ts.start_time()) * fs));
  };
  const std::size_t first = index_of(start);
  const std::size_t last = std::min(index_of(end), ts.size());
  if (first >= last) {
    throw ValidationError("window shorter than one sample");
  }
  const auto s = ts.samples();
  return TimeSeries(std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(first),
                                        s.begin() + static_cast<std::ptrdiff_t>(last)),
                    fs, add_seconds(ts.start_time(), static_cast<double>(first) / fs),
                    ts.station_id());
}

TimeSeries downsample_half(const TimeSeries& ts) {
  if (ts.size() < 2) {
    throw ValidationError("downsampling needs at least 2 samples");
  }
  const auto in = ts.samples();
  std::vector<double> out(in.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (in[2 * i] + in[2 * i + 1]) / 2.0;
  }
  return TimeSeries(std::move(out), ts.fs() / 2.0, add_seconds(ts.start_time(), 0.5 / ts.fs()),
                    ts.station_id());
}

}  // namespace seisvm
