#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seisvm/utc.hpp"

namespace seisvm {

/**
 * Uniformly sampled single-channel ground-motion record.
 *
 * Samples are sensor counts stored as doubles. The object is immutable after
 * construction; the constructor rejects a non-positive sampling rate and any
 * non-finite sample.
 */
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double fs, UtcTime start_time,
             std::string station_id = {});

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double fs() const { return fs_; }
  UtcTime start_time() const { return start_time_; }
  const std::string& station_id() const { return station_id_; }

  double duration_seconds() const { return static_cast<double>(samples_.size()) / fs_; }
  /// One sample period past the last sample.
  UtcTime end_time() const { return add_seconds(start_time_, duration_seconds()); }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> samples_;
  double fs_;
  UtcTime start_time_;
  std::string station_id_;
};

enum class TimeSeriesFormat { csv, raw_f64le };

TimeSeriesFormat parse_timeseries_format(std::string_view name);

/// Guess the format from the extension: `.csv` is CSV, anything else raw.
TimeSeriesFormat timeseries_format_for(const std::filesystem::path& path);

/// Sidecar header path of a raw-f64le payload (`day.f64` -> `day.f64.json`).
std::filesystem::path raw_sidecar_path(const std::filesystem::path& payload);

TimeSeries load_timeseries(const std::filesystem::path& path, TimeSeriesFormat format);
void save_timeseries(const TimeSeries& ts, const std::filesystem::path& path,
                     TimeSeriesFormat format);

/// Samples in [start, end). Indices are rounded to the nearest sample.
TimeSeries slice_utc(const TimeSeries& ts, UtcTime start, UtcTime end);

/// Two-tap pairwise average: out[i] = (in[2i] + in[2i+1]) / 2, fs halved.
/// An odd trailing sample is dropped. The new start time is the centroid of
/// the first pair.
TimeSeries downsample_half(const TimeSeries& ts);

}  // namespace seisvm
