#include "seisvm/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "seisvm/error.hpp"
#include "seisvm/io_util.hpp"

namespace seisvm {

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

double covered_seconds(const std::vector<Interval>& v) {
  double s = 0.0;
  for (const Interval& i : v) s += i.seconds();
  return s;
}

}  // namespace

LabelTrack classify_bins(const SvmModel& model, const ScaleRange& range, const Spectrogram& spec,
                         const BandSelect& band) {
  band.validate(spec.rows());
  if (model.n_features() > band.width()) {
    throw ValidationError("model expects " + std::to_string(model.n_features()) +
                          " features but the band yields " + std::to_string(band.width()));
  }
  if (range.features.size() != band.width()) {
    throw ValidationError("range file covers " + std::to_string(range.features.size()) +
                          " features but the band yields " + std::to_string(band.width()));
  }
  LabelTrack track;
  track.start_time = spec.start_time();
  track.hop_seconds = spec.hop_seconds();
  track.record_seconds = spec.record_seconds();
  track.times = spec.times();
  track.labels.resize(spec.cols());

  const FeatureMatrix patterns = normalize_unit_sum(extract_band_patterns(spec, band));
  std::vector<double> x(band.width());
  for (std::size_t j = 0; j < spec.cols(); ++j) {
    std::ranges::copy(patterns.pattern(j), x.begin());
    apply_scale_inplace(x, range);
    track.labels[j] = predict(model, x);
  }
  return track;
}

double percent_absent(const LabelTrack& track) {
  if (track.labels.empty()) throw ValidationError("label track is empty");
  const auto clean = std::ranges::count(track.labels, kCleanLabel);
  return 100.0 * static_cast<double>(clean) / static_cast<double>(track.labels.size());
}

double percent_present(const LabelTrack& track) {
  if (track.labels.empty()) throw ValidationError("label track is empty");
  const auto noisy = std::ranges::count(track.labels, kNoiseLabel);
  return 100.0 * static_cast<double>(noisy) / static_cast<double>(track.labels.size());
}

ActivityReport activity_intervals(const LabelTrack& track, std::size_t min_bins,
                                  std::size_t bridge_gap_bins) {
  if (track.labels.empty()) throw ValidationError("label track is empty");
  if (track.times.size() != track.labels.size()) {
    throw ValidationError("label track times and labels differ in length");
  }
  ActivityReport report;
  report.n_bins = track.labels.size();
  report.n_noise_bins = static_cast<std::size_t>(std::ranges::count(track.labels, kNoiseLabel));
  report.percent_absent = percent_absent(track);

  // Runs as [first, last] bin indices, bridged across short clean gaps.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t j = 0; j < track.labels.size(); ++j) {
    if (track.labels[j] != kNoiseLabel) continue;
    if (!runs.empty() && j - runs.back().second - 1 <= bridge_gap_bins) {
      runs.back().second = j;
    } else {
      runs.emplace_back(j, j);
    }
  }
  const double half_hop = track.hop_seconds / 2.0;
  for (const auto& [first, last] : runs) {
    if (last - first + 1 < min_bins) continue;
    const double t0 = std::max(0.0, track.times[first] - half_hop);
    const double t1 = std::min(track.record_seconds, track.times[last] + half_hop);
    report.intervals.push_back(
        {add_seconds(track.start_time, t0), add_seconds(track.start_time, t1)});
  }
  return report;
}

void emit_report(const ActivityReport& report, const LabelTrack& track, const Spectrogram& spec,
                 const ReportPaths& paths, const std::string& model_path,
                 const std::string& range_path) {
  nlohmann::ordered_json j;
  j["percent_absent"] = round4(report.percent_absent);
  j["n_bins"] = report.n_bins;
  j["n_noise_bins"] = report.n_noise_bins;
  j["intervals"] = nlohmann::ordered_json::array();
  for (const Interval& iv : report.intervals) {
    j["intervals"].push_back({{"start", format_rfc3339(iv.start)}, {"end", format_rfc3339(iv.end)}});
  }
  j["model"] = model_path;
  j["range"] = range_path;
  io::write_text(paths.json, j.dump(2) + "\n");

  if (!paths.spectrogram_gnuplot.empty()) {
    write_spectrogram_gnuplot(spec, paths.spectrogram_gnuplot);
  }
  if (!paths.labels_gnuplot.empty()) {
    std::string out;
    char line[64];
    for (std::size_t i = 0; i < track.size(); ++i) {
      std::snprintf(line, sizeof line, "%.6f 0.5 %d\n", track.times[i],
                    track.labels[i] == kNoiseLabel ? 90 : 30);
      out += line;
    }
    io::write_text(paths.labels_gnuplot, out);
  }
}

ActivityReport load_report(const std::filesystem::path& path) {
  ActivityReport report;
  try {
    const auto j = nlohmann::json::parse(io::read_text(path));
    report.percent_absent = j.at("percent_absent").get<double>();
    report.n_bins = j.at("n_bins").get<std::size_t>();
    report.n_noise_bins = j.value("n_noise_bins", std::size_t{0});
    for (const auto& iv : j.at("intervals")) {
      report.intervals.push_back({parse_rfc3339(iv.at("start").get<std::string>()),
                                  parse_rfc3339(iv.at("end").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed report: " + e.what());
  }
  return report;
}

double interval_iou(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double inter = 0.0;
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < a.size() && k < b.size()) {
    const UtcTime lo = std::max(a[i].start, b[k].start);
    const UtcTime hi = std::min(a[i].end, b[k].end);
    if (lo < hi) inter += seconds_between(hi, lo);
    if (a[i].end < b[k].end) ++i; else ++k;
  }
  const double uni = covered_seconds(a) + covered_seconds(b) - inter;
  return uni > 0.0 ? inter / uni : 1.0;
}

}  // namespace seisvm
