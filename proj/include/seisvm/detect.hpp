#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "seisvm/features.hpp"
#include "seisvm/spectrogram.hpp"
#include "seisvm/svm.hpp"
#include "seisvm/utc.hpp"

namespace seisvm {

/// Predicted label per STFT bin; +1 means pump noise present.
struct LabelTrack {
  std::vector<double> times;  ///< bin centres, seconds from start_time
  std::vector<int> labels;
  UtcTime start_time;
  double hop_seconds = 0.0;
  /// Record length; intervals are clipped to [0, record_seconds].
  double record_seconds = 0.0;

  std::size_t size() const { return labels.size(); }
};

struct Interval {
  UtcTime start;
  UtcTime end;

  double seconds() const { return seconds_between(end, start); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ActivityReport {
  std::vector<Interval> intervals;
  double percent_absent = 0.0;
  std::size_t n_bins = 0;
  std::size_t n_noise_bins = 0;
};

/// Band patterns -> unit-sum normalisation -> scaling -> prediction, per bin.
LabelTrack classify_bins(const SvmModel& model, const ScaleRange& range, const Spectrogram& spec,
                         const BandSelect& band);

double percent_absent(const LabelTrack& track);
double percent_present(const LabelTrack& track);

/// Runs of +1 bins become intervals spanning half a hop either side of the
/// first and last bin centre. Gaps of at most `bridge_gap_bins` clean bins
/// inside a run are bridged first; runs shorter than `min_bins` are dropped.
ActivityReport activity_intervals(const LabelTrack& track, std::size_t min_bins = 1,
                                  std::size_t bridge_gap_bins = 0);

struct ReportPaths {
  std::filesystem::path json;
  std::filesystem::path spectrogram_gnuplot;  ///< empty to skip
  std::filesystem::path labels_gnuplot;       ///< empty to skip
};

/// Report JSON plus the pm3d spectrogram and label-scatter gnuplot datasets.
/// Label rows are `t 0.5 code`, code 90 for +1 and 30 for -1.
void emit_report(const ActivityReport& report, const LabelTrack& track, const Spectrogram& spec,
                 const ReportPaths& paths, const std::string& model_path = {},
                 const std::string& range_path = {});

ActivityReport load_report(const std::filesystem::path& path);

/// Intersection-over-union of two interval sets, each disjoint and sorted.
double interval_iou(const std::vector<Interval>& a, const std::vector<Interval>& b);

}  // namespace seisvm
