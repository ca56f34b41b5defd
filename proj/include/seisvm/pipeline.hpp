#pragma once

#include <cstdint>
#include <filesystem>

#include "seisvm/features.hpp"
#include "seisvm/modelselect.hpp"
#include "seisvm/spectrogram.hpp"
#include "seisvm/svm.hpp"
#include "seisvm/timeseries.hpp"

namespace seisvm {

/// Every tunable of the staged workflow, serialisable as one JSON file.
struct PipelineConfig {
  StftParams stft;
  BandSelect band;
  double scale_lower = -1.0;
  double scale_upper = 1.0;
  KernelSpec kernel;  ///< gamma here is used only outside grid search
  GridSpec grid;
  CvConfig cv;
  std::uint64_t seed = 0;

  void validate() const;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void save_pipeline_config(const PipelineConfig& cfg, const std::filesystem::path& path);

/// Spectrogram -> band patterns -> unit-sum normalisation, unlabelled.
FeatureMatrix featurize(const TimeSeries& ts, const PipelineConfig& cfg);

/// Featurised noise record (+1) stacked over featurised clean record (-1).
FeatureMatrix build_training_set(const TimeSeries& noise, const TimeSeries& clean,
                                 const PipelineConfig& cfg);

}  // namespace seisvm
