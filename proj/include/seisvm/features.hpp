#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "seisvm/matrix.hpp"
#include "seisvm/spectrogram.hpp"

namespace seisvm {

/// +1 marks pump noise present, -1 absent.
constexpr int kNoiseLabel = +1;
constexpr int kCleanLabel = -1;

/**
 * Per-time-bin feature patterns, one row per pattern.
 *
 * Labels and times are optional; when present each has one entry per row.
 * Every entry is finite and every label is +1 or -1.
 */
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(Matrix patterns, std::optional<std::vector<int>> labels = std::nullopt,
                         std::optional<std::vector<double>> times = std::nullopt);

  const Matrix& patterns() const { return patterns_; }
  std::size_t n_patterns() const { return patterns_.rows(); }
  std::size_t n_features() const { return patterns_.cols(); }
  std::span<const double> pattern(std::size_t i) const { return patterns_.row(i); }

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const;
  const std::optional<std::vector<int>>& maybe_labels() const { return labels_; }
  const std::optional<std::vector<double>>& times() const { return times_; }

  /// Rows at `indices`, in that order, with labels and times carried along.
  FeatureMatrix subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  Matrix patterns_;
  std::optional<std::vector<int>> labels_;
  std::optional<std::vector<double>> times_;
};

/// 1-based inclusive PSD row range; default keeps rows 3..202.
struct BandSelect {
  std::size_t row_start = 3;
  std::size_t row_end = 202;

  std::size_t width() const { return row_end - row_start + 1; }
  void validate(std::size_t n_rows) const;
};

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  bool is_constant() const { return min == max; }
};

/// Affine per-feature scaling to [lower, upper] fitted on training patterns.
struct ScaleRange {
  double lower = -1.0;
  double upper = 1.0;
  std::vector<FeatureRange> features;
};

FeatureMatrix extract_band_patterns(const Spectrogram& spec, const BandSelect& band);

/// Divides every pattern by its own sum.
FeatureMatrix normalize_unit_sum(const FeatureMatrix& fm);

/// `pos` rows labelled +1 followed by `neg` rows labelled -1.
FeatureMatrix stack_labeled(const FeatureMatrix& pos, const FeatureMatrix& neg);

ScaleRange fit_scale(const FeatureMatrix& fm, double lower = -1.0, double upper = 1.0);

/// x' = lower + (upper - lower) (x - min) / (max - min). Constant features
/// map to 0; values outside the fitted range are not clamped.
FeatureMatrix apply_scale(const FeatureMatrix& fm, const ScaleRange& range);
void apply_scale_inplace(std::span<double> pattern, const ScaleRange& range);

/**
 * Sparse pattern text: `<label> <idx>:<value> ...`, 1-based ascending
 * indices, zeros omitted. Unlabelled matrices are written with label `0`.
 */
void write_sparse(const FeatureMatrix& fm, const std::filesystem::path& path);

/// Reads a sparse pattern file. The feature count is `n_features` when given
/// (indices beyond it are an error) and the largest index seen otherwise. A
/// file whose labels are all `0` yields an unlabelled matrix.
FeatureMatrix read_sparse(const std::filesystem::path& path,
                          std::optional<std::size_t> n_features = std::nullopt);

/// Range file: `x`, `<lower> <upper>`, then `<idx> <min> <max>` per feature.
void write_range(const ScaleRange& range, const std::filesystem::path& path);

/// Features missing from the file (the reference scaler omits constant ones)
/// read back as constant zero.
ScaleRange read_range(const std::filesystem::path& path,
                      std::optional<std::size_t> n_features = std::nullopt);

}  // namespace seisvm
