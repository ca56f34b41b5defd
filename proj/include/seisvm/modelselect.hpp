#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "seisvm/features.hpp"
#include "seisvm/svm.hpp"

namespace seisvm {

struct CvConfig {
  std::size_t k = 5;
  std::uint64_t shuffle_seed = 0;
  bool stratified = true;
};

/// Shuffles 0..n-1 with the seed and deals the indices round-robin into k
/// folds. When stratified, each class is shuffled and dealt in turn (class
/// +1 first), continuing where the previous class stopped, so both fold sizes
/// and per-class counts differ by at most one. Each fold is sorted ascending.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::span<const int> labels,
                                                  const CvConfig& cfg);

struct CvResult {
  double accuracy_percent = 0.0;  ///< pooled: 100 * correct / n
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<double> fold_accuracy_percent;
  /// Out-of-fold prediction for every pattern, in input order.
  std::vector<int> predictions;
};

CvResult cross_validate(const FeatureMatrix& data, const TrainConfig& cfg, const CvConfig& cv);

/// Arithmetic sequence of base-2 exponents, stop inclusive.
struct ExponentRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

struct GridSpec {
  ExponentRange log2_c{-5.0, 15.0, 2.0};
  ExponentRange log2_gamma{-15.0, 3.0, 2.0};
};

struct GridCell {
  double c = 0.0;
  double gamma = 0.0;
  double accuracy_percent = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<double> fold_accuracy_percent;
};

struct GridResult {
  std::vector<GridCell> cells;  ///< C outer, gamma inner
  std::size_t best = 0;

  const GridCell& best_cell() const { return cells.at(best); }
};

/// Options for grid_search beyond the grid itself.
struct GridOptions {
  KernelSpec base_kernel;  ///< gamma is overwritten per cell
  double kkt_tol = 1e-3;
  std::size_t cache_bytes = std::size_t{100} << 20;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Every (C, gamma) cell is scored by cross_validate with the same folds.
/// Best = highest accuracy; ties go to smaller C, then smaller gamma.
GridResult grid_search(const FeatureMatrix& data, const GridSpec& grid, const CvConfig& cv,
                       const GridOptions& options = {});

/// `C,gamma,accuracy` with a header line; accuracy to 4 decimals.
void write_grid_csv(const GridResult& result, const std::filesystem::path& path);
/// `log2C log2gamma accuracy` triples, blank line after each C row.
void write_grid_gnuplot(const GridResult& result, const std::filesystem::path& path);

}  // namespace seisvm
