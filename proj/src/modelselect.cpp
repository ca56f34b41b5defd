#include "seisvm/modelselect.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "seisvm/error.hpp"
#include "seisvm/io_util.hpp"
#include "seisvm/random.hpp"

namespace seisvm {

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

double percent(std::size_t correct, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::span<const int> labels,
                                                  const CvConfig& cfg) {
  if (cfg.k < 2) throw ValidationError("k-fold needs k >= 2");
  if (cfg.k > n) {
    throw ValidationError("k = " + std::to_string(cfg.k) + " exceeds pattern count " +
                          std::to_string(n));
  }
  if (cfg.stratified && labels.size() != n) {
    throw ValidationError("stratified folds need one label per pattern");
  }
  Rng rng(cfg.shuffle_seed);
  std::vector<std::vector<std::size_t>> folds(cfg.k);
  std::size_t next_fold = 0;
  const auto deal = [&](std::vector<std::size_t>& idx) {
    shuffle(idx, rng);
    for (std::size_t i : idx) {
      folds[next_fold].push_back(i);
      next_fold = (next_fold + 1) % cfg.k;
    }
  };
  if (cfg.stratified) {
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < n; ++i) (labels[i] > 0 ? pos : neg).push_back(i);
    deal(pos);
    deal(neg);
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    deal(all);
  }
  for (auto& f : folds) std::ranges::sort(f);
  return folds;
}

CvResult cross_validate(const FeatureMatrix& data, const TrainConfig& cfg, const CvConfig& cv) {
  const auto& labels = data.labels();
  const std::size_t n = data.n_patterns();
  const auto folds = kfold_split(n, labels, cv);

  CvResult result;
  result.total = n;
  result.predictions.assign(n, 0);
  std::vector<char> held_out(n);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::ranges::fill(held_out, 0);
    for (std::size_t i : folds[f]) held_out[i] = 1;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - folds[f].size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!held_out[i]) train_idx.push_back(i);
    }
    const FeatureMatrix train_set = data.subset(train_idx);
    const auto& y = train_set.labels();
    if (std::ranges::count(y, kNoiseLabel) == 0 || std::ranges::count(y, kCleanLabel) == 0) {
      throw ValidationError("training split for fold " + std::to_string(f) +
                            " holds a single class");
    }
    const SvmModel model = train(train_set, cfg);
    std::size_t fold_correct = 0;
    for (std::size_t i : folds[f]) {
      const int p = predict(model, data.pattern(i));
      result.predictions[i] = p;
      if (p == labels[i]) ++fold_correct;
    }
    result.correct += fold_correct;
    result.fold_accuracy_percent.push_back(percent(fold_correct, folds[f].size()));
  }
  result.accuracy_percent = percent(result.correct, result.total);
  return result;
}

std::vector<double> ExponentRange::values() const {
  if (step == 0.0 || !std::isfinite(step) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw ValidationError("grid exponent step must be finite and nonzero");
  }
  std::vector<double> out;
  const double slack = 1e-9 * std::abs(step);
  for (std::size_t i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (step > 0.0 ? v > stop + slack : v < stop - slack) break;
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("grid exponent range is empty");
  return out;
}

GridResult grid_search(const FeatureMatrix& data, const GridSpec& grid, const CvConfig& cv,
                       const GridOptions& options) {
  const auto log2_c = grid.log2_c.values();
  const auto log2_g = grid.log2_gamma.values();
  // Validate folds once up front so errors surface before any training.
  const auto folds = kfold_split(data.n_patterns(), data.labels(), cv);
  (void)folds;

  GridResult result;
  result.cells.resize(log2_c.size() * log2_g.size());
  for (std::size_t a = 0; a < log2_c.size(); ++a) {
    for (std::size_t b = 0; b < log2_g.size(); ++b) {
      GridCell& cell = result.cells[a * log2_g.size() + b];
      cell.c = std::exp2(log2_c[a]);
      cell.gamma = std::exp2(log2_g[b]);
    }
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(result.cells.size());
  const auto worker = [&] {
    for (std::size_t idx = next++; idx < result.cells.size(); idx = next++) {
      GridCell& cell = result.cells[idx];
      try {
        TrainConfig cfg;
        cfg.C = cell.c;
        cfg.kernel = options.base_kernel;
        cfg.kernel.gamma = cell.gamma;
        cfg.kkt_tol = options.kkt_tol;
        cfg.cache_bytes = options.cache_bytes;
        CvResult r = cross_validate(data, cfg, cv);
        cell.accuracy_percent = r.accuracy_percent;
        cell.correct = r.correct;
        cell.total = r.total;
        cell.fold_accuracy_percent = std::move(r.fold_accuracy_percent);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(result.cells.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t idx = 1; idx < result.cells.size(); ++idx) {
    const GridCell& c = result.cells[idx];
    const GridCell& b = result.cells[result.best];
    if (c.correct > b.correct ||
        (c.correct == b.correct && (c.c < b.c || (c.c == b.c && c.gamma < b.gamma)))) {
      result.best = idx;
    }
  }
  return result;
}

void write_grid_csv(const GridResult& result, const std::filesystem::path& path) {
  std::string out = "C,gamma,accuracy\n";
  char acc[32];
  for (const GridCell& cell : result.cells) {
    std::snprintf(acc, sizeof acc, "%.4f", cell.accuracy_percent);
    out += io::format_real(cell.c) + "," + io::format_real(cell.gamma) + "," + acc + "\n";
  }
  io::write_text(path, out);
}

void write_grid_gnuplot(const GridResult& result, const std::filesystem::path& path) {
  std::string out;
  char line[96];
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const GridCell& cell = result.cells[i];
    if (i > 0 && cell.c != result.cells[i - 1].c) out += '\n';
    std::snprintf(line, sizeof line, "%g %g %.4f\n", std::log2(cell.c), std::log2(cell.gamma),
                  cell.accuracy_percent);
    out += line;
  }
  io::write_text(path, out);
}

}  // namespace seisvm
