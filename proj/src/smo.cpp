#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <optional>

#include "seisvm/svm.hpp"

namespace seisvm {

namespace {

constexpr double kTau = 1e-12;

// Rows of Q_ij = y_i y_j K(x_i, x_j), computed on demand and kept in an LRU
// cache bounded by a byte budget (never fewer than two rows).
class KernelRows {
 public:
  KernelRows(const FeatureMatrix& data, const std::vector<int>& y, const KernelSpec& kernel,
             std::size_t cache_bytes)
      : data_(data), y_(y), kernel_(kernel), slots_(data.n_patterns()), diag_(data.n_patterns()) {
    const std::size_t n = data.n_patterns();
    const std::size_t row_bytes = std::max<std::size_t>(n * sizeof(double), 1);
    capacity_ = std::max<std::size_t>(2, cache_bytes / row_bytes);
    for (std::size_t i = 0; i < n; ++i) {
      diag_[i] = kernel_eval(kernel_, data_.pattern(i), data_.pattern(i));
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  std::span<const double> row(std::size_t i) {
    if (slots_[i]) {
      lru_.splice(lru_.begin(), lru_, slots_[i]->position);
      return slots_[i]->values;
    }
    std::vector<double> values;
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      values = std::move(slots_[victim]->values);
      slots_[victim].reset();
    }
    const std::size_t n = data_.n_patterns();
    values.resize(n);
    const auto xi = data_.pattern(i);
    for (std::size_t k = 0; k < n; ++k) {
      values[k] = static_cast<double>(y_[i] * y_[k]) * kernel_eval(kernel_, xi, data_.pattern(k));
    }
    lru_.push_front(i);
    slots_[i] = Slot{std::move(values), lru_.begin()};
    return slots_[i]->values;
  }

 private:
  struct Slot {
    std::vector<double> values;
    std::list<std::size_t>::iterator position;
  };

  const FeatureMatrix& data_;
  const std::vector<int>& y_;
  KernelSpec kernel_;
  std::vector<std::optional<Slot>> slots_;
  std::list<std::size_t> lru_;
  std::vector<double> diag_;
  std::size_t capacity_ = 2;
};

}  // namespace

TrainResult train_detailed(const FeatureMatrix& data, const TrainConfig& cfg) {
  cfg.validate();
  const std::vector<int>& y = data.labels();
  const std::size_t n = data.n_patterns();
  const auto n_pos = static_cast<std::size_t>(std::ranges::count(y, kNoiseLabel));
  if (n_pos == 0 || n_pos == n) {
    throw ValidationError("training data must contain both +1 and -1 patterns");
  }

  const double C = cfg.C;
  KernelRows Q(data, y, cfg.kernel, cfg.cache_bytes);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q alpha - e

  const auto in_up = [&](std::size_t t) {
    return y[t] > 0 ? alpha[t] < C : alpha[t] > 0.0;
  };
  const auto in_low = [&](std::size_t t) {
    return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C;
  };

  TrainStats stats;
  double gap = std::numeric_limits<double>::infinity();
  for (;;) {
    // Maximal violating pair: i maximises -y G over I_up, j minimises it over I_low.
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(y[t]) * grad[t];
      if (in_up(t) && v > up_max) {
        up_max = v;
        i = t;
      }
      if (in_low(t) && v < low_min) {
        low_min = v;
        j = t;
      }
    }
    gap = up_max - low_min;
    if (i == n || j == n || gap < cfg.kkt_tol) break;
    if (stats.iterations >= cfg.max_iter) {
      stats.kkt_gap = gap;
      stats.alpha = alpha;
      throw TrainError("SMO reached the iteration limit of " + std::to_string(cfg.max_iter) +
                           " with KKT gap " + std::to_string(gap),
                       std::move(stats));
    }
    ++stats.iterations;

    const auto Qi = Q.row(i);
    const auto Qj = Q.row(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q.diag(i) + Q.diag(j) + 2.0 * Qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Q.diag(i) + Q.diag(j) - 2.0 * Qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t k = 0; k < n; ++k) grad[k] += Qi[k] * dai + Qj[k] * daj;
  }

  // Bias from free multipliers, else the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = static_cast<double>(y[t]) * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : (upper + lower) / 2.0;

  double objective = 0.0;
  for (std::size_t t = 0; t < n; ++t) objective += alpha[t] * (grad[t] - 1.0);
  stats.dual_objective = -objective / 2.0;
  stats.kkt_gap = gap;

  // Support vectors: class +1 first, then -1, each in input order.
  std::vector<std::size_t> sv_index;
  for (int cls : {kNoiseLabel, kCleanLabel}) {
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == cls && alpha[t] > 0.0) sv_index.push_back(t);
    }
  }
  Matrix svs(sv_index.size(), data.n_features());
  std::vector<double> coef(sv_index.size());
  for (std::size_t s = 0; s < sv_index.size(); ++s) {
    const std::size_t t = sv_index[s];
    std::ranges::copy(data.pattern(t), svs.row(s).begin());
    coef[s] = static_cast<double>(y[t]) * alpha[t];
    if (alpha[t] >= C) ++stats.n_bounded_sv;
  }
  stats.n_sv = sv_index.size();
  stats.alpha = std::move(alpha);

  return TrainResult{SvmModel(cfg.kernel, std::move(svs), std::move(coef), -rho), std::move(stats)};
}

SvmModel train(const FeatureMatrix& data, const TrainConfig& cfg) {
  return train_detailed(data, cfg).model;
}

}  // namespace seisvm
