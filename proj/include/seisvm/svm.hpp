#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seisvm/error.hpp"
#include "seisvm/features.hpp"
#include "seisvm/matrix.hpp"

namespace seisvm {

enum class KernelKind { linear, polynomial, rbf, sigmoid };

std::string_view kernel_name(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;
  double coef0 = 0.0;
  int degree = 3;

  void validate() const;
};

/// linear: x.z; polynomial: (gamma x.z + coef0)^degree;
/// rbf: exp(-gamma |x - z|^2); sigmoid: tanh(gamma x.z + coef0).
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z);

struct TrainConfig {
  double C = 1.0;
  KernelSpec kernel;
  double kkt_tol = 1e-3;
  std::int64_t max_iter = 10'000'000;
  std::size_t cache_bytes = std::size_t{100} << 20;

  void validate() const;
};

/**
 * Trained binary classifier f(x) = sum_j coef_j K(sv_j, x) + bias.
 *
 * coef_j = alpha_j y_j is never zero. Support vectors of class +1 are stored
 * first. A model loaded from file infers its width from the largest feature
 * index present; decision_value accepts wider inputs and treats the extra
 * support-vector features as zero.
 */
class SvmModel {
 public:
  SvmModel(KernelSpec kernel, Matrix support_vectors, std::vector<double> sv_coef, double bias);

  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& support_vectors() const { return support_vectors_; }
  const std::vector<double>& sv_coef() const { return sv_coef_; }
  double bias() const { return bias_; }
  std::size_t n_sv() const { return sv_coef_.size(); }
  std::size_t n_features() const { return support_vectors_.cols(); }
  std::size_t n_positive_sv() const { return n_pos_; }

 private:
  KernelSpec kernel_;
  Matrix support_vectors_;
  std::vector<double> sv_coef_;
  double bias_;
  std::size_t n_pos_ = 0;
};

struct TrainStats {
  std::int64_t iterations = 0;
  /// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
  double dual_objective = 0.0;
  /// Maximal KKT violation m(alpha) - M(alpha) at exit.
  double kkt_gap = 0.0;
  std::size_t n_sv = 0;
  std::size_t n_bounded_sv = 0;
  /// One multiplier per training pattern, in input order.
  std::vector<double> alpha;
};

/// Thrown when SMO hits max_iter; carries the last iterate's diagnostics.
class TrainError : public ValidationError {
 public:
  TrainError(const std::string& what, TrainStats stats)
      : ValidationError(what), stats_(std::move(stats)) {}
  const TrainStats& stats() const { return stats_; }

 private:
  TrainStats stats_;
};

struct TrainResult {
  SvmModel model;
  TrainStats stats;
};

/// Soft-margin C-SVC trained by SMO on the dual with maximal-violating-pair
/// working set selection.
TrainResult train_detailed(const FeatureMatrix& data, const TrainConfig& cfg);
SvmModel train(const FeatureMatrix& data, const TrainConfig& cfg);

double decision_value(const SvmModel& model, std::span<const double> x);

/// +1 when the decision value is >= 0, else -1.
int predict(const SvmModel& model, std::span<const double> x);
constexpr int label_for(double decision) { return decision >= 0.0 ? +1 : -1; }

/// Text model in the common `svm_type c_svc` layout; rho = -bias.
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace seisvm
