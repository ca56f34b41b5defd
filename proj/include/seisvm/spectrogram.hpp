#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "seisvm/timeseries.hpp"
#include "seisvm/utc.hpp"

namespace seisvm {

struct StftParams {
  std::size_t window_len = 1024;
  std::size_t overlap = 512;
  std::size_t nfft = 1024;
  double fs = 62.5;

  std::size_t hop() const { return window_len - overlap; }
  std::size_t n_freqs() const { return nfft / 2 + 1; }

  /// Throws ValidationError unless 0 <= overlap < window_len <= nfft, nfft a
  /// power of two, fs > 0.
  void validate() const;
};

/// Number of whole segments in a record of `n_samples`; the trailing partial
/// segment is dropped. Zero when the record is shorter than one window.
std::size_t stft_bin_count(std::size_t n_samples, const StftParams& params);

std::vector<double> hamming_window(std::size_t n);

/**
 * One-sided PSD matrix, frequency x time, in counts^2/Hz.
 *
 * Storage is column-major: column j (one time bin) is contiguous, which is
 * also the on-disk order.
 */
class Spectrogram {
 public:
  Spectrogram(std::vector<double> psd, std::size_t n_bins, StftParams params,
              UtcTime start_time, std::size_t n_samples);

  std::size_t rows() const { return params_.n_freqs(); }
  std::size_t cols() const { return n_bins_; }
  double at(std::size_t k, std::size_t j) const { return psd_[j * rows() + k]; }
  std::span<const double> column(std::size_t j) const {
    return std::span<const double>(psd_).subspan(j * rows(), rows());
  }
  std::span<const double> data() const { return psd_; }

  double freq(std::size_t k) const;
  /// Centre of bin j in seconds from record start.
  double time(std::size_t j) const;
  std::vector<double> freqs() const;
  std::vector<double> times() const;
  double hop_seconds() const { return static_cast<double>(params_.hop()) / params_.fs; }

  const StftParams& params() const { return params_; }
  UtcTime start_time() const { return start_time_; }
  /// Length of the analysed record; bounds the time axis.
  std::size_t n_samples() const { return n_samples_; }
  double record_seconds() const { return static_cast<double>(n_samples_) / params_.fs; }

 private:
  std::vector<double> psd_;
  std::size_t n_bins_;
  StftParams params_;
  UtcTime start_time_;
  std::size_t n_samples_;
};

/// Hamming-windowed STFT, no per-segment detrending, zero-padded to nfft,
/// psd[k][j] = c_k |X_j[k]|^2 / (fs * sum w^2), c_k = 2 except at DC and Nyquist.
/// `params.fs` is overwritten with the record's rate.
Spectrogram stft_psd(const TimeSeries& ts, StftParams params);

/// Raw-f64le column-major payload plus a JSON sidecar (see raw_sidecar_path).
void save_spectrogram(const Spectrogram& spec, const std::filesystem::path& path);
Spectrogram load_spectrogram(const std::filesystem::path& path);

/// gnuplot pm3d triples `time_s freq_hz 10*log10(psd)`, blank line between
/// time columns. Zero PSD is floored at 1e-30 before the log.
void write_spectrogram_gnuplot(const Spectrogram& spec, const std::filesystem::path& path);

}  // namespace seisvm
