#include "seisvm/spectrogram.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "seisvm/error.hpp"
#include "seisvm/fft.hpp"
#include "seisvm/io_util.hpp"

namespace seisvm {

void StftParams::validate() const {
  if (window_len == 0 || overlap >= window_len || window_len > nfft) {
    throw ValidationError("STFT parameters need 0 <= overlap < window <= nfft (got window=" +
                          std::to_string(window_len) + ", overlap=" + std::to_string(overlap) +
                          ", nfft=" + std::to_string(nfft) + ")");
  }
  if (!is_power_of_two(nfft)) {
    throw ValidationError("nfft " + std::to_string(nfft) + " is not a power of two");
  }
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw ValidationError("STFT sampling rate must be positive");
  }
}

std::size_t stft_bin_count(std::size_t n_samples, const StftParams& params) {
  if (n_samples < params.window_len) return 0;
  return (n_samples - params.overlap) / params.hop();
}

std::vector<double> hamming_window(std::size_t n) {
  if (n == 0) {
    throw ValidationError("window length must be at least 1");
  }
  if (n == 1) return {1.0};
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom);
  }
  return w;
}

Spectrogram::Spectrogram(std::vector<double> psd, std::size_t n_bins, StftParams params,
                         UtcTime start_time, std::size_t n_samples)
    : psd_(std::move(psd)),
      n_bins_(n_bins),
      params_(params),
      start_time_(start_time),
      n_samples_(n_samples) {
  params_.validate();
  if (psd_.size() != rows() * n_bins_) {
    throw ValidationError("PSD storage holds " + std::to_string(psd_.size()) +
                          " values, expected " + std::to_string(rows() * n_bins_));
  }
  for (double v : psd_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("PSD values must be finite and non-negative");
    }
  }
}

double Spectrogram::freq(std::size_t k) const {
  return static_cast<double>(k) * params_.fs / static_cast<double>(params_.nfft);
}

double Spectrogram::time(std::size_t j) const {
  return (static_cast<double>(params_.window_len) / 2.0 +
          static_cast<double>(j) * static_cast<double>(params_.hop())) /
         params_.fs;
}

std::vector<double> Spectrogram::freqs() const {
  std::vector<double> f(rows());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = freq(k);
  return f;
}

std::vector<double> Spectrogram::times() const {
  std::vector<double> t(cols());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = time(j);
  return t;
}

Spectrogram stft_psd(const TimeSeries& ts, StftParams params) {
  params.fs = ts.fs();
  params.validate();
  if (ts.size() < params.window_len) {
    throw ValidationError("record of " + std::to_string(ts.size()) +
                          " samples is shorter than one window of " +
                          std::to_string(params.window_len));
  }
  const std::size_t n_bins = stft_bin_count(ts.size(), params);
  const std::size_t rows = params.n_freqs();
  const std::vector<double> window = hamming_window(params.window_len);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;
  const double scale = 1.0 / (params.fs * window_power);

  const Fft fft(params.nfft);
  std::vector<std::complex<double>> buf(params.nfft);
  std::vector<double> psd(rows * n_bins);
  const auto samples = ts.samples();
  for (std::size_t j = 0; j < n_bins; ++j) {
    const std::size_t offset = j * params.hop();
    for (std::size_t n = 0; n < params.window_len; ++n) {
      buf[n] = {samples[offset + n] * window[n], 0.0};
    }
    std::fill(buf.begin() + static_cast<std::ptrdiff_t>(params.window_len), buf.end(),
              std::complex<double>{});
    fft.forward(buf);
    double* col = psd.data() + j * rows;
    for (std::size_t k = 0; k < rows; ++k) {
      const double c = (k == 0 || k == params.nfft / 2) ? 1.0 : 2.0;
      col[k] = c * std::norm(buf[k]) * scale;
    }
  }
  return Spectrogram(std::move(psd), n_bins, params, ts.start_time(), ts.size());
}

void save_spectrogram(const Spectrogram& spec, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["rows"] = spec.rows();
  header["cols"] = spec.cols();
  header["fs"] = spec.params().fs;
  header["window"] = spec.params().window_len;
  header["overlap"] = spec.params().overlap;
  header["nfft"] = spec.params().nfft;
  header["start"] = format_rfc3339(spec.start_time());
  header["n_samples"] = spec.n_samples();
  io::write_f64le(path, spec.data());
  io::write_text(raw_sidecar_path(path), header.dump(2) + "\n");
}

Spectrogram load_spectrogram(const std::filesystem::path& path) {
  const auto sidecar = raw_sidecar_path(path);
  StftParams params;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n_samples = 0;
  UtcTime start;
  try {
    const auto header = nlohmann::json::parse(io::read_text(sidecar));
    rows = header.at("rows").get<std::size_t>();
    cols = header.at("cols").get<std::size_t>();
    params.fs = header.at("fs").get<double>();
    params.window_len = header.at("window").get<std::size_t>();
    params.overlap = header.at("overlap").get<std::size_t>();
    params.nfft = header.at("nfft").get<std::size_t>();
    start = parse_rfc3339(header.at("start").get<std::string>());
    n_samples = header.contains("n_samples")
                    ? header.at("n_samples").get<std::size_t>()
                    : (cols == 0 ? 0 : (cols - 1) * params.hop() + params.window_len);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(sidecar.string() + ": malformed spectrogram header: " + e.what());
  }
  params.validate();
  if (rows != params.n_freqs()) {
    throw ValidationError(sidecar.string() + ": rows " + std::to_string(rows) +
                          " inconsistent with nfft " + std::to_string(params.nfft));
  }
  std::vector<double> psd = io::read_f64le(path);
  if (psd.size() != rows * cols) {
    throw ValidationError(path.string() + ": payload holds " + std::to_string(psd.size()) +
                          " values, header declares " + std::to_string(rows * cols));
  }
  return Spectrogram(std::move(psd), cols, params, start, n_samples);
}

void write_spectrogram_gnuplot(const Spectrogram& spec, const std::filesystem::path& path) {
  std::string out;
  out.reserve(spec.rows() * spec.cols() * 32);
  char line[96];
  for (std::size_t j = 0; j < spec.cols(); ++j) {
    const double t = spec.time(j);
    for (std::size_t k = 0; k < spec.rows(); ++k) {
      const double db = 10.0 * std::log10(std::max(spec.at(k, j), 1e-30));
      std::snprintf(line, sizeof line, "%.6f %.6f %.6f\n", t, spec.freq(k), db);
      out += line;
    }
    out += '\n';
  }
  io::write_text(path, out);
}

}  // namespace seisvm
