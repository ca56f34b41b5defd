#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>

#include "oracles/dft_oracle.hpp"
#include "seisvm/error.hpp"
#include "seisvm/fft.hpp"
#include "seisvm/spectrogram.hpp"
#include "test_support.hpp"

using namespace seisvm;

namespace {

TimeSeries series(std::vector<double> x, double fs = 62.5) {
  return TimeSeries(std::move(x), fs, parse_rfc3339("2002-12-05T00:00:00Z"));
}

double max_relative_error(std::span<const double> got, std::span<const double> want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(std::abs(want[i]), 1e-300));
  }
  return worst;
}

}  // namespace

TEST_SUITE("spectrogram") {

TEST_CASE("hamming window") {
  const auto w2 = hamming_window(2);
  CHECK(w2[0] == doctest::Approx(0.08));
  CHECK(w2[1] == doctest::Approx(0.08));
  const auto w3 = hamming_window(3);
  CHECK(w3[0] == doctest::Approx(0.08));
  CHECK(w3[1] == doctest::Approx(1.0));
  CHECK(w3[2] == doctest::Approx(0.08));
  CHECK(hamming_window(1) == std::vector<double>{1.0});
  CHECK_THROWS_AS(hamming_window(0), ValidationError);

  const auto w = hamming_window(1024);
  for (std::size_t k = 0; k < 1024; ++k) CHECK(w[k] == doctest::Approx(w[1023 - k]).epsilon(1e-14));
  CHECK(*std::max_element(w.begin(), w.end()) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(w[511] == w[512]);
}

TEST_CASE("fft matches naive DFT") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> dist;
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {dist(gen), dist(gen)};
    auto y = x;
    Fft(n).forward(y);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<long double> acc = 0;
      for (std::size_t m = 0; m < n; ++m) {
        const long double a = -2.0L * std::numbers::pi_v<long double> * ((k * m) % n) / n;
        acc += std::complex<long double>(x[m]) * std::complex<long double>(std::cos(a), std::sin(a));
      }
      CHECK(std::abs(std::complex<double>(acc) - y[k]) < 1e-12 * std::sqrt(double(n)) * 10);
    }
  }
  CHECK_THROWS_AS(Fft(12), ValidationError);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(StftParams{}.validate());
  CHECK_THROWS_AS((StftParams{1024, 1024, 1024, 62.5}.validate()), ValidationError);
  CHECK_THROWS_AS((StftParams{2048, 512, 1024, 62.5}.validate()), ValidationError);
  CHECK_THROWS_AS((StftParams{1000, 500, 1000, 62.5}.validate()), ValidationError);
  CHECK_THROWS_AS(stft_psd(series(std::vector<double>(1023, 1.0)), {}), ValidationError);
}

TEST_CASE("bin count formula") {
  const StftParams p;
  CHECK(stft_bin_count(476250, p) == 929);
  CHECK(stft_bin_count(5'400'000, p) == 10545);
  CHECK(stft_bin_count(1024, p) == 1);
  CHECK(stft_bin_count(1535, p) == 1);
  CHECK(stft_bin_count(1536, p) == 2);
  CHECK(stft_bin_count(100, p) == 0);
}

TEST_CASE("all-zero input gives an all-zero PSD") {
  const auto spec = stft_psd(series(std::vector<double>(5000, 0.0)), {});
  CHECK(spec.cols() == stft_bin_count(5000, {}));
  CHECK(spec.rows() == 513);
  for (double v : spec.data()) CHECK(v == 0.0);
}

TEST_CASE("axes") {
  const auto spec = stft_psd(series(std::vector<double>(476250, 1.0)), {});
  CHECK(spec.cols() == 929);
  CHECK(spec.freq(2) == doctest::Approx(0.1220703125));
  CHECK(spec.freq(201) == doctest::Approx(12.2680664));
  CHECK(spec.time(0) == doctest::Approx(8.192));
  CHECK(spec.time(1) - spec.time(0) == doctest::Approx(8.192));
  CHECK(spec.hop_seconds() == doctest::Approx(8.192));
}

TEST_CASE("sinusoid on a bin frequency peaks in that bin") {
  const StftParams p;
  const double f = 8.0 * 62.5 / 1024.0;
  std::vector<double> x(3 * p.window_len);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / 62.5);
  }
  const auto spec = stft_psd(series(x), p);
  const auto oracle_psd = oracle::naive_psd(x, 1024, 512, 1024, 62.5);
  for (std::size_t j = 0; j < spec.cols(); ++j) {
    const auto col = spec.column(j);
    CHECK(std::distance(col.begin(), std::max_element(col.begin(), col.end())) == 8);
    const auto ocol = std::span<const double>(oracle_psd).subspan(j * 513, 513);
    CHECK(std::distance(ocol.begin(), std::max_element(ocol.begin(), ocol.end())) == 8);
  }
}

TEST_CASE("matches naive DFT oracle on random input") {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> dist(0.0, 100.0);
  for (std::size_t n : {1024u, 2000u, 4096u}) {
    std::vector<double> x(n);
    for (double& v : x) v = dist(gen);
    const auto spec = stft_psd(series(x), {});
    const auto want = oracle::naive_psd(x, 1024, 512, 1024, 62.5);
    REQUIRE(spec.data().size() == want.size());
    CHECK(max_relative_error(spec.data(), want) < 1e-9);
  }
  // Non-default geometry with zero padding.
  std::vector<double> x(700);
  for (double& v : x) v = dist(gen);
  const StftParams p{100, 30, 128, 10.0};
  const auto spec = stft_psd(series(x, 10.0), p);
  const auto want = oracle::naive_psd(x, 100, 30, 128, 10.0);
  CHECK(spec.cols() == (700 - 30) / 70);
  CHECK(max_relative_error(spec.data(), want) < 1e-9);
}

TEST_CASE("windowed power consistency") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> dist;
  std::vector<double> x(6000);
  for (double& v : x) v = dist(gen);
  const StftParams p;
  const auto spec = stft_psd(series(x), p);
  const auto w = hamming_window(p.window_len);
  double wsum2 = 0;
  for (double v : w) wsum2 += v * v;
  for (std::size_t j = 0; j < spec.cols(); ++j) {
    double psd_sum = 0;
    for (double v : spec.column(j)) psd_sum += v * p.fs / p.nfft;
    double seg_power = 0;
    for (std::size_t n = 0; n < p.window_len; ++n) {
      const double s = x[j * p.hop() + n] * w[n];
      seg_power += s * s;
    }
    const double expected = seg_power / p.window_len * p.window_len / wsum2;
    CHECK(psd_sum == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("prepending one hop of zeros shifts columns by one") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> dist;
  std::vector<double> x(5000);
  for (double& v : x) v = dist(gen);
  std::vector<double> shifted(512, 0.0);
  shifted.insert(shifted.end(), x.begin(), x.end());
  const auto a = stft_psd(series(x), {});
  const auto b = stft_psd(series(shifted), {});
  REQUIRE(b.cols() == a.cols() + 1);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = 0; k < a.rows(); ++k) CHECK(b.at(k, j + 1) == a.at(k, j));
  }
}

TEST_CASE("DC is not doubled and dominates row 0") {
  // The symmetric Hamming window spreads DC over its main lobe (rows 0 and 1), so
  // this checks the one-sided convention rather than exact zeros elsewhere.
  const auto spec = stft_psd(series(std::vector<double>(3000, 2.0)), {});
  const auto w = hamming_window(1024);
  double wsum = 0, wsum2 = 0;
  for (double v : w) {
    wsum += v;
    wsum2 += v * v;
  }
  for (std::size_t j = 0; j < spec.cols(); ++j) {
    CHECK(spec.at(0, j) == doctest::Approx(4.0 * wsum * wsum / (62.5 * wsum2)).epsilon(1e-12));
    CHECK(spec.at(1, j) < spec.at(0, j));
    for (std::size_t k = 2; k < spec.rows(); ++k) CHECK(spec.at(k, j) < 1e-3 * spec.at(0, j));
  }
}

TEST_CASE("persistence and gnuplot emission") {
  const auto dir = test::scratch_dir("spec_io");
  std::mt19937_64 gen(2);
  std::normal_distribution<double> dist;
  std::vector<double> x(4000);
  for (double& v : x) v = dist(gen);
  const auto spec = stft_psd(series(x), {});
  save_spectrogram(spec, dir / "s.f64");
  const auto back = load_spectrogram(dir / "s.f64");
  CHECK(back.rows() == spec.rows());
  CHECK(back.cols() == spec.cols());
  CHECK(std::ranges::equal(back.data(), spec.data()));
  CHECK(back.start_time() == spec.start_time());
  CHECK(back.n_samples() == 4000);

  write_spectrogram_gnuplot(spec, dir / "s.dat");
  std::ifstream in(dir / "s.dat");
  std::string line;
  std::size_t data_lines = 0, blank = 0;
  while (std::getline(in, line)) (line.empty() ? blank : data_lines)++;
  CHECK(data_lines == spec.rows() * spec.cols());
  CHECK(blank == spec.cols());
}

}  // TEST_SUITE
