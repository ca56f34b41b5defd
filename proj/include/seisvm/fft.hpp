#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace seisvm {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 decimation-in-time FFT,
/// X[k] = sum_n x[n] exp(-2 pi i k n / N). Size must be a power of two.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

}  // namespace seisvm
