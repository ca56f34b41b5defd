#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seisvm/detect.hpp"
#include "seisvm/timeseries.hpp"
#include "seisvm/utc.hpp"

namespace seisvm {

/// RMS of every generated tremor record, in counts.
constexpr double kTremorRms = 1000.0;

/// Default record start for synthetic data.
UtcTime default_synthetic_start();

/// Pump amplitude (fundamental, counts) that puts the pump power `snr_db`
/// above the tremor power when harmonic h has amplitude amplitude / h.
double pump_amplitude_for_snr(double snr_db, int n_harmonics);

/// Harmonic stack: harmonic h (1-based) has frequency h * fundamental and
/// amplitude amplitude / h, all scaled by one shared jitter envelope.
struct PumpSpec {
  double fundamental = 4.0;
  int n_harmonics = 3;
  double amplitude = pump_amplitude_for_snr(10.0, 3);
  /// Relative standard deviation of the amplitude envelope (one knot per second).
  double jitter = 0.1;
};

struct ScheduleWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  friend bool operator==(const ScheduleWindow&, const ScheduleWindow&) = default;
};

/// Pump-on windows in seconds from record start: sorted, disjoint, in range.
struct Schedule {
  std::vector<ScheduleWindow> windows;

  void validate(double duration_s) const;
  double on_seconds() const;
  std::vector<Interval> intervals(UtcTime start) const;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/**
 * Background tremor stand-in.
 *
 * White Gaussian noise (Rng::normal) is coloured by Paul Kellet's refined
 * pink-noise filter, band-limited by second-order Butterworth high-pass
 * (0.1 Hz) and low-pass (12 Hz, capped at 0.45 fs) biquads after a warm-up,
 * demeaned and scaled to kTremorRms. Deterministic per seed.
 */
TimeSeries gen_tremor(double fs, double duration_s, std::uint64_t seed,
                      UtcTime start = default_synthetic_start());

struct MixedRecord {
  TimeSeries series;
  Schedule schedule;
};

/// gen_tremor plus the pump signal inside each schedule window.
MixedRecord gen_mixed(double fs, double duration_s, const PumpSpec& pump, const Schedule& schedule,
                      std::uint64_t seed, UtcTime start = default_synthetic_start());

/// `{"start":..., "duration_s":..., "windows":[{"start_s":..,"end_s":..}]}`
void save_schedule(const Schedule& schedule, UtcTime start, double duration_s,
                   const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path);

}  // namespace seisvm
