#include "seisvm/synthgen.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "seisvm/error.hpp"
#include "seisvm/io_util.hpp"
#include "seisvm/random.hpp"

namespace seisvm {

namespace {

// RBJ cookbook biquad, direct form I.
class Biquad {
 public:
  static Biquad butterworth(double fc, double fs, bool highpass) {
    const double w0 = 2.0 * std::numbers::pi * fc / fs;
    const double alpha = std::sin(w0) / std::numbers::sqrt2;  // Q = 1/sqrt(2)
    const double c = std::cos(w0);
    Biquad q;
    const double a0 = 1.0 + alpha;
    if (highpass) {
      q.b0_ = (1.0 + c) / 2.0 / a0;
      q.b1_ = -(1.0 + c) / a0;
    } else {
      q.b0_ = (1.0 - c) / 2.0 / a0;
      q.b1_ = (1.0 - c) / a0;
    }
    q.b2_ = q.b0_;
    q.a1_ = -2.0 * c / a0;
    q.a2_ = (1.0 - alpha) / a0;
    return q;
  }

  double step(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double b0_ = 1, b1_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

// Paul Kellet's refined pink-noise filter (-3 dB/octave across roughly
// 2e-4 fs .. fs/2).
class PinkFilter {
 public:
  double step(double white) {
    b_[0] = 0.99886 * b_[0] + white * 0.0555179;
    b_[1] = 0.99332 * b_[1] + white * 0.0750759;
    b_[2] = 0.96900 * b_[2] + white * 0.1538520;
    b_[3] = 0.86650 * b_[3] + white * 0.3104856;
    b_[4] = 0.55000 * b_[4] + white * 0.5329522;
    b_[5] = -0.7616 * b_[5] - white * 0.0168980;
    const double pink = b_[0] + b_[1] + b_[2] + b_[3] + b_[4] + b_[5] + b_[6] + white * 0.5362;
    b_[6] = white * 0.115926;
    return pink;
  }

 private:
  double b_[7] = {};
};

std::size_t sample_count(double fs, double duration_s) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ValidationError("fs must be positive");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ValidationError("duration must be positive");
  }
  return static_cast<std::size_t>(std::llround(duration_s * fs));
}

}  // namespace

UtcTime default_synthetic_start() { return parse_rfc3339("2002-12-05T00:00:00Z"); }

double pump_amplitude_for_snr(double snr_db, int n_harmonics) {
  double harmonic_power = 0.0;
  for (int h = 1; h <= n_harmonics; ++h) harmonic_power += 1.0 / (h * h);
  return kTremorRms * std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0) / harmonic_power);
}

void Schedule::validate(double duration_s) const {
  double prev_end = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const ScheduleWindow& w = windows[i];
    if (!(w.start_s < w.end_s)) throw ValidationError("schedule window with start >= end");
    if (w.start_s < prev_end || w.start_s < 0.0) {
      throw ValidationError("schedule windows must be sorted, disjoint and non-negative");
    }
    if (w.end_s > duration_s) throw ValidationError("schedule window extends past record end");
    prev_end = w.end_s;
  }
}

double Schedule::on_seconds() const {
  double s = 0.0;
  for (const auto& w : windows) s += w.end_s - w.start_s;
  return s;
}

std::vector<Interval> Schedule::intervals(UtcTime start) const {
  std::vector<Interval> out;
  for (const auto& w : windows) out.push_back({add_seconds(start, w.start_s), add_seconds(start, w.end_s)});
  return out;
}

TimeSeries gen_tremor(double fs, double duration_s, std::uint64_t seed, UtcTime start) {
  const std::size_t n = sample_count(fs, duration_s);
  Rng rng(seed);
  PinkFilter pink;
  Biquad highpass = Biquad::butterworth(0.1, fs, true);
  Biquad lowpass = Biquad::butterworth(std::min(12.0, 0.45 * fs), fs, false);
  const auto next = [&] { return lowpass.step(highpass.step(pink.step(rng.normal()))); };

  const auto warmup = static_cast<std::size_t>(std::max(8192.0, 100.0 * fs));
  for (std::size_t i = 0; i < warmup; ++i) next();

  std::vector<double> x(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = next();
    mean += x[i];
  }
  mean /= static_cast<double>(n);
  double power = 0.0;
  for (double& v : x) {
    v -= mean;
    power += v * v;
  }
  const double rms = std::sqrt(power / static_cast<double>(n));
  if (rms > 0.0) {
    for (double& v : x) v *= kTremorRms / rms;
  }
  return TimeSeries(std::move(x), fs, start, "SYNTH");
}

MixedRecord gen_mixed(double fs, double duration_s, const PumpSpec& pump, const Schedule& schedule,
                      std::uint64_t seed, UtcTime start) {
  if (!(pump.fundamental > 0.0) || pump.n_harmonics < 1 ||
      !(pump.fundamental * pump.n_harmonics < fs / 2.0)) {
    throw ValidationError("pump harmonics must lie strictly between 0 and fs/2");
  }
  if (!(pump.amplitude >= 0.0) || !(pump.jitter >= 0.0)) {
    throw ValidationError("pump amplitude and jitter must be non-negative");
  }
  schedule.validate(duration_s);
  TimeSeries tremor = gen_tremor(fs, duration_s, seed, start);
  std::vector<double> x(tremor.samples().begin(), tremor.samples().end());

  Rng rng(seed ^ 0x70756d7000000000ull);
  for (const ScheduleWindow& w : schedule.windows) {
    std::vector<double> phase(static_cast<std::size_t>(pump.n_harmonics));
    for (double& p : phase) p = 2.0 * std::numbers::pi * rng.uniform();
    // Envelope knots one second apart, linearly interpolated.
    const auto n_knots = static_cast<std::size_t>(std::ceil(w.end_s - w.start_s)) + 2;
    std::vector<double> knots(n_knots);
    for (double& k : knots) k = 1.0 + pump.jitter * rng.normal();

    const auto first = static_cast<std::size_t>(std::ceil(w.start_s * fs));
    for (std::size_t i = first; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / fs;
      if (t >= w.end_s) break;
      if (t < w.start_s) continue;
      const double u = t - w.start_s;
      const auto k = static_cast<std::size_t>(u);
      const double frac = u - static_cast<double>(k);
      const double envelope = knots[k] * (1.0 - frac) + knots[k + 1] * frac;
      double v = 0.0;
      for (int h = 1; h <= pump.n_harmonics; ++h) {
        v += pump.amplitude / h *
             std::sin(2.0 * std::numbers::pi * h * pump.fundamental * t + phase[h - 1]);
      }
      x[i] += envelope * v;
    }
  }
  return MixedRecord{TimeSeries(std::move(x), fs, start, "SYNTH"), schedule};
}

void save_schedule(const Schedule& schedule, UtcTime start, double duration_s,
                   const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["start"] = format_rfc3339(start);
  j["duration_s"] = duration_s;
  j["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : schedule.windows) {
    j["windows"].push_back({{"start_s", w.start_s}, {"end_s", w.end_s}});
  }
  io::write_text(path, j.dump(2) + "\n");
}

Schedule load_schedule(const std::filesystem::path& path) {
  Schedule s;
  try {
    const auto j = nlohmann::json::parse(io::read_text(path));
    for (const auto& w : j.at("windows")) {
      s.windows.push_back({w.at("start_s").get<double>(), w.at("end_s").get<double>()});
    }
    s.validate(j.at("duration_s").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed schedule: " + e.what());
  }
  return s;
}

}  // namespace seisvm
