// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/dft_oracle.hpp"
#include "oracles/qp_oracle.hpp"
#include "oracles/random_problems.hpp"
#include "seisvm/detect.hpp"
#include "seisvm/features.hpp"
#include "seisvm/modelselect.hpp"
#include "seisvm/pipeline.hpp"
#include "seisvm/spectrogram.hpp"
#include "seisvm/svm.hpp"
#include "seisvm/synthgen.hpp"
#include "seisvm/timeseries.hpp"

namespace fs = std::filesystem;
using namespace seisvm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Accumulates failures with a short reason each.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_ < 3) reasons_ += (reasons_.empty() ? "" : "; ") + what;
    if (!ok) ++failures_;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failed checks: " + reasons_};
  }

 private:
  int failures_ = 0;
  std::string reasons_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("seisvm_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

Outcome qp_oracle_equivalence() {
  Checker c;
  std::mt19937_64 gen(20240601);
  double worst_obj = 0.0;
  int probes = 0, ties = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = oracle::random_problem(gen);
    const auto r = train_detailed(p.data, p.cfg);
    const auto sol = oracle::solve_dual(p.K, p.data.labels(), p.cfg.C);
    const double gap = std::abs(r.stats.dual_objective - sol.dual_objective);
    worst_obj = std::max(worst_obj, gap);
    c.require(gap <= 1e-6, "dataset " + std::to_string(trial) + " objective gap " + fmt("%.3g", gap));
    std::uniform_real_distribution<double> coord(-2.5, 2.5);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(p.data.n_features());
      for (double& v : x) v = coord(gen);
      double f = sol.bias;
      for (std::size_t i = 0; i < p.data.n_patterns(); ++i) {
        f += sol.alpha[i] * p.data.labels()[i] * kernel_eval(p.cfg.kernel, p.data.pattern(i), x);
      }
      ++probes;
      // Far from every RBF centre f underflows towards 0 and the sign is noise;
      // there the two decision values must agree instead.
      if (std::abs(f) <= 1e-9) {
        ++ties;
        c.require(std::abs(decision_value(r.model, x) - f) <= 1e-9,
                  "dataset " + std::to_string(trial) + " near-zero probe differs");
        continue;
      }
      c.require(predict(r.model, x) == label_for(f), "dataset " + std::to_string(trial) + " probe disagrees");
    }
  }
  return c.outcome("200 datasets, max |objective gap| " + fmt("%.2e", worst_obj) + ", " +
                   std::to_string(probes) + " probes agree (" + std::to_string(ties) + " with |f| <= 1e-9 compared by value)");
}

Outcome analytic_max_margin() {
  Checker c;
  struct Case {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    std::function<double(const std::vector<double>&)> f;
    std::string name;
  };
  const std::vector<Case> cases{
      {{{-1}, {1}}, {-1, 1}, [](const auto& x) { return x[0]; }, "1-D pair"},
      {{{0, 0}, {2, 2}}, {-1, 1}, [](const auto& x) { return 0.5 * (x[0] + x[1]) - 1.0; }, "2-D pair"},
      {{{2, 0}, {3, 1}, {0, 0}, {-1, 1}}, {1, 1, -1, -1}, [](const auto& x) { return x[0] - 1.0; }, "four points"},
      {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}, {1, 1, -1, -1}, [](const auto& x) { return x[0]; }, "square"},
  };
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-4, 4);
  double worst = 0.0;
  for (const auto& k : cases) {
    Matrix m;
    for (const auto& row : k.x) m.push_row(row);
    TrainConfig cfg;
    cfg.C = 1e6;
    cfg.kernel = {KernelKind::linear};
    cfg.kkt_tol = 1e-9;
    const auto model = train(FeatureMatrix(m, k.y), cfg);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> x(k.x[0].size());
      for (double& v : x) v = u(gen);
      const double err = std::abs(decision_value(model, x) - k.f(x));
      worst = std::max(worst, err);
      c.require(err <= 1e-6, k.name + " decision error " + fmt("%.3g", err));
    }
  }
  return c.outcome("4 configurations, max decision error " + fmt("%.2e", worst));
}

Outcome spectrogram_oracle() {
  Checker c;
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<std::size_t> n_dist(1024, 8192);
  std::normal_distribution<double> nd(0.0, 1000.0);
  const StftParams params;
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<double> x(trial == 0 ? 8192 : n_dist(gen));
    for (double& v : x) v = nd(gen);
    const auto spec = stft_psd(TimeSeries(x, 62.5, {}), params);
    const auto want = oracle::naive_psd(x, 1024, 512, 1024, 62.5);
    c.require(spec.data().size() == want.size(), "size mismatch");
    for (std::size_t i = 0; i < want.size() && i < spec.data().size(); ++i) {
      const double rel = std::abs(spec.data()[i] - want[i]) / std::abs(want[i]);
      worst = std::max(worst, rel);
    }
  }
  c.require(worst <= 1e-9, "relative error " + fmt("%.3g", worst));
  for (const std::size_t n : {std::size_t{476250}, std::size_t{5'400'000}}) {
    const std::size_t expect = n == 476250 ? 929 : 10545;
    c.require(stft_bin_count(n, params) == expect, "bin count formula for " + std::to_string(n));
    const auto spec = stft_psd(TimeSeries(std::vector<double>(n, 1.0), 62.5, {}), params);
    c.require(spec.cols() == expect, "computed columns for " + std::to_string(n));
  }
  return c.outcome("12 signals, max relative error " + fmt("%.2e", worst) + ", bins 929 and 10545");
}

Outcome format_round_trips() {
  Checker c;
  const auto dir = scratch("formats");
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution sparse_coin(0.3), coin;

  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(30, 12);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      y[i] = coin(gen) ? 1 : -1;
      for (std::size_t f = 0; f < 12; ++f) m(i, f) = sparse_coin(gen) ? 0.0 : nd(gen);
    }
    y[0] = 1;
    y[1] = -1;
    const FeatureMatrix fm(m, y);
    write_sparse(fm, dir / "p.sparse");
    c.require(read_sparse(dir / "p.sparse", 12) == fm, "sparse patterns");

    const auto range = fit_scale(fm, -1.0, 1.0);
    write_range(range, dir / "range");
    c.require(apply_scale(fm, read_range(dir / "range", 12)) == apply_scale(fm, range), "range file");

    TrainConfig cfg;
    cfg.kernel = {static_cast<KernelKind>(trial % 4), 0.05, 0.3, 2};
    const auto model = train(apply_scale(fm, range), cfg);
    save_model(model, dir / "m.model");
    const auto back = load_model(dir / "m.model");
    for (int t = 0; t < 50; ++t) {
      std::vector<double> x(12);
      for (double& v : x) v = nd(gen);
      c.require(decision_value(back, x) == decision_value(model, x), "model decision values");
    }

    std::vector<double> samples(1000);
    for (double& v : samples) v = 1000.0 * nd(gen);
    const TimeSeries ts(samples, 62.5, parse_rfc3339("2002-12-05T06:55:00.125Z"), "STA1");
    save_timeseries(ts, dir / "t.csv", TimeSeriesFormat::csv);
    c.require(load_timeseries(dir / "t.csv", TimeSeriesFormat::csv) == ts, "timeseries csv");
    save_timeseries(ts, dir / "t.f64", TimeSeriesFormat::raw_f64le);
    c.require(load_timeseries(dir / "t.f64", TimeSeriesFormat::raw_f64le) == ts, "timeseries raw");
  }
  return c.outcome("20 rounds of sparse, range, model, csv and raw round trips");
}

Outcome scaling_contract() {
  Checker c;
  std::mt19937_64 gen(500);
  std::uniform_real_distribution<double> u(-100, 100), lo_dist(-5, 0), width(0.5, 5);
  std::uniform_int_distribution<std::size_t> rows(2, 40), cols(1, 15);
  std::bernoulli_distribution constant(0.15);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rows(gen), d = cols(gen);
    Matrix m(n, d);
    std::vector<bool> is_const(d);
    for (std::size_t f = 0; f < d; ++f) {
      is_const[f] = constant(gen);
      const double fill = u(gen);
      for (std::size_t i = 0; i < n; ++i) m(i, f) = is_const[f] ? fill : u(gen);
    }
    const double lower = lo_dist(gen), upper = lower + width(gen);
    const FeatureMatrix fm(m);
    const auto r = fit_scale(fm, lower, upper);
    const auto s = apply_scale(fm, r);
    for (std::size_t f = 0; f < d; ++f) {
      double mn = INFINITY, mx = -INFINITY;
      for (std::size_t i = 0; i < n; ++i) {
        mn = std::min(mn, s.patterns()(i, f));
        mx = std::max(mx, s.patterns()(i, f));
      }
      if (r.features[f].is_constant()) {
        c.require(mn == 0.0 && mx == 0.0, "constant feature not mapped to 0");
      } else {
        c.require(mn == lower, "min not mapped to lower");
        c.require(std::abs(mx - upper) <= 1e-12 * std::max(1.0, std::abs(upper)), "max not mapped to upper");
      }
    }
    // Test values outside the fitted range extrapolate linearly.
    Matrix probe(1, d);
    for (std::size_t f = 0; f < d; ++f) {
      const auto& fr = r.features[f];
      probe(0, f) = fr.is_constant() ? fr.min + 1.0 : fr.max + 0.5 * (fr.max - fr.min);
    }
    const auto ps = apply_scale(FeatureMatrix(probe), r);
    for (std::size_t f = 0; f < d; ++f) {
      const double want = r.features[f].is_constant() ? 0.0 : upper + 0.5 * (upper - lower);
      c.require(std::abs(ps.patterns()(0, f) - want) <= 1e-9 * std::max(1.0, std::abs(want)),
                "extrapolation clamped or wrong");
    }
  }
  return c.outcome("500 random matrices with random targets");
}

Outcome cv_grid_determinism() {
  Checker c;
  std::mt19937_64 gen(31);
  std::bernoulli_distribution coin;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 400)(gen);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(10, n))(gen);
    std::vector<int> y(n);
    for (int& v : y) v = coin(gen) ? 1 : -1;
    const CvConfig cv{k, gen(), true};
    const auto folds = kfold_split(n, y, cv);
    std::vector<int> seen(n, 0);
    std::size_t smin = n, smax = 0;
    for (const auto& f : folds) {
      for (std::size_t i : f) ++seen[i];
      smin = std::min(smin, f.size());
      smax = std::max(smax, f.size());
    }
    c.require(std::ranges::all_of(seen, [](int s) { return s == 1; }), "folds do not partition");
    c.require(smax - smin <= 1, "fold sizes differ by more than 1");
    for (int cls : {1, -1}) {
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        const auto cnt = static_cast<std::size_t>(std::ranges::count_if(f, [&](std::size_t i) { return y[i] == cls; }));
        lo = std::min(lo, cnt);
        hi = std::max(hi, cnt);
      }
      c.require(hi - lo <= 1, "stratification unbalanced");
    }
    c.require(kfold_split(n, y, cv) == folds, "folds not deterministic");
  }

  const auto dir = scratch("grid");
  std::normal_distribution<double> nd;
  Matrix m;
  std::vector<int> y;
  for (int i = 0; i < 120; ++i) {
    const int label = i % 2 ? 1 : -1;
    m.push_row(std::vector<double>{nd(gen) + 0.6 * label, nd(gen), nd(gen) - 0.3 * label});
    y.push_back(label);
  }
  const FeatureMatrix data(m, y);
  const GridSpec grid{{-3, 9, 2}, {-9, 1, 2}};
  GridOptions one, many;
  one.workers = 1;
  many.workers = 4;
  write_grid_csv(grid_search(data, grid, {5, 7}, one), dir / "a.csv");
  write_grid_csv(grid_search(data, grid, {5, 7}, many), dir / "b.csv");
  write_grid_csv(grid_search(data, grid, {5, 7}, many), dir / "c.csv");
  c.require(slurp(dir / "a.csv") == slurp(dir / "b.csv"), "grid CSV differs between worker counts");
  c.require(slurp(dir / "b.csv") == slurp(dir / "c.csv"), "grid CSV differs between runs");
  return c.outcome("500 random partitions; 42-cell grid byte-identical across runs and worker counts");
}

// ---------------------------------------------------------------------------
// End-to-end synthetic runs

struct EndToEnd {
  double cv_accuracy = 0.0;
  double best_c = 0.0;
  double best_gamma = 0.0;
  double iou = 0.0;
  double percent_absent = 0.0;
  double truth_absent = 0.0;
};

// Mirrors the staged workflow: slice one pump-on and one pump-off window,
// featurise, scale, grid-search with 5-fold CV, train at the winning cell,
// classify every bin of the full record and compare with the schedule.
EndToEnd run_end_to_end(const TimeSeries& record, const Schedule& truth, double pos_from, double pos_to,
                        double neg_from, double neg_to) {
  const PipelineConfig cfg;
  const auto at = [&](double s) { return add_seconds(record.start_time(), s); };
  const auto pos = slice_utc(record, at(pos_from), at(pos_to));
  const auto neg = slice_utc(record, at(neg_from), at(neg_to));
  const auto train_raw = build_training_set(pos, neg, cfg);
  const auto range = fit_scale(train_raw, cfg.scale_lower, cfg.scale_upper);
  const auto train_scaled = apply_scale(train_raw, range);

  GridOptions opts;
  opts.base_kernel = cfg.kernel;
  const auto grid = grid_search(train_scaled, cfg.grid, cfg.cv, opts);
  const auto& best = grid.best_cell();

  TrainConfig tc;
  tc.C = best.c;
  tc.kernel = cfg.kernel;
  tc.kernel.gamma = best.gamma;
  const auto model = train(train_scaled, tc);

  const auto spec = stft_psd(record, cfg.stft);
  const auto track = classify_bins(model, range, spec, cfg.band);
  const auto report = activity_intervals(track);

  EndToEnd out;
  out.cv_accuracy = best.accuracy_percent;
  out.best_c = best.c;
  out.best_gamma = best.gamma;
  out.iou = interval_iou(report.intervals, truth.intervals(record.start_time()));
  out.percent_absent = report.percent_absent;
  out.truth_absent = 100.0 * (1.0 - truth.on_seconds() / record.duration_seconds());
  return out;
}

// A 2 h "day": the 06:55-10:02 pump run and a second shorter run, both on the
// 24 h -> 2 h time scale. Training uses part of the first run (+1) and the
// scaled 12:00-14:00 window (-1).
constexpr double kDay = 7200.0;
constexpr double kScale = kDay / 86400.0;
const Schedule kTruth{{{(6 * 3600 + 55 * 60) * kScale, (10 * 3600 + 2 * 60) * kScale},
                       {(18 * 3600) * kScale, (19 * 3600) * kScale}}};

TimeSeries synthetic_day() { return gen_mixed(62.5, kDay, PumpSpec{}, kTruth, 2002).series; }

std::string describe(const EndToEnd& r) {
  return "CV " + fmt("%.4f", r.cv_accuracy) + "% at C=" + fmt("%g", r.best_c) + " gamma=" +
         fmt("%g", r.best_gamma) + ", IoU " + fmt("%.4f", r.iou) + ", absent " + fmt("%.4f", r.percent_absent) +
         "% vs truth " + fmt("%.4f", r.truth_absent) + "%";
}

Outcome end_to_end_synthetic() {
  Checker c;
  const auto r = run_end_to_end(synthetic_day(), kTruth, kTruth.windows[0].start_s + 10,
                                kTruth.windows[0].end_s - 10, 12 * 3600 * kScale, 14 * 3600 * kScale);
  c.require(r.cv_accuracy >= 99.0, "CV accuracy " + fmt("%.4f", r.cv_accuracy));
  c.require(r.iou >= 0.9, "IoU " + fmt("%.4f", r.iou));
  c.require(std::abs(r.percent_absent - r.truth_absent) <= 2.0, "percent_absent " + fmt("%.4f", r.percent_absent));
  return c.outcome(describe(r));
}

Outcome downsampled_path() {
  Checker c;
  const auto half = downsample_half(synthetic_day());
  c.require(half.fs() == 31.25, "downsampled rate");
  const auto r = run_end_to_end(half, kTruth, kTruth.windows[0].start_s + 10, kTruth.windows[0].end_s - 10,
                                12 * 3600 * kScale, 14 * 3600 * kScale);
  c.require(r.cv_accuracy >= 95.0, "CV accuracy " + fmt("%.4f", r.cv_accuracy));
  c.require(r.iou >= 0.9, "IoU " + fmt("%.4f", r.iou));
  c.require(std::abs(r.percent_absent - r.truth_absent) <= 2.0, "percent_absent " + fmt("%.4f", r.percent_absent));

  // Pairwise averaging has amplitude response cos(pi f / fs) at the input rate.
  double worst = 0.0;
  for (double f : {0.5, 2.0, 5.0, 8.0, 12.0}) {
    std::vector<double> x(62500);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * i / 62.5);
    const auto d = downsample_half(TimeSeries(x, 62.5, {}));
    // Least-squares amplitude at the known frequency on the output time grid.
    double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double t = (2.0 * i + 0.5) / 62.5;
      const double s = std::sin(2.0 * std::numbers::pi * f * t), co = std::cos(2.0 * std::numbers::pi * f * t);
      const double v = d.samples()[i];
      ss += s * s;
      sc += s * co;
      cc += co * co;
      ys += v * s;
      yc += v * co;
    }
    const double det = ss * cc - sc * sc;
    const double a = (ys * cc - yc * sc) / det, b = (yc * ss - ys * sc) / det;
    const double gain = std::hypot(a, b);
    const double want = std::cos(std::numbers::pi * f / 62.5);
    const double rel = std::abs(gain - want) / want;
    worst = std::max(worst, rel);
    c.require(rel <= 0.01, "gain at " + fmt("%g", f) + " Hz off by " + fmt("%.3g", rel));
  }
  return c.outcome(describe(r) + ", worst gain error " + fmt("%.2e", worst));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
    double limit_s;  ///< 0 for no runtime bound
  };
  const Criterion criteria[] = {
      {"qp-oracle-equivalence", qp_oracle_equivalence, 30.0},
      {"analytic-max-margin", analytic_max_margin, 1.0},
      {"spectrogram-oracle", spectrogram_oracle, 10.0},
      {"format-round-trips", format_round_trips, 5.0},
      {"scaling-contract", scaling_contract, 0.0},
      {"cv-grid-determinism", cv_grid_determinism, 0.0},
      {"end-to-end-synthetic", end_to_end_synthetic, 120.0},
      {"downsampled-path", downsampled_path, 0.0},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_s > 0.0 && secs > cr.limit_s) {
      o.pass = false;
      o.detail += "; runtime over " + fmt("%g", cr.limit_s) + " s";
    }
    std::printf("%s %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", cr.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
