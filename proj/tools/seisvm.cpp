// seisvm: staged command-line front end for the pump-noise detection pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seisvm/detect.hpp"
#include "seisvm/error.hpp"
#include "seisvm/features.hpp"
#include "seisvm/io_util.hpp"
#include "seisvm/modelselect.hpp"
#include "seisvm/pipeline.hpp"
#include "seisvm/spectrogram.hpp"
#include "seisvm/svm.hpp"
#include "seisvm/synthgen.hpp"
#include "seisvm/timeseries.hpp"

namespace fs = std::filesystem;
using namespace seisvm;

namespace {

// ---------------------------------------------------------------------------
// Shared option groups

struct ConfigOpts {
  std::optional<fs::path> path;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", path, "Pipeline config JSON; explicit flags take precedence");
  }
  PipelineConfig load() const { return path ? load_pipeline_config(*path) : PipelineConfig{}; }
};

struct FormatOpt {
  std::optional<std::string> name;

  void add(CLI::App* cmd, const std::string& flag, const std::string& what) {
    cmd->add_option(flag, name, what + " format: csv or raw (default: from extension)");
  }
  TimeSeriesFormat resolve(const fs::path& path) const {
    return name ? parse_timeseries_format(*name) : timeseries_format_for(path);
  }
};

struct KernelOpts {
  std::optional<std::string> kind;
  std::optional<double> gamma;
  std::optional<double> coef0;
  std::optional<int> degree;

  void add(CLI::App* cmd, bool with_gamma = true) {
    cmd->add_option("--kernel", kind, "linear, polynomial, rbf or sigmoid (default rbf)");
    if (with_gamma) cmd->add_option("--gamma", gamma, "Kernel gamma");
    cmd->add_option("--coef0", coef0, "Kernel coef0 (polynomial, sigmoid)");
    cmd->add_option("--degree", degree, "Polynomial degree");
  }
  void apply(KernelSpec& k) const {
    if (kind) k.kind = parse_kernel_kind(*kind);
    if (gamma) k.gamma = *gamma;
    if (coef0) k.coef0 = *coef0;
    if (degree) k.degree = *degree;
  }
};

struct BandOpts {
  std::optional<std::size_t> row_start;
  std::optional<std::size_t> row_end;

  void add(CLI::App* cmd) {
    cmd->add_option("--band-start", row_start, "First PSD row kept, 1-based (default 3)");
    cmd->add_option("--band-end", row_end, "Last PSD row kept, 1-based inclusive (default 202)");
  }
  void apply(BandSelect& b) const {
    if (row_start) b.row_start = *row_start;
    if (row_end) b.row_end = *row_end;
  }
};

std::string percent4(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

/// Sparse file read at the width `min_features` or wider.
FeatureMatrix read_sparse_at_least(const fs::path& path, std::size_t min_features) {
  auto fm = read_sparse(path);
  if (fm.n_features() < min_features) fm = read_sparse(path, min_features);
  return fm;
}

ExponentRange parse_exponent_range(const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ValidationError(what + ": expected start:stop:step, got '" + text + "'");
  ExponentRange r{io::parse_real(parts[0], what), io::parse_real(parts[1], what),
                  io::parse_real(parts[2], what)};
  r.values();  // validates
  return r;
}

ScheduleWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("--on: expected start_s:end_s, got '" + text + "'");
  return {io::parse_real(text.substr(0, colon), "--on start"),
          io::parse_real(text.substr(colon + 1), "--on end")};
}

// ---------------------------------------------------------------------------
// Subcommands

void add_synth(CLI::App& app) {
  struct Opts {
    fs::path out;
    std::optional<fs::path> schedule_out;
    FormatOpt format;
    double fs = 62.5;
    double duration = 7200.0;
    std::uint64_t seed = 0;
    std::string start;
    std::vector<std::string> windows;
    PumpSpec pump;
    std::optional<double> snr_db;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic tremor record with scheduled pump noise");
  cmd->add_option("--out", o->out, "Output time series (.csv or raw .f64 with .json sidecar)")->required();
  cmd->add_option("--schedule-out", o->schedule_out, "Ground-truth schedule JSON");
  o->format.add(cmd, "--format", "Output");
  cmd->add_option("--fs", o->fs, "Sampling rate in Hz")->capture_default_str();
  cmd->add_option("--duration", o->duration, "Record length in seconds")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Noise seed")->capture_default_str();
  cmd->add_option("--start", o->start, "Record start, RFC 3339 (default 2002-12-05T00:00:00Z)");
  cmd->add_option("--on", o->windows, "Pump-on window start_s:end_s from record start; repeatable");
  cmd->add_option("--fundamental", o->pump.fundamental, "Pump fundamental in Hz")->capture_default_str();
  cmd->add_option("--harmonics", o->pump.n_harmonics, "Number of pump harmonics")->capture_default_str();
  cmd->add_option("--snr-db", o->snr_db, "Pump power over tremor power in dB (default 10)");
  cmd->add_option("--jitter", o->pump.jitter, "Relative amplitude jitter")->capture_default_str();
  cmd->callback([o] {
    const UtcTime start = o->start.empty() ? default_synthetic_start() : parse_rfc3339(o->start);
    o->pump.amplitude = pump_amplitude_for_snr(o->snr_db.value_or(10.0), o->pump.n_harmonics);
    Schedule sched;
    for (const auto& w : o->windows) sched.windows.push_back(parse_window(w));
    const auto rec = gen_mixed(o->fs, o->duration, o->pump, sched, o->seed, start);
    save_timeseries(rec.series, o->out, o->format.resolve(o->out));
    if (o->schedule_out) save_schedule(rec.schedule, start, o->duration, *o->schedule_out);
    std::cout << "synth: " << rec.series.size() << " samples at " << io::format_real(o->fs)
              << " Hz, pump on " << io::format_real(rec.schedule.on_seconds()) << " s -> "
              << o->out.string() << "\n";
  });
}

void add_slice(CLI::App& app) {
  struct Opts {
    fs::path in, out;
    FormatOpt in_format, out_format;
    std::string from, to;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("slice", "Cut [from, to) out of a time series by UTC time");
  cmd->add_option("--in", o->in, "Input time series")->required();
  cmd->add_option("--out", o->out, "Output time series")->required();
  o->in_format.add(cmd, "--in-format", "Input");
  o->out_format.add(cmd, "--out-format", "Output");
  cmd->add_option("--from", o->from, "Window start, RFC 3339")->required();
  cmd->add_option("--to", o->to, "Window end (exclusive), RFC 3339")->required();
  cmd->callback([o] {
    const auto ts = load_timeseries(o->in, o->in_format.resolve(o->in));
    const auto cut = slice_utc(ts, parse_rfc3339(o->from), parse_rfc3339(o->to));
    save_timeseries(cut, o->out, o->out_format.resolve(o->out));
    std::cout << "slice: " << cut.size() << " samples from " << format_rfc3339(cut.start_time())
              << " -> " << o->out.string() << "\n";
  });
}

void add_downsample(CLI::App& app) {
  struct Opts {
    fs::path in, out;
    FormatOpt in_format, out_format;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("downsample", "Halve the sampling rate by pairwise averaging");
  cmd->add_option("--in", o->in, "Input time series")->required();
  cmd->add_option("--out", o->out, "Output time series")->required();
  o->in_format.add(cmd, "--in-format", "Input");
  o->out_format.add(cmd, "--out-format", "Output");
  cmd->callback([o] {
    const auto half = downsample_half(load_timeseries(o->in, o->in_format.resolve(o->in)));
    save_timeseries(half, o->out, o->out_format.resolve(o->out));
    std::cout << "downsample: " << half.size() << " samples at " << io::format_real(half.fs())
              << " Hz -> " << o->out.string() << "\n";
  });
}

void add_spectrogram(CLI::App& app) {
  struct Opts {
    ConfigOpts config;
    fs::path in, out;
    FormatOpt in_format;
    std::optional<fs::path> gnuplot;
    std::optional<std::size_t> window, overlap, nfft;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("spectrogram", "Hamming-window STFT power spectral density");
  o->config.add(cmd);
  cmd->add_option("--in", o->in, "Input time series")->required();
  cmd->add_option("--out", o->out, "Output PSD (raw f64 column-major plus .json sidecar)")->required();
  o->in_format.add(cmd, "--in-format", "Input");
  cmd->add_option("--gnuplot", o->gnuplot, "Also write pm3d triples (time_s freq_hz dB)");
  cmd->add_option("--window", o->window, "Segment length in samples (default 1024)");
  cmd->add_option("--overlap", o->overlap, "Overlap in samples (default 512)");
  cmd->add_option("--nfft", o->nfft, "FFT length, power of two (default 1024)");
  cmd->callback([o] {
    auto params = o->config.load().stft;
    if (o->window) params.window_len = *o->window;
    if (o->overlap) params.overlap = *o->overlap;
    if (o->nfft) params.nfft = *o->nfft;
    const auto spec = stft_psd(load_timeseries(o->in, o->in_format.resolve(o->in)), params);
    save_spectrogram(spec, o->out);
    if (o->gnuplot) write_spectrogram_gnuplot(spec, *o->gnuplot);
    std::cout << "spectrogram: " << spec.rows() << " x " << spec.cols() << " (freq x time) -> "
              << o->out.string() << "\n";
  });
}

void add_featurize(CLI::App& app) {
  struct Opts {
    ConfigOpts config;
    BandOpts band;
    std::optional<fs::path> spec, pos, neg;
    fs::path out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "featurize", "Band-select and unit-sum normalise spectrogram columns into sparse patterns");
  o->config.add(cmd);
  o->band.add(cmd);
  auto* spec = cmd->add_option("--spec", o->spec, "Spectrogram to featurise unlabelled (label 0)");
  auto* pos = cmd->add_option("--pos", o->pos, "Spectrogram whose bins are labelled +1 (noise)");
  auto* neg = cmd->add_option("--neg", o->neg, "Spectrogram whose bins are labelled -1 (clean)");
  pos->needs(neg);
  neg->needs(pos);
  spec->excludes(pos)->excludes(neg);
  cmd->add_option("--out", o->out, "Output sparse pattern file")->required();
  cmd->callback([o] {
    auto band = o->config.load().band;
    o->band.apply(band);
    const auto patterns = [&](const fs::path& p) {
      return normalize_unit_sum(extract_band_patterns(load_spectrogram(p), band));
    };
    FeatureMatrix fm;
    if (o->spec) {
      fm = patterns(*o->spec);
    } else if (o->pos) {
      fm = stack_labeled(patterns(*o->pos), patterns(*o->neg));
    } else {
      throw ValidationError("featurize needs --spec or both --pos and --neg");
    }
    write_sparse(fm, o->out);
    std::cout << "featurize: " << fm.n_patterns() << " patterns x " << fm.n_features()
              << " features -> " << o->out.string() << "\n";
  });
}

void add_scale(CLI::App& app) {
  struct Opts {
    ConfigOpts config;
    fs::path in, out;
    std::optional<fs::path> save, restore;
    std::optional<double> lower, upper;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("scale", "Min-max scale sparse patterns per feature");
  o->config.add(cmd);
  cmd->add_option("--in", o->in, "Input sparse patterns")->required();
  cmd->add_option("--out", o->out, "Output sparse patterns")->required();
  auto* save = cmd->add_option("--save", o->save, "Fit on the input and write the range file here");
  auto* restore = cmd->add_option("--restore", o->restore, "Apply a previously saved range file");
  save->excludes(restore);
  cmd->add_option("-l,--lower", o->lower, "Target lower bound (default -1)");
  cmd->add_option("-u,--upper", o->upper, "Target upper bound (default 1)");
  cmd->callback([o] {
    const auto cfg = o->config.load();
    ScaleRange range;
    FeatureMatrix fm;
    if (o->restore) {
      if (o->lower || o->upper) throw ValidationError("--lower/--upper come from the range file with --restore");
      range = read_range(*o->restore);
      fm = read_sparse_at_least(o->in, range.features.size());
      if (range.features.size() < fm.n_features()) range = read_range(*o->restore, fm.n_features());
    } else {
      fm = read_sparse(o->in);
      range = fit_scale(fm, o->lower.value_or(cfg.scale_lower), o->upper.value_or(cfg.scale_upper));
      if (o->save) write_range(range, *o->save);
    }
    const auto scaled = apply_scale(fm, range);
    write_sparse(scaled, o->out);
    std::cout << "scale: " << scaled.n_patterns() << " patterns to [" << io::format_real(range.lower)
              << ", " << io::format_real(range.upper) << "] -> " << o->out.string() << "\n";
  });
}

struct TrainOpts {
  ConfigOpts config;
  KernelOpts kernel;
  double c = 1.0;
  double kkt_tol = 1e-3;
  std::size_t cache_mb = 100;

  void add(CLI::App* cmd) {
    config.add(cmd);
    kernel.add(cmd);
    cmd->add_option("-c,--C", c, "Soft-margin penalty C")->capture_default_str();
    cmd->add_option("--kkt-tol", kkt_tol, "Stopping tolerance on the KKT gap")->capture_default_str();
    cmd->add_option("--cache-mb", cache_mb, "Kernel row cache size in MiB")->capture_default_str();
  }
  TrainConfig resolve() const {
    TrainConfig cfg;
    cfg.kernel = config.load().kernel;
    kernel.apply(cfg.kernel);
    cfg.C = c;
    cfg.kkt_tol = kkt_tol;
    cfg.cache_bytes = cache_mb << 20;
    return cfg;
  }
};

void add_train(CLI::App& app) {
  struct Opts {
    TrainOpts train;
    fs::path data, model;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train", "Train a C-SVC on labelled sparse patterns");
  cmd->add_option("--train", o->data, "Labelled sparse patterns")->required();
  cmd->add_option("--model", o->model, "Output model file")->required();
  o->train.add(cmd);
  cmd->callback([o] {
    const auto result = train_detailed(read_sparse(o->data), o->train.resolve());
    save_model(result.model, o->model);
    std::cout << "train: " << result.model.n_sv() << " support vectors (" << result.stats.n_bounded_sv
              << " at bound), " << result.stats.iterations << " iterations, objective "
              << io::format_real(result.stats.dual_objective) << " -> " << o->model.string() << "\n";
  });
}

CvConfig resolve_cv(const PipelineConfig& base, std::optional<std::size_t> k,
                    std::optional<std::uint64_t> seed, bool no_stratify) {
  CvConfig cv = base.cv;
  if (k) cv.k = *k;
  if (seed) cv.shuffle_seed = *seed;
  if (no_stratify) cv.stratified = false;
  return cv;
}

void add_cv(CLI::App& app) {
  struct Opts {
    TrainOpts train;
    fs::path data;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    bool no_stratify = false;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("cv", "k-fold cross-validation accuracy for one (C, gamma)");
  cmd->add_option("--train", o->data, "Labelled sparse patterns")->required();
  o->train.add(cmd);
  cmd->add_option("--k", o->k, "Number of folds (default 5)");
  cmd->add_option("--seed", o->seed, "Fold shuffle seed (default 0)");
  cmd->add_flag("--no-stratify", o->no_stratify, "Shuffle all patterns together instead of per class");
  cmd->callback([o] {
    const auto cv = resolve_cv(o->train.config.load(), o->k, o->seed, o->no_stratify);
    const auto r = cross_validate(read_sparse(o->data), o->train.resolve(), cv);
    std::cout << "Cross Validation Accuracy = " << percent4(r.accuracy_percent) << "% (" << r.correct
              << "/" << r.total << ")\n";
  });
}

void add_grid(CLI::App& app) {
  struct Opts {
    ConfigOpts config;
    KernelOpts kernel;
    fs::path data, out;
    std::optional<fs::path> gnuplot;
    std::optional<std::string> log2c, log2g;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    bool no_stratify = false;
    double kkt_tol = 1e-3;
    unsigned workers = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("grid", "Grid search over (C, gamma) scored by k-fold CV");
  o->config.add(cmd);
  o->kernel.add(cmd, false);
  cmd->add_option("--train", o->data, "Labelled sparse patterns")->required();
  cmd->add_option("--out", o->out, "Result CSV (C,gamma,accuracy)")->required();
  cmd->add_option("--gnuplot", o->gnuplot, "Also write log2C log2gamma accuracy triples");
  cmd->add_option("--log2c", o->log2c, "log2 C range start:stop:step (default -5:15:2; write --log2c=-5:15:2)");
  cmd->add_option("--log2g", o->log2g, "log2 gamma range start:stop:step (default -15:3:2)");
  cmd->add_option("--k", o->k, "Number of folds (default 5)");
  cmd->add_option("--seed", o->seed, "Fold shuffle seed (default 0)");
  cmd->add_flag("--no-stratify", o->no_stratify, "Shuffle all patterns together instead of per class");
  cmd->add_option("--kkt-tol", o->kkt_tol, "Stopping tolerance on the KKT gap")->capture_default_str();
  cmd->add_option("--workers", o->workers, "Worker threads, 0 for one per core")->capture_default_str();
  cmd->callback([o] {
    const auto cfg = o->config.load();
    GridSpec grid = cfg.grid;
    if (o->log2c) grid.log2_c = parse_exponent_range(*o->log2c, "--log2c");
    if (o->log2g) grid.log2_gamma = parse_exponent_range(*o->log2g, "--log2g");
    GridOptions opts;
    opts.base_kernel = cfg.kernel;
    o->kernel.apply(opts.base_kernel);
    opts.kkt_tol = o->kkt_tol;
    opts.workers = o->workers;
    const auto r = grid_search(read_sparse(o->data), grid,
                               resolve_cv(cfg, o->k, o->seed, o->no_stratify), opts);
    write_grid_csv(r, o->out);
    if (o->gnuplot) write_grid_gnuplot(r, *o->gnuplot);
    const auto& best = r.best_cell();
    std::cout << "grid: " << r.cells.size() << " cells, best C=" << io::format_real(best.c)
              << " gamma=" << io::format_real(best.gamma) << " accuracy=" << percent4(best.accuracy_percent)
              << "% -> " << o->out.string() << "\n";
  });
}

void add_predict(CLI::App& app) {
  struct Opts {
    fs::path test, model, out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("predict", "Predict labels for sparse patterns, one label per line");
  cmd->add_option("--test", o->test, "Sparse patterns, labelled or with label 0")->required();
  cmd->add_option("--model", o->model, "Model file")->required();
  cmd->add_option("--out", o->out, "Output predictions")->required();
  cmd->callback([o] {
    const auto model = load_model(o->model);
    const auto fm = read_sparse_at_least(o->test, model.n_features());
    std::string text;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < fm.n_patterns(); ++i) {
      const int label = predict(model, fm.pattern(i));
      text += std::to_string(label) + "\n";
      if (fm.has_labels() && fm.labels()[i] == label) ++correct;
    }
    io::write_text(o->out, text);
    if (fm.has_labels()) {
      const double pct = fm.n_patterns() ? 100.0 * correct / fm.n_patterns() : 0.0;
      std::printf("Accuracy = %g%% (%zu/%zu)\n", pct, correct, fm.n_patterns());
    } else {
      std::cout << "predict: " << fm.n_patterns() << " labels -> " << o->out.string() << "\n";
    }
  });
}

void add_detect(CLI::App& app) {
  struct Opts {
    ConfigOpts config;
    BandOpts band;
    fs::path spec, model, range, report;
    std::optional<fs::path> spec_gnuplot, labels_gnuplot, truth;
    std::size_t min_bins = 1;
    std::size_t bridge = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("detect", "Classify every spectrogram bin and report pump activity");
  o->config.add(cmd);
  o->band.add(cmd);
  cmd->add_option("--spec", o->spec, "Spectrogram of the record to scan")->required();
  cmd->add_option("--model", o->model, "Model file")->required();
  cmd->add_option("--range", o->range, "Range file from scale --save")->required();
  cmd->add_option("--report", o->report, "Output report JSON")->required();
  cmd->add_option("--spec-gnuplot", o->spec_gnuplot, "Spectrogram pm3d triples for plotting");
  cmd->add_option("--labels-gnuplot", o->labels_gnuplot, "Label scatter rows `t 0.5 code` (90 noise, 30 clean)");
  cmd->add_option("--min-bins", o->min_bins, "Drop noise runs shorter than this")->capture_default_str();
  cmd->add_option("--bridge", o->bridge, "Merge noise runs separated by at most this many clean bins")
      ->capture_default_str();
  cmd->add_option("--truth", o->truth, "Schedule JSON to score the intervals against (prints IoU)");
  cmd->callback([o] {
    auto band = o->config.load().band;
    o->band.apply(band);
    const auto spec = load_spectrogram(o->spec);
    const auto model = load_model(o->model);
    const auto range = read_range(o->range, band.width());
    const auto track = classify_bins(model, range, spec, band);
    const auto report = activity_intervals(track, o->min_bins, o->bridge);
    emit_report(report, track, spec,
                {o->report, o->spec_gnuplot.value_or(fs::path{}), o->labels_gnuplot.value_or(fs::path{})},
                o->model.string(), o->range.string());
    std::cout << "detect: " << percent4(report.percent_absent) << "% of " << report.n_bins
              << " bins free of pump noise, " << report.intervals.size() << " intervals";
    if (o->truth) {
      const auto truth = load_schedule(*o->truth).intervals(spec.start_time());
      std::cout << ", IoU " << percent4(interval_iou(report.intervals, truth) * 100.0) << "%";
    }
    std::cout << " -> " << o->report.string() << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pump-noise detection in seismograms with a kernel SVM"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "seisvm 1.0");
  add_synth(app);
  add_slice(app);
  add_downsample(app);
  add_spectrogram(app);
  add_featurize(app);
  add_scale(app);
  add_train(app);
  add_cv(app);
  add_grid(app);
  add_predict(app);
  add_detect(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
