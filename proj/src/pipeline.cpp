#include "seisvm/pipeline.hpp"

#include <json.hpp>

#include "seisvm/error.hpp"
#include "seisvm/io_util.hpp"

namespace seisvm {

namespace {

nlohmann::ordered_json range_to_json(const ExponentRange& r) {
  return {{"start", r.start}, {"stop", r.stop}, {"step", r.step}};
}

ExponentRange range_from_json(const nlohmann::json& j, ExponentRange fallback) {
  fallback.start = j.value("start", fallback.start);
  fallback.stop = j.value("stop", fallback.stop);
  fallback.step = j.value("step", fallback.step);
  return fallback;
}

}  // namespace

void PipelineConfig::validate() const {
  stft.validate();
  band.validate(stft.n_freqs());
  if (!(scale_lower < scale_upper)) throw ValidationError("scale lower must be < upper");
  kernel.validate();
  (void)grid.log2_c.values();
  (void)grid.log2_gamma.values();
  if (cv.k < 2) throw ValidationError("k must be >= 2");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  try {
    const auto j = nlohmann::json::parse(io::read_text(path));
    if (j.contains("stft")) {
      const auto& s = j["stft"];
      cfg.stft.window_len = s.value("window", cfg.stft.window_len);
      cfg.stft.overlap = s.value("overlap", cfg.stft.overlap);
      cfg.stft.nfft = s.value("nfft", cfg.stft.nfft);
      cfg.stft.fs = s.value("fs", cfg.stft.fs);
    }
    if (j.contains("band")) {
      cfg.band.row_start = j["band"].value("row_start", cfg.band.row_start);
      cfg.band.row_end = j["band"].value("row_end", cfg.band.row_end);
    }
    if (j.contains("scale")) {
      cfg.scale_lower = j["scale"].value("lower", cfg.scale_lower);
      cfg.scale_upper = j["scale"].value("upper", cfg.scale_upper);
    }
    if (j.contains("kernel")) {
      const auto& k = j["kernel"];
      if (k.contains("kind")) cfg.kernel.kind = parse_kernel_kind(k["kind"].get<std::string>());
      cfg.kernel.gamma = k.value("gamma", cfg.kernel.gamma);
      cfg.kernel.coef0 = k.value("coef0", cfg.kernel.coef0);
      cfg.kernel.degree = k.value("degree", cfg.kernel.degree);
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      if (g.contains("log2c")) cfg.grid.log2_c = range_from_json(g["log2c"], cfg.grid.log2_c);
      if (g.contains("log2gamma")) {
        cfg.grid.log2_gamma = range_from_json(g["log2gamma"], cfg.grid.log2_gamma);
      }
    }
    if (j.contains("cv")) {
      cfg.cv.k = j["cv"].value("k", cfg.cv.k);
      cfg.cv.shuffle_seed = j["cv"].value("shuffle_seed", cfg.cv.shuffle_seed);
      cfg.cv.stratified = j["cv"].value("stratified", cfg.cv.stratified);
    }
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed config: " + e.what());
  }
  cfg.validate();
  return cfg;
}

void save_pipeline_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["stft"] = {{"window", cfg.stft.window_len},
               {"overlap", cfg.stft.overlap},
               {"nfft", cfg.stft.nfft},
               {"fs", cfg.stft.fs}};
  j["band"] = {{"row_start", cfg.band.row_start}, {"row_end", cfg.band.row_end}};
  j["scale"] = {{"lower", cfg.scale_lower}, {"upper", cfg.scale_upper}};
  j["kernel"] = {{"kind", std::string(kernel_name(cfg.kernel.kind))},
                 {"gamma", cfg.kernel.gamma},
                 {"coef0", cfg.kernel.coef0},
                 {"degree", cfg.kernel.degree}};
  j["grid"] = {{"log2c", range_to_json(cfg.grid.log2_c)},
               {"log2gamma", range_to_json(cfg.grid.log2_gamma)}};
  j["cv"] = {{"k", cfg.cv.k}, {"shuffle_seed", cfg.cv.shuffle_seed}, {"stratified", cfg.cv.stratified}};
  j["seed"] = cfg.seed;
  io::write_text(path, j.dump(2) + "\n");
}

FeatureMatrix featurize(const TimeSeries& ts, const PipelineConfig& cfg) {
  return normalize_unit_sum(extract_band_patterns(stft_psd(ts, cfg.stft), cfg.band));
}

FeatureMatrix build_training_set(const TimeSeries& noise, const TimeSeries& clean,
                                 const PipelineConfig& cfg) {
  return stack_labeled(featurize(noise, cfg), featurize(clean, cfg));
}

}  // namespace seisvm
