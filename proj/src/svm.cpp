#include "seisvm/svm.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "seisvm/io_util.hpp"

namespace seisvm {

namespace {

double dot(std::span<const double> a, std::span<const double> b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// `sv` may be shorter than `x`; its missing trailing features are zero.
double kernel_padded(const KernelSpec& spec, std::span<const double> sv,
                     std::span<const double> x) {
  const std::size_t n = sv.size();
  switch (spec.kind) {
    case KernelKind::linear:
      return dot(sv, x, n);
    case KernelKind::polynomial:
      return std::pow(spec.gamma * dot(sv, x, n) + spec.coef0, spec.degree);
    case KernelKind::rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = sv[i] - x[i];
        d2 += d * d;
      }
      for (std::size_t i = n; i < x.size(); ++i) d2 += x[i] * x[i];
      return std::exp(-spec.gamma * d2);
    }
    case KernelKind::sigmoid:
      return std::tanh(spec.gamma * dot(sv, x, n) + spec.coef0);
  }
  return 0.0;
}

}  // namespace

std::string_view kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
    case KernelKind::sigmoid: return "sigmoid";
  }
  return "?";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "polynomial" || name == "poly") return KernelKind::polynomial;
  if (name == "rbf") return KernelKind::rbf;
  if (name == "sigmoid") return KernelKind::sigmoid;
  throw ValidationError("unknown kernel '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (kind != KernelKind::linear && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw ValidationError(std::string(kernel_name(kind)) + " kernel needs gamma > 0");
  }
  if (!std::isfinite(coef0)) throw ValidationError("coef0 must be finite");
  if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw ValidationError("kernel arguments differ in dimension (" + std::to_string(x.size()) +
                          " vs " + std::to_string(z.size()) + ")");
  }
  return kernel_padded(spec, x, z);
}

void TrainConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("C must be positive");
  if (!(kkt_tol > 0.0)) throw ValidationError("KKT tolerance must be positive");
  if (max_iter < 1) throw ValidationError("max_iter must be positive");
  kernel.validate();
}

SvmModel::SvmModel(KernelSpec kernel, Matrix support_vectors, std::vector<double> sv_coef,
                   double bias)
    : kernel_(kernel),
      support_vectors_(std::move(support_vectors)),
      sv_coef_(std::move(sv_coef)),
      bias_(bias) {
  kernel_.validate();
  if (sv_coef_.empty()) throw ValidationError("model has no support vectors");
  if (support_vectors_.rows() != sv_coef_.size()) {
    throw ValidationError("support vector count does not match coefficient count");
  }
  if (!std::isfinite(bias_)) throw ValidationError("model bias is not finite");
  for (double c : sv_coef_) {
    if (c == 0.0 || !std::isfinite(c)) {
      throw ValidationError("support vector coefficients must be finite and nonzero");
    }
    if (c > 0.0) ++n_pos_;
  }
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  if (x.size() < model.n_features()) {
    throw ValidationError("input has " + std::to_string(x.size()) + " features, model needs " +
                          std::to_string(model.n_features()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < model.n_sv(); ++j) {
    sum += model.sv_coef()[j] * kernel_padded(model.kernel(), model.support_vectors().row(j), x);
  }
  return sum + model.bias();
}

int predict(const SvmModel& model, std::span<const double> x) {
  return label_for(decision_value(model, x));
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  const KernelSpec& k = model.kernel();
  std::string out = "svm_type c_svc\n";
  out += "kernel_type " + std::string(kernel_name(k.kind)) + "\n";
  if (k.kind == KernelKind::polynomial) out += "degree " + std::to_string(k.degree) + "\n";
  if (k.kind != KernelKind::linear) out += "gamma " + io::format_real(k.gamma) + "\n";
  if (k.kind == KernelKind::polynomial || k.kind == KernelKind::sigmoid) {
    out += "coef0 " + io::format_real(k.coef0) + "\n";
  }
  out += "nr_class 2\n";
  out += "total_sv " + std::to_string(model.n_sv()) + "\n";
  out += "rho " + io::format_real(-model.bias()) + "\n";
  out += "label 1 -1\n";
  out += "nr_sv " + std::to_string(model.n_positive_sv()) + " " +
         std::to_string(model.n_sv() - model.n_positive_sv()) + "\n";
  out += "SV\n";
  for (std::size_t j = 0; j < model.n_sv(); ++j) {
    out += io::format_real(model.sv_coef()[j]);
    const auto sv = model.support_vectors().row(j);
    for (std::size_t f = 0; f < sv.size(); ++f) {
      if (sv[f] == 0.0) continue;
      out += " " + std::to_string(f + 1) + ":" + io::format_real(sv[f]);
    }
    out += "\n";
  }
  io::write_text(path, out);
}

SvmModel load_model(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  std::map<std::string, std::vector<std::string>> header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::optional<std::string> {
    if (pos >= text.size()) return std::nullopt;
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = nl + 1;
    ++line_no;
    return line;
  };
  auto split = [](const std::string& line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      const std::size_t b = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      if (i > b) tokens.push_back(line.substr(b, i - b));
    }
    return tokens;
  };
  const auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
  };

  bool saw_sv = false;
  while (auto line = next_line()) {
    auto tokens = split(*line);
    if (tokens.empty()) continue;
    if (tokens[0] == "SV") {
      saw_sv = true;
      break;
    }
    const std::string key = tokens[0];
    tokens.erase(tokens.begin());
    header[key] = std::move(tokens);
  }
  if (!saw_sv) throw fail("missing 'SV' section");

  const auto field = [&](const std::string& key) -> const std::vector<std::string>& {
    auto it = header.find(key);
    if (it == header.end() || it->second.empty()) throw fail("missing '" + key + "' line");
    return it->second;
  };
  const auto real_field = [&](const std::string& key) {
    return io::parse_real(field(key).front(), key);
  };

  if (field("svm_type").front() != "c_svc") throw fail("only svm_type c_svc is supported");
  KernelSpec kernel;
  kernel.kind = parse_kernel_kind(field("kernel_type").front());
  if (kernel.kind != KernelKind::linear) kernel.gamma = real_field("gamma");
  if (kernel.kind == KernelKind::polynomial) {
    kernel.degree = static_cast<int>(io::parse_integer(field("degree").front(), "degree"));
  }
  if (kernel.kind == KernelKind::polynomial || kernel.kind == KernelKind::sigmoid) {
    kernel.coef0 = real_field("coef0");
  }
  if (header.contains("nr_class") && field("nr_class").front() != "2") {
    throw fail("only two-class models are supported");
  }
  const double rho = real_field("rho");
  const long long total_sv = io::parse_integer(field("total_sv").front(), "total_sv");
  if (header.contains("label")) {
    const auto& labels = field("label");
    if (labels.size() != 2 || labels[0] != "1" || labels[1] != "-1") {
      throw fail("label order must be '1 -1'");
    }
  }

  std::vector<double> coef;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t width = 0;
  while (auto line = next_line()) {
    const auto tokens = split(*line);
    if (tokens.empty()) continue;
    try {
      coef.push_back(io::parse_real(tokens[0], "sv_coef"));
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        const auto colon = tokens[t].find(':');
        if (colon == std::string::npos) {
          throw ValidationError("malformed SV token '" + tokens[t] + "'");
        }
        const long long idx =
            io::parse_integer(std::string_view(tokens[t]).substr(0, colon), "feature index");
        if (idx < 1 || (!row.empty() && static_cast<std::size_t>(idx) <= row.back().first)) {
          throw ValidationError("SV indices must be ascending and >= 1");
        }
        row.emplace_back(static_cast<std::size_t>(idx),
                         io::parse_real(std::string_view(tokens[t]).substr(colon + 1), "SV value"));
        width = std::max(width, static_cast<std::size_t>(idx));
      }
      rows.push_back(std::move(row));
    } catch (const ValidationError& e) {
      throw fail(e.what());
    }
  }
  if (static_cast<long long>(coef.size()) != total_sv) {
    throw fail("total_sv " + std::to_string(total_sv) + " but " + std::to_string(coef.size()) +
               " SV lines");
  }
  Matrix svs(rows.size(), width);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (const auto& [idx, v] : rows[j]) svs(j, idx - 1) = v;
  }
  return SvmModel(kernel, std::move(svs), std::move(coef), -rho);
}

}  // namespace seisvm
