#include "cocylab/experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cocylab/errors.hpp"

namespace cocylab::experiment {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::lambda_seq: return "lambda_seq";
    case ExperimentKind::rho: return "rho";
    case ExperimentKind::certificate: return "certificate";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::collapse: return "collapse";
    case ExperimentKind::profile: return "profile";
    case ExperimentKind::proof_check: return "proof_check";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  static const std::pair<const char*, ExperimentKind> table[] = {
      {"spectrum", ExperimentKind::spectrum},     {"lambda_seq", ExperimentKind::lambda_seq},
      {"lambda", ExperimentKind::lambda_seq},     {"rho", ExperimentKind::rho},
      {"certificate", ExperimentKind::certificate}, {"sweep", ExperimentKind::sweep},
      {"collapse", ExperimentKind::collapse},     {"profile", ExperimentKind::profile},
      {"proof_check", ExperimentKind::proof_check}, {"proof-check", ExperimentKind::proof_check},
  };
  for (const auto& [text, kind] : table) {
    if (name == text) return kind;
  }
  return std::nullopt;
}

bool is_randomized(ExperimentKind kind) {
  return kind == ExperimentKind::sweep || kind == ExperimentKind::profile ||
         kind == ExperimentKind::proof_check;
}

std::string format(const Diagnostic& d) { return d.field + ": " + d.message; }

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string what = "invalid config";
        for (const auto& d : diagnostics) what += "\n  " + format(d);
        return what;
      }()),
      diagnostics_(std::move(diagnostics)) {}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"<file>", std::string("malformed JSON: ") + e.what()}});
  }
}

Matrix parse_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw DomainError("matrix must be a non-empty array of rows");
  const auto d = static_cast<Eigen::Index>(rows.size());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw DomainError("matrix must be square (row " + std::to_string(i) + ")");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw DomainError("matrix entries must be numbers");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller on the portable uniform, so draws agree across standard libraries.
double gaussian(Rng& rng) {
  const double u = 1.0 - uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace

std::vector<Matrix> random_generators(std::size_t count, const std::vector<double>& scales,
                                      double spread, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(scales.size());
  const Matrix diag = Eigen::Map<const Vector>(scales.data(), d).asDiagonal();
  std::vector<Matrix> out;
  out.reserve(count);
  while (out.size() < count) {
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = gaussian(rng);
    }
    Matrix m = diag * (Matrix::Identity(d, d) + spread * g);
    const auto sv = singular_values(m);
    if (sv(d - 1) > 1e-6 * sv(0)) out.push_back(std::move(m));
  }
  return out;
}

std::shared_ptr<const FiniteBase> build_base(const json& spec) {
  const std::string kind = spec.value("kind", "cyclic");
  if (kind == "cyclic") {
    const auto n = spec.at("n").get<std::size_t>();
    if (n == 0) throw DomainError("n must be positive");
    return std::make_shared<const FiniteBase>(FiniteBase::cyclic(n));
  }
  if (kind == "cycles") {
    return std::make_shared<const FiniteBase>(FiniteBase::disjoint_cycles(
        spec.at("lengths").get<std::vector<std::size_t>>(), spec.at("masses").get<std::vector<double>>()));
  }
  if (kind == "finite") {
    return std::make_shared<const FiniteBase>(spec.at("weights").get<std::vector<double>>(),
                                              spec.at("permutation").get<std::vector<Atom>>());
  }
  throw DomainError("unknown base kind '" + kind + "'");
}

Cocycle build_cocycle(const json& spec, std::shared_ptr<const FiniteBase> base,
                      std::optional<std::uint64_t> seed, std::uint64_t stream) {
  const std::string kind = spec.value("kind", "constant");
  if (kind == "constant") return Cocycle::constant(std::move(base), parse_matrix(spec.at("matrix")));
  if (kind == "identity") return Cocycle::identity(std::move(base), spec.at("dimension").get<int>());
  if (kind == "generators") {
    std::vector<Matrix> gens;
    for (const auto& m : spec.at("matrices")) gens.push_back(parse_matrix(m));
    if (gens.size() != base->size()) throw DomainError("need one matrix per atom");
    return Cocycle(std::move(base), std::move(gens));
  }
  if (kind == "random") {
    if (!seed) throw DomainError("random cocycles need a seed");
    std::vector<double> scales;
    if (spec.contains("diagonal")) {
      scales = spec.at("diagonal").get<std::vector<double>>();
    } else {
      scales.assign(spec.at("dimension").get<std::size_t>(), 1.0);
    }
    const double spread = spec.value("spread", 1.0);
    Rng rng = make_rng(*seed, stream);
    auto gens = random_generators(base->size(), scales, spread, rng);
    return Cocycle(std::move(base), std::move(gens));
  }
  throw DomainError("unknown cocycle kind '" + kind + "'");
}

namespace {

struct Reader {
  const json& root;
  std::vector<Diagnostic>& out;

  void add(const std::string& field, const std::string& message) { out.push_back({field, message}); }

  template <typename T>
  std::optional<T> get(const std::string& field) {
    if (!root.contains(field)) return std::nullopt;
    try {
      return root.at(field).get<T>();
    } catch (const json::exception&) {
      add(field, "has the wrong type");
      return std::nullopt;
    }
  }
};

// Reports which field of a base spec is at fault.
std::string base_field(const json& spec, const std::string& message) {
  if (message.find("permutation") != std::string::npos) return "base.permutation";
  if (message.find("weight") != std::string::npos || message.find("sum") != std::string::npos ||
      message.find("mass") != std::string::npos) {
    return spec.contains("masses") ? "base.masses" : "base.weights";
  }
  return "base";
}

// Dimension read off a cocycle spec without building it.
std::optional<int> spec_dimension(const json& spec) {
  try {
    const std::string kind = spec.value("kind", "constant");
    if (kind == "constant") return static_cast<int>(spec.at("matrix").size());
    if (kind == "generators") return static_cast<int>(spec.at("matrices").at(0).size());
    if (kind == "random" && spec.contains("diagonal")) return static_cast<int>(spec.at("diagonal").size());
    if (kind == "random" || kind == "identity") return spec.at("dimension").get<int>();
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

std::vector<Diagnostic> validate_into(const json& config, const Overrides& overrides,
                                      ExperimentConfig& cfg) {
  std::vector<Diagnostic> diags;
  if (!config.is_object()) return {{"<root>", "config must be a JSON object"}};
  Reader r{config, diags};

  static const std::set<std::string> known = {
      "schema_version", "experiment", "base", "cocycle", "cocycle_b", "seed", "p", "k",
      "epsilon", "radii", "trials", "n_max", "qr_steps", "families", "budget",
      "boundary_fraction", "threads", "description"};
  for (const auto& [key, value] : config.items()) {
    if (!known.contains(key)) r.add(key, "unknown field");
  }

  if (auto v = r.get<int>("schema_version")) {
    if (*v != kSchemaVersion) r.add("schema_version", "unsupported version " + std::to_string(*v));
  } else if (!config.contains("schema_version")) {
    r.add("schema_version", "is required");
  }

  if (auto name = r.get<std::string>("experiment")) {
    auto kind = parse_kind(*name);
    if (!kind) {
      r.add("experiment", "unknown experiment '" + *name + "'");
    } else if (overrides.kind && *overrides.kind != *kind) {
      r.add("experiment", "config is for '" + to_string(*kind) + "' but the command is '" +
                              to_string(*overrides.kind) + "'");
    } else {
      cfg.kind = *kind;
    }
  } else if (overrides.kind) {
    cfg.kind = *overrides.kind;
  } else if (!config.contains("experiment")) {
    r.add("experiment", "is required");
  }

  cfg.seed = overrides.seed ? overrides.seed : r.get<std::uint64_t>("seed");
  if (auto v = r.get<std::size_t>("trials")) cfg.trials = *v;
  if (overrides.trials) cfg.trials = *overrides.trials;

  if (config.contains("p")) {
    const json& p = config.at("p");
    try {
      cfg.p = p.is_string() ? LpExponent::parse(p.get<std::string>()) : LpExponent::finite(p.get<double>());
    } catch (const std::exception&) {
      r.add("p", "must satisfy p >= 1 (a number or \"inf\")");
    }
  }
  if (auto v = r.get<int>("k")) cfg.k = *v;
  if (auto v = r.get<double>("epsilon")) {
    if (!(*v > 0.0) || !std::isfinite(*v)) r.add("epsilon", "must be positive");
    cfg.epsilon = *v;
  }
  if (auto v = r.get<std::vector<double>>("radii")) {
    cfg.radii = *v;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!((*v)[i] > 0.0 && (*v)[i] <= 1.0)) r.add("radii", "entries must lie in (0, 1]");
      if (i > 0 && !((*v)[i] < (*v)[i - 1])) r.add("radii", "must be strictly decreasing");
    }
  }
  if (auto v = r.get<std::size_t>("n_max")) {
    if (*v == 0) r.add("n_max", "must be positive");
    cfg.n_max = *v;
  }
  if (auto v = r.get<std::size_t>("qr_steps")) cfg.qr_steps = *v;
  if (auto v = r.get<std::vector<std::string>>("families")) {
    cfg.families.clear();
    for (const auto& name : *v) {
      try {
        cfg.families.push_back(parse_family(name));
      } catch (const DomainError& e) {
        r.add("families", e.what());
      }
    }
    if (v->empty()) r.add("families", "must not be empty");
  }
  if (auto v = r.get<double>("budget")) {
    if (!(*v > 0.0 && *v <= 1.0)) r.add("budget", "must lie in (0, 1]");
    cfg.budget = *v;
  }
  if (auto v = r.get<double>("boundary_fraction")) {
    if (!(*v >= 0.0 && *v <= 1.0)) r.add("boundary_fraction", "must lie in [0, 1]");
    cfg.boundary_fraction = *v;
  }
  if (auto v = r.get<unsigned>("threads")) cfg.threads = *v;

  // Base and cocycles.
  std::shared_ptr<const FiniteBase> base;
  if (!config.contains("base")) {
    r.add("base", "is required");
  } else {
    cfg.base = config.at("base");
    try {
      base = build_base(cfg.base);
    } catch (const json::exception& e) {
      r.add("base", std::string("malformed: ") + e.what());
    } catch (const std::exception& e) {
      r.add(base_field(cfg.base, e.what()), e.what());
    }
  }
  std::optional<int> dimension;
  const auto check_cocycle = [&](const char* field, const json& spec, std::uint64_t stream) {
    if (!base) {
      if (auto d = spec_dimension(spec); d && !dimension) dimension = d;
      return;
    }
    try {
      const Cocycle c = build_cocycle(spec, base, cfg.seed, stream);
      if (dimension && *dimension != c.dimension()) {
        r.add(field, "dimension " + std::to_string(c.dimension()) + " does not match " +
                         std::to_string(*dimension));
      }
      dimension = c.dimension();
    } catch (const json::exception& e) {
      r.add(field, std::string("malformed: ") + e.what());
    } catch (const std::exception& e) {
      r.add(field, e.what());
    }
  };
  if (!config.contains("cocycle")) {
    r.add("cocycle", "is required");
  } else {
    cfg.cocycle = config.at("cocycle");
    check_cocycle("cocycle", cfg.cocycle, 1);
  }
  if (config.contains("cocycle_b")) {
    cfg.cocycle_b = config.at("cocycle_b");
    check_cocycle("cocycle_b", *cfg.cocycle_b, 2);
  }

  // Experiment-specific requirements.
  if (dimension && (cfg.k < 1 || cfg.k > *dimension)) {
    r.add("k", "must satisfy 1 <= k <= d = " + std::to_string(*dimension));
  }
  const bool random_cocycle =
      (config.contains("cocycle") && config.at("cocycle").is_object() &&
       config.at("cocycle").value("kind", "") == "random") ||
      (cfg.cocycle_b && cfg.cocycle_b->is_object() && cfg.cocycle_b->value("kind", "") == "random");
  const bool needs_seed = is_randomized(cfg.kind) && !(cfg.kind == ExperimentKind::proof_check && cfg.cocycle_b);
  if ((needs_seed || random_cocycle) && !cfg.seed) r.add("seed", "is required for randomized experiments");
  switch (cfg.kind) {
    case ExperimentKind::rho:
      if (!cfg.cocycle_b) r.add("cocycle_b", "is required for rho");
      break;
    case ExperimentKind::sweep:
      if (cfg.trials == 0) r.add("trials", "must be positive for sweep");
      break;
    case ExperimentKind::profile:
      if (cfg.trials == 0) r.add("trials", "must be positive for profile");
      if (cfg.radii.empty()) r.add("radii", "is required for profile");
      break;
    case ExperimentKind::proof_check:
      if (!cfg.cocycle_b && cfg.trials == 0) r.add("trials", "must be positive unless cocycle_b is given");
      break;
    case ExperimentKind::collapse:
      if (base && !base->ergodic()) r.add("base", "collapse needs a single-cycle base");
      break;
    case ExperimentKind::spectrum:
      if (base && !base->ergodic() && cfg.qr_steps > 0) r.add("qr_steps", "QR estimates need a single-cycle base");
      break;
    default:
      break;
  }
  return diags;
}

}  // namespace

std::vector<Diagnostic> validate(const json& config, const Overrides& overrides) {
  ExperimentConfig cfg;
  return validate_into(config, overrides, cfg);
}

ExperimentConfig load_config(const json& config, const Overrides& overrides) {
  ExperimentConfig cfg;
  auto diags = validate_into(config, overrides, cfg);
  if (!diags.empty()) throw ConfigError(std::move(diags));
  return cfg;
}

}  // namespace cocylab::experiment
