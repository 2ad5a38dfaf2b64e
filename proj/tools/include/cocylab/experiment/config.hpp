#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cocylab/cocycle.hpp"
#include "cocylab/metrics.hpp"
#include "cocylab/random.hpp"
#include "cocylab/sampler.hpp"

namespace cocylab::experiment {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { spectrum, lambda_seq, rho, certificate, sweep, collapse, profile, proof_check };

std::string to_string(ExperimentKind kind);
// Accepts both the config spelling ("lambda_seq", "proof_check") and the CLI
// verb ("lambda", "proof-check").
std::optional<ExperimentKind> parse_kind(const std::string& name);
bool is_randomized(ExperimentKind kind);

// A problem with the config: `field` is a dotted path such as "base.weights".
struct Diagnostic {
  std::string field;
  std::string message;
};

std::string format(const Diagnostic& d);

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::spectrum;
  nlohmann::json base;
  nlohmann::json cocycle;
  std::optional<nlohmann::json> cocycle_b;
  std::optional<std::uint64_t> seed;
  LpExponent p = LpExponent::finite(1.0);
  int k = 1;
  double epsilon = 0.05;
  std::vector<double> radii;
  std::size_t trials = 0;
  std::size_t n_max = 64;
  std::size_t qr_steps = 0;
  std::vector<PerturbationFamily> families = all_families();
  double budget = 0.1;
  double boundary_fraction = 0.1;
  unsigned threads = 0;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Command-line overrides applied on top of the file contents.
struct Overrides {
  std::optional<ExperimentKind> kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

/// Empty iff the config can be run. Builds the base and cocycles to check them.
std::vector<Diagnostic> validate(const nlohmann::json& config, const Overrides& overrides = {});

/// Validates and converts; throws ConfigError listing every diagnostic.
ExperimentConfig load_config(const nlohmann::json& config, const Overrides& overrides = {});

nlohmann::json read_json_file(const std::filesystem::path& path);

std::shared_ptr<const FiniteBase> build_base(const nlohmann::json& spec);
// `seed` is required by random cocycles only.
Cocycle build_cocycle(const nlohmann::json& spec, std::shared_ptr<const FiniteBase> base,
                      std::optional<std::uint64_t> seed, std::uint64_t stream);

Matrix parse_matrix(const nlohmann::json& rows);
nlohmann::json matrix_to_json(const Matrix& m);

/// A(x) = diag(scales) (I + spread G_x) with G_x standard Gaussian entries.
std::vector<Matrix> random_generators(std::size_t count, const std::vector<double>& scales,
                                      double spread, Rng& rng);

}  // namespace cocylab::experiment
