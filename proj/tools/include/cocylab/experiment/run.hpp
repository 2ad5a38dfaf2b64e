#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cocylab/experiment/config.hpp"
#include "cocylab/semicontinuity.hpp"

namespace cocylab::experiment {

// One row of trials.csv.
struct TrialRow {
  std::size_t trial = 0;
  double radius = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  double lambda_k_a = 0.0;
  double lambda_k_b = 0.0;
  double gap = 0.0;
  std::string method;
};

TrialRow to_row(const PerturbationReport& report);

struct ExperimentOutput {
  nlohmann::json result;
  std::vector<TrialRow> trials;
};

/// Runs one experiment. Deterministic for a fixed config.
ExperimentOutput run_experiment(const ExperimentConfig& config);

std::string trials_csv(const std::vector<TrialRow>& rows);

// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

struct RunRequest {
  ExperimentKind kind = ExperimentKind::spectrum;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  Overrides overrides;
};

/// Loads, validates, runs and writes result.json, trials.csv and
/// manifest.json; on failure writes error.json (and the manifest) instead.
/// Returns the process exit status.
int run_to_directory(const RunRequest& request, std::ostream& log);

}  // namespace cocylab::experiment
