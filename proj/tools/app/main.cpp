#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cocylab/experiment/config.hpp"
#include "cocylab/experiment/run.hpp"

namespace ex = cocylab::experiment;

int main(int argc, char** argv) {
  CLI::App app{"cocylab: Lyapunov spectra of matrix cocycles over finite bases"};
  app.require_subcommand(1);
  app.set_version_flag("--version", COCYLAB_VERSION);

  struct Verb {
    const char* name;
    const char* help;
    ex::ExperimentKind kind;
  };
  const Verb verbs[] = {
      {"spectrum", "Lyapunov spectrum (exact on periodic orbits)", ex::ExperimentKind::spectrum},
      {"lambda", "the sequence (1/n) int log |wedge^k A^n|", ex::ExperimentKind::lambda_seq},
      {"rho", "rho_p distance between two cocycles", ex::ExperimentKind::rho},
      {"certificate", "semicontinuity radius for Lambda_k", ex::ExperimentKind::certificate},
      {"sweep", "sample the certified ball and check the bound", ex::ExperimentKind::sweep},
      {"collapse", "spectrum-collapsing perturbation", ex::ExperimentKind::collapse},
      {"profile", "continuity profile over a radius ladder", ex::ExperimentKind::profile},
      {"proof-check", "check the intermediate inequalities on sampled B", ex::ExperimentKind::proof_check},
  };

  ex::RunRequest request;
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  for (const auto& verb : verbs) {
    auto* sub = app.add_subcommand(verb.name, verb.help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--trials", trials, "override the number of trials");
    sub->callback([&request, kind = verb.kind] { request.kind = kind; });
  }

  bool validate_only = false;
  auto* validate = app.add_subcommand("validate", "check a config and list problems");
  validate->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  validate->add_option("--seed", seed, "override the config seed");
  validate->callback([&] { validate_only = true; });

  CLI11_PARSE(app, argc, argv);

  request.overrides.seed = seed;
  request.overrides.trials = trials;
  if (validate_only) {
    try {
      const auto diags = ex::validate(ex::read_json_file(config_path), request.overrides);
      for (const auto& d : diags) std::cout << ex::format(d) << "\n";
      return diags.empty() ? 0 : 2;
    } catch (const ex::ConfigError& e) {
      std::cout << e.what() << "\n";
      return 2;
    }
  }
  request.config_path = config_path;
  request.out_dir = out_dir;
  return ex::run_to_directory(request, std::cerr);
}
