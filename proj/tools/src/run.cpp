#include "cocylab/experiment/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "cocylab/errors.hpp"
#include "cocylab/lyapunov.hpp"
#include "cocylab/parallel.hpp"

#ifndef COCYLAB_VERSION
#define COCYLAB_VERSION "unknown"
#endif

namespace cocylab::experiment {

using nlohmann::json;

namespace {

// JSON has no infinities; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

json spectrum_json(const LyapunovSpectrum& s) {
  return {{"exponents", numbers(s.exponents)},
          {"partial_sums", numbers(s.partial_sums)},
          {"method", to_string(s.method)},
          {"error_bound", number(s.error_bound)}};
}

json certificate_json(const SemicontinuityCertificate& c) {
  return {{"k", c.k},
          {"epsilon", c.epsilon},
          {"p", c.p.to_string()},
          {"case", to_string(c.kind)},
          {"shift", c.shift},
          {"working_epsilon", c.working_epsilon},
          {"N", c.N},
          {"gamma", number(c.gamma)},
          {"K", number(c.K)},
          {"eta", c.eta},
          {"delta_prime", c.delta_prime},
          {"delta", c.delta},
          {"radius_conservative", c.kind == CertificateCase::shifted},
          {"constant", c.constant},
          {"lambda_k", c.lambda_k},
          {"bound", c.bound()},
          {"start_log_minus", c.start_log_minus},
          {"start_log", c.start_log},
          {"start_log_plus", c.start_log_plus},
          {"working_lambda_k", c.working_lambda_k},
          {"start_satisfied", c.start_satisfied}};
}

json diagnostics_json(const ProofDiagnostics& d) {
  return {{"tau", d.tau},
          {"forward_l1", d.forward_l1},
          {"log_plus_gap_l1", d.log_plus_gap_l1},
          {"tail_f", d.tail_f},
          {"tail_g", d.tail_g},
          {"tail_measure_f", d.tail_measure_f},
          {"tail_measure_g", d.tail_measure_g},
          {"measure_g_complement", d.measure_g_complement},
          {"union_bound", d.union_bound},
          {"measure_bound", number(d.measure_bound)},
          {"complement_term", d.complement_term},
          {"complement_bound", d.complement_bound},
          {"good_term", d.good_term},
          {"good_bound", d.good_bound},
          {"induction_lhs", numbers(d.induction_lhs)},
          {"induction_rhs", numbers(d.induction_rhs)},
          {"lambda_k_b", d.lambda_k_b},
          {"final_bound", d.final_bound},
          {"violations", d.violations}};
}

SweepOptions sweep_options(const ExperimentConfig& cfg) {
  SweepOptions o;
  o.families = cfg.families;
  o.seed = cfg.seed.value_or(0);
  o.boundary_fraction = cfg.boundary_fraction;
  o.threads = cfg.threads;
  return o;
}

ExperimentOutput run_spectrum(const ExperimentConfig& cfg, const Cocycle& a) {
  ExperimentOutput out;
  json& r = out.result;
  if (a.base().ergodic()) {
    r["spectrum"] = spectrum_json(exact_spectrum_periodic(a));
    if (cfg.qr_steps > 0) r["qr"] = spectrum_json(qr_spectrum_estimate(a, 0, cfg.qr_steps));
    r["one_point_spectrum"] = is_one_point_spectrum(a, 1e-10);
  } else {
    json cycles = json::array();
    for (const auto& s : cycle_spectra(a)) cycles.push_back(spectrum_json(s));
    r["cycle_spectra"] = cycles;
  }
  std::vector<double> lambdas;
  for (int k = 1; k <= a.dimension(); ++k) lambdas.push_back(lambda_k(a, k));
  r["lambda"] = numbers(lambdas);
  r["lambda_d_logdet"] = lambda_d_logdet(a);
  return out;
}

ExperimentOutput run_lambda(const ExperimentConfig& cfg, const Cocycle& a) {
  const auto seq = lambda_k_sequence(a, cfg.k, cfg.n_max);
  ExperimentOutput out;
  out.result = {{"k", cfg.k},
                {"values", numbers(seq.values)},
                {"log_plus_values", numbers(seq.log_plus_values)},
                {"log_minus_values", numbers(seq.log_minus_values)},
                {"running_inf", numbers(seq.running_inf)},
                {"lambda_k", lambda_k(a, cfg.k)}};
  return out;
}

ExperimentOutput run_rho(const ExperimentConfig& cfg, const Cocycle& a, const Cocycle& b) {
  ExperimentOutput out;
  const MetricValue m = distance(a, b, cfg.p);
  out.result = {{"p", cfg.p.to_string()}, {"tau", number(m.tau)}, {"rho", m.rho}};
  json chain = json::object();
  for (const auto& p : {LpExponent::finite(1.0), LpExponent::finite(2.0), LpExponent::finite(4.0),
                        LpExponent::infinity()}) {
    chain[p.to_string()] = rho_p(a, b, p);
  }
  out.result["rho_chain"] = chain;
  return out;
}

ExperimentOutput run_certificate(const ExperimentConfig& cfg, const Cocycle& a) {
  ExperimentOutput out;
  out.result["certificate"] = certificate_json(semicontinuity_modulus(a, cfg.k, cfg.epsilon, cfg.p));
  return out;
}

ExperimentOutput run_sweep(const ExperimentConfig& cfg, const Cocycle& a) {
  const auto cert = semicontinuity_modulus(a, cfg.k, cfg.epsilon, cfg.p);
  const auto summary = verify_semicontinuity(a, cert, cfg.trials, sweep_options(cfg));
  ExperimentOutput out;
  out.result = {{"certificate", certificate_json(cert)},
                {"trials", cfg.trials},
                {"max_gap", summary.max_gap},
                {"bound", summary.bound},
                {"violations", summary.violations},
                {"degenerate", summary.degenerate}};
  for (const auto& rep : summary.reports) out.trials.push_back(to_row(rep));
  return out;
}

ExperimentOutput run_collapse(const ExperimentConfig& cfg, const Cocycle& a) {
  ExperimentOutput out;
  json& r = out.result;
  r["budget"] = cfg.budget;
  r["spectrum_a"] = spectrum_json(exact_spectrum_periodic(a));
  try {
    const Cocycle b = collapse_perturbation(a, cfg.budget);
    r["reachable"] = true;
    r["rho_1"] = rho_p(a, b, LpExponent::finite(1.0));
    r["rho_inf"] = rho_p(a, b, LpExponent::infinity());
    r["rho_p"] = rho_p(a, b, cfg.p);
    r["p"] = cfg.p.to_string();
    r["spectrum_b"] = spectrum_json(exact_spectrum_periodic(b));
    r["one_point_spectrum"] = is_one_point_spectrum(b, 1e-10);
    const Atom atom = a.base().apply_inverse(0);
    r["atom"] = atom;
    r["rotation"] = matrix_to_json(b.at(atom) * a.inverse_at(atom));
  } catch (const CollapseUnreachable& e) {
    r["reachable"] = false;
    r["minimal_n"] = e.minimal_n();
    r["reason"] = e.what();
  }
  return out;
}

ExperimentOutput run_profile(const ExperimentConfig& cfg, const Cocycle& a) {
  const auto profile = continuity_profile(a, cfg.k, cfg.p, cfg.radii, cfg.trials, sweep_options(cfg));
  ExperimentOutput out;
  json rows = json::array();
  for (const auto& row : profile.rows) {
    json j = {{"radius", row.radius},
              {"sup_lambda", row.sup_lambda},
              {"inf_lambda", row.inf_lambda},
              {"sup_lambda_d_change", row.sup_lambda_d_change},
              {"collapse_included", row.collapse_included},
              {"trials", row.trials},
              {"degenerate", row.degenerate}};
    if (row.radius < 1.0) {
      const double eps = certified_epsilon(a, cfg.k, row.radius);
      j["certified_epsilon"] = number(eps);
      if (std::isfinite(eps)) {
        j["certified_upper_bound"] =
            semicontinuity_modulus(a, cfg.k, eps).bound();
      }
    }
    rows.push_back(std::move(j));
  }
  out.result = {{"k", profile.k},
                {"p", profile.p.to_string()},
                {"lambda_k", profile.lambda_k},
                {"lambda_d", profile.lambda_d},
                {"rows", rows}};
  for (const auto& rep : profile.reports) out.trials.push_back(to_row(rep));
  return out;
}

ExperimentOutput run_proof_check(const ExperimentConfig& cfg, const Cocycle& a,
                                 const std::optional<Cocycle>& given_b) {
  const auto cert = semicontinuity_modulus(a, cfg.k, cfg.epsilon, LpExponent::finite(1.0));
  ExperimentOutput out;
  out.result["certificate"] = certificate_json(cert);
  const auto check = [&](const Cocycle& b) -> json {
    try {
      return diagnostics_json(proof_internals_check(a, b, cert));
    } catch (const ProofCheckFailure& e) {
      return diagnostics_json(e.diagnostics());
    }
  };
  if (given_b) {
    const json d = check(*given_b);
    out.result["checks"] = json::array({d});
    out.result["failed_checks"] = d["violations"].empty() ? 0 : 1;
    return out;
  }
  const BallSampler sampler(a, LpExponent::finite(1.0), cfg.families);
  std::vector<json> checks(cfg.trials);
  std::vector<TrialRow> rows(cfg.trials);
  detail::parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    Rng rng = make_rng(*cfg.seed, i);
    const BallSample s = sampler.sample_inside(cert.delta, true, i, rng);
    checks[i] = check(s.cocycle);
    rows[i] = {i,
               cert.delta,
               s.metric.rho,
               s.metric.tau,
               cert.lambda_k,
               checks[i]["lambda_k_b"].get<double>(),
               checks[i]["lambda_k_b"].get<double>() - cert.lambda_k,
               to_string(s.family)};
  });
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c["violations"].empty() ? 0 : 1;
  out.result["checks"] = checks;
  out.result["failed_checks"] = failed;
  out.trials = std::move(rows);
  return out;
}

}  // namespace

TrialRow to_row(const PerturbationReport& r) {
  return {r.trial, r.radius, r.metric.rho, r.metric.tau, r.lambda_k_a, r.lambda_k_b, r.gap,
          to_string(r.family)};
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const auto base = build_base(cfg.base);
  const Cocycle a = build_cocycle(cfg.cocycle, base, cfg.seed, 1);
  std::optional<Cocycle> b;
  if (cfg.cocycle_b) b = build_cocycle(*cfg.cocycle_b, base, cfg.seed, 2);

  ExperimentOutput out;
  switch (cfg.kind) {
    case ExperimentKind::spectrum: out = run_spectrum(cfg, a); break;
    case ExperimentKind::lambda_seq: out = run_lambda(cfg, a); break;
    case ExperimentKind::rho: out = run_rho(cfg, a, *b); break;
    case ExperimentKind::certificate: out = run_certificate(cfg, a); break;
    case ExperimentKind::sweep: out = run_sweep(cfg, a); break;
    case ExperimentKind::collapse: out = run_collapse(cfg, a); break;
    case ExperimentKind::profile: out = run_profile(cfg, a); break;
    case ExperimentKind::proof_check: out = run_proof_check(cfg, a, b); break;
  }
  out.result["experiment"] = to_string(cfg.kind);
  out.result["schema_version"] = kSchemaVersion;
  out.result["dimension"] = a.dimension();
  out.result["atoms"] = base->size();
  if (cfg.seed) out.result["seed"] = *cfg.seed;
  return out;
}

std::string trials_csv(const std::vector<TrialRow>& rows) {
  std::string out = "trial,radius,rho,tau,lambda_k_A,lambda_k_B,gap,method\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.trial, r.radius,
                       r.rho, r.tau, r.lambda_k_a, r.lambda_k_b, r.gap, r.method);
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

int run_to_directory(const RunRequest& request, std::ostream& log) {
  namespace fs = std::filesystem;
  const auto started = std::chrono::steady_clock::now();
  fs::create_directories(request.out_dir);

  json manifest = {{"tool", "cocylab"},
                   {"version", COCYLAB_VERSION},
                   {"schema_version", kSchemaVersion},
                   {"experiment", to_string(request.kind)},
                   {"versions",
                    {{"cocylab", COCYLAB_VERSION},
                     {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                           EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                   NLOHMANN_JSON_VERSION_MINOR,
                                                   NLOHMANN_JSON_VERSION_PATCH)}}}};
  std::vector<std::pair<std::string, std::string>> files;
  int status = 0;
  json error;
  try {
    std::ifstream in(request.config_path, std::ios::binary);
    if (!in) throw ConfigError({{"--config", "cannot open '" + request.config_path.string() + "'"}});
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    manifest["config_sha256"] = sha256_hex(text);
    json parsed;
    try {
      parsed = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
      throw ConfigError({{"<file>", std::string("malformed JSON: ") + e.what()}});
    }
    Overrides overrides = request.overrides;
    overrides.kind = request.kind;
    const ExperimentConfig cfg = load_config(parsed, overrides);
    if (cfg.seed) manifest["seed"] = *cfg.seed;

    const ExperimentOutput output = run_experiment(cfg);
    files.emplace_back("result.json", output.result.dump(2) + "\n");
    files.emplace_back("trials.csv", trials_csv(output.trials));
  } catch (const ConfigError& e) {
    status = 2;
    json diags = json::array();
    for (const auto& d : e.diagnostics()) diags.push_back({{"field", d.field}, {"message", d.message}});
    error = {{"kind", "config"}, {"message", "invalid config"}, {"diagnostics", diags}};
  } catch (const DomainError& e) {
    status = 3;
    error = {{"kind", "domain"}, {"message", e.what()}};
  } catch (const NumericalError& e) {
    status = 4;
    error = {{"kind", "numerical"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    status = 1;
    error = {{"kind", "internal"}, {"message", e.what()}};
  }

  for (const char* stale : {"result.json", "trials.csv", "error.json"}) {
    fs::remove(request.out_dir / stale);
  }
  if (status != 0) {
    files.clear();
    files.emplace_back("error.json", json{{"error", error}}.dump(2) + "\n");
    log << json{{"error", error}}.dump() << "\n";
  }
  json listed = json::array();
  for (const auto& [name, contents] : files) {
    write_atomic(request.out_dir / name, contents);
    listed.push_back({{"name", name}, {"sha256", sha256_hex(contents)}, {"bytes", contents.size()}});
  }
  manifest["files"] = listed;
  manifest["status"] = status == 0 ? "ok" : "error";
  manifest["exit_code"] = status;
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_atomic(request.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return status;
}

}  // namespace cocylab::experiment
