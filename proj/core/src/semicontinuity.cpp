#include "cocylab/semicontinuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cocylab/parallel.hpp"

namespace cocylab {

namespace {

// Floating-point allowance for comparing computed quantities with bounds.
constexpr double kRoundingSlack = 1e-12;

bool le(double lhs, double rhs) { return lhs <= rhs + kRoundingSlack * std::max(1.0, std::abs(rhs)); }
bool lt(double lhs, double rhs) { return lhs < rhs + kRoundingSlack * std::max(1.0, std::abs(rhs)); }

std::vector<bool> full_mask(std::size_t n) { return std::vector<bool>(n, true); }

struct PositiveConstruction {
  std::size_t N = 1;
  double gamma = 0.0;
  double K = 0.0;
  double eta = 0.0;
  double delta_prime = 0.0;
  double start_log_minus = 0.0;
  double start_log = 0.0;
  double start_log_plus = 0.0;
  double working_lambda = 0.0;
  bool satisfied = true;
};

// The (K, N, delta') recipe for a cocycle whose lambda_hat_k is non-negative
// on the invariant set `mask`; all integrals run over `mask`.
PositiveConstruction build_positive(const Cocycle& c, int k, double epsilon,
                                    const std::vector<bool>& mask, std::size_t n_max) {
  const FiniteBase& base = c.base();
  PositiveConstruction out;
  out.working_lambda = base.integrate_over(pointwise_partial_sum(c, k), mask);

  ExteriorGrowth growth(c, k);
  std::vector<double> minus(base.size()), plus(base.size());
  double best_violation = std::numeric_limits<double>::infinity();
  PositiveConstruction best;
  for (std::size_t n = 1; n <= n_max; ++n) {
    growth.advance();
    const auto& logs = growth.log_norms();
    for (Atom x = 0; x < base.size(); ++x) {
      minus[x] = std::max(-logs[x], 0.0);
      plus[x] = std::max(logs[x], 0.0);
    }
    const auto scale = static_cast<double>(n);
    const double log_minus = base.integrate_over(minus, mask) / scale;
    const double log_value = base.integrate_over(logs, mask) / scale;
    const double violation =
        std::max(log_minus - epsilon, log_value - (out.working_lambda + epsilon));
    if (violation < best_violation) {
      best_violation = violation;
      best.N = n;
      best.start_log_minus = log_minus;
      best.start_log = log_value;
      best.start_log_plus = base.integrate_over(plus, mask) / scale;
    }
    if (log_minus < epsilon && log_value < out.working_lambda + epsilon) break;
  }
  out.N = best.N;
  out.start_log_minus = best.start_log_minus;
  out.start_log = best.start_log;
  out.start_log_plus = best.start_log_plus;
  out.satisfied = best_violation < 0.0;

  std::vector<double> f(base.size(), 0.0);
  for (Atom x = 0; x < base.size(); ++x) f[x] = log_plus(operator_norm(c.at(x)));
  out.eta = epsilon / static_cast<double>(out.N);
  const auto bound = uniform_integrability_K(base, f, out.eta, mask);
  out.gamma = bound.gamma;
  out.K = bound.K;
  out.delta_prime =
      std::min(out.eta, epsilon * std::exp(-out.K * static_cast<double>(out.N - 1)));
  return out;
}

}  // namespace

UniformIntegrabilityBound uniform_integrability_K(const FiniteBase& base,
                                                  std::span<const double> f, double eta,
                                                  const std::vector<bool>& mask_in) {
  if (!(eta > 0.0)) throw DomainError("uniform_integrability_K: eta must be positive");
  if (f.size() != base.size()) throw DomainError("uniform_integrability_K: wrong number of values");
  const std::vector<bool> mask = mask_in.empty() ? full_mask(base.size()) : mask_in;
  if (mask.size() != base.size()) throw DomainError("uniform_integrability_K: mask size mismatch");

  std::vector<Atom> atoms;
  for (Atom x = 0; x < base.size(); ++x) {
    if (!mask[x]) continue;
    if (!(f[x] >= 0.0) || !std::isfinite(f[x])) {
      throw DomainError("uniform_integrability_K: f must be finite and non-negative");
    }
    atoms.push_back(x);
  }
  const double total = base.integrate_over(f, mask);

  UniformIntegrabilityBound out;
  if (total < eta) {
    out.gamma = 1.0;
  } else {
    std::stable_sort(atoms.begin(), atoms.end(), [&](Atom l, Atom r) { return f[l] > f[r]; });
    const double w0 = base.weight(atoms.front());
    const bool uniform = std::all_of(atoms.begin(), atoms.end(), [&](Atom x) {
      return std::abs(base.weight(x) - w0) <= 1e-15 * w0;
    });
    double mass = 0.0;
    double measure = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const Atom x = atoms[j];
      const double contribution = base.weight(x) * f[x];
      if (mass + contribution >= eta) {
        // Uniform weights: any set of measure < (j+1) w0 has at most j atoms,
        // hence mass at most that of the j heaviest ones, which is < eta.
        out.gamma = uniform ? static_cast<double>(j + 1) * w0 : measure + (eta - mass) / f[x];
        break;
      }
      mass += contribution;
      measure += base.weight(x);
    }
  }
  out.K = (total + eta) / out.gamma;
  return out;
}

std::string to_string(CertificateCase c) {
  return c == CertificateCase::positive ? "positive" : "shifted";
}

SemicontinuityCertificate semicontinuity_modulus(const Cocycle& a, int k, double epsilon,
                                                 LpExponent p, const CertificateOptions& options) {
  if (k < 1 || k > a.dimension()) throw DomainError("semicontinuity_modulus: k out of range");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("semicontinuity_modulus: epsilon must be positive");
  }
  if (options.n_max < 1) throw DomainError("semicontinuity_modulus: n_max must be >= 1");
  if (!integrability(a).integrable) throw DomainError("semicontinuity_modulus: A is not integrable");

  const FiniteBase& base = a.base();
  SemicontinuityCertificate cert;
  cert.k = k;
  cert.epsilon = epsilon;
  cert.p = p;
  cert.lambda_k = lambda_k(a, k);

  const auto hat = pointwise_partial_sum(a, k);
  const bool positive = std::all_of(hat.begin(), hat.end(), [&](double v) {
    return v >= -options.positivity_tolerance;
  });

  if (positive) {
    cert.kind = CertificateCase::positive;
    cert.working_epsilon = epsilon;
    cert.working_set = full_mask(base.size());
    cert.constant = 2.0 + 7.0 * k;
    const auto built = build_positive(a, k, epsilon, cert.working_set, options.n_max);
    cert.N = built.N;
    cert.gamma = built.gamma;
    cert.K = built.K;
    cert.eta = built.eta;
    cert.delta_prime = built.delta_prime;
    cert.start_log_minus = built.start_log_minus;
    cert.start_log = built.start_log;
    cert.start_log_plus = built.start_log_plus;
    cert.working_lambda_k = built.working_lambda;
    cert.start_satisfied = built.satisfied;
  } else {
    cert.kind = CertificateCase::shifted;
    cert.constant = 3.0 + k;
    std::vector<double> compound_log_plus(base.size());
    for (Atom x = 0; x < base.size(); ++x) {
      compound_log_plus[x] = log_plus(operator_norm(exterior_power(a.at(x), k)));
    }
    // Smallest a on the grid 1, 2, 4, ... with int_{L_a} log+|wedge^k A| < eps
    // and int_{L_a} lambda_hat_k > -eps, where L_a = {lambda_hat_k < -a}.
    double shift = 1.0;
    std::vector<bool> low(base.size());
    for (int iter = 0; iter < 1100; ++iter, shift *= 2.0) {
      for (Atom x = 0; x < base.size(); ++x) low[x] = hat[x] < -shift;
      if (base.integrate_over(compound_log_plus, low) < epsilon &&
          base.integrate_over(hat, low) > -epsilon) {
        break;
      }
    }
    cert.shift = shift;
    cert.working_set.resize(base.size());
    for (Atom x = 0; x < base.size(); ++x) cert.working_set[x] = !low[x];
    cert.working_epsilon = epsilon / (2.0 + 7.0 * k);
    const Cocycle shifted = scale(a, std::exp(shift));
    const auto built =
        build_positive(shifted, k, cert.working_epsilon, cert.working_set, options.n_max);
    cert.N = built.N;
    cert.gamma = built.gamma;
    cert.K = built.K;
    cert.eta = built.eta;
    cert.start_log_minus = built.start_log_minus;
    cert.start_log = built.start_log;
    cert.start_log_plus = built.start_log_plus;
    cert.working_lambda_k = built.working_lambda;
    cert.start_satisfied = built.satisfied;
    // tau_1(e^a A, e^a B) on L_a^c is at most e^a tau_1(A, B); also require
    // ||B - A||_1 < epsilon.
    cert.delta_prime = std::min(std::exp(-shift) * built.delta_prime, epsilon);
  }
  cert.delta = cert.delta_prime / (1.0 + cert.delta_prime);
  return cert;
}

VerificationSummary verify_semicontinuity(const Cocycle& a, const SemicontinuityCertificate& cert,
                                          std::size_t trials, const SweepOptions& options) {
  if (!(cert.delta > 0.0)) throw DomainError("verify_semicontinuity: certificate radius is zero");
  const BallSampler sampler(a, cert.p, options.families);
  const bool ergodic = a.base().ergodic();
  const double lambda_d_a = lambda_d_logdet(a);
  std::vector<double> exponents_a;
  if (ergodic) exponents_a = exact_spectrum_periodic(a).exponents;

  VerificationSummary summary;
  summary.bound = cert.constant * cert.epsilon;
  summary.reports.resize(trials);
  detail::parallel_for(trials, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, i);
    const bool boundary =
        (static_cast<double>(rng() >> 11) * 0x1.0p-53) < options.boundary_fraction;
    BallSample sample = boundary ? sampler.sample_near_tau(cert.delta_prime, i, rng)
                                 : sampler.sample_inside(cert.delta, true, i, rng);
    if (!(sample.metric.tau < cert.delta_prime)) {
      // Rounding put the sample on the boundary; fall back to A itself.
      sample = BallSample{a, MetricValue{0.0, 0.0, cert.p}, sample.family, 0.0, true};
    }
    PerturbationReport& r = summary.reports[i];
    r.trial = i;
    r.radius = cert.delta;
    r.metric = sample.metric;
    r.lambda_k_a = cert.lambda_k;
    r.lambda_k_b = lambda_k(sample.cocycle, cert.k);
    r.gap = r.lambda_k_b - r.lambda_k_a;
    r.lambda_d_change = lambda_d_logdet(sample.cocycle) - lambda_d_a;
    r.family = sample.family;
    r.method = SpectrumMethod::exact_periodic;
    r.degenerate = sample.degenerate;
    if (ergodic) {
      r.exponents_a = exponents_a;
      r.exponents_b = exact_spectrum_periodic(sample.cocycle).exponents;
    }
  });
  for (const auto& r : summary.reports) {
    summary.max_gap = std::max(summary.max_gap, r.gap);
    if (!(r.gap < summary.bound)) ++summary.violations;
    if (r.degenerate) ++summary.degenerate;
  }
  if (trials == 0) summary.max_gap = 0.0;
  return summary;
}

ProofDiagnostics proof_internals_check(const Cocycle& a, const Cocycle& b,
                                       const SemicontinuityCertificate& cert) {
  if (cert.kind != CertificateCase::positive) {
    throw DomainError("proof_internals_check: needs a positive-case certificate");
  }
  const FiniteBase& base = a.base();
  const std::size_t n = base.size();
  const std::size_t N = cert.N;
  const int k = cert.k;
  const double eps = cert.working_epsilon;
  const double K = cert.K;
  const double eta = cert.eta;

  ProofDiagnostics out;
  const auto dist = pointwise_distances(a, b);
  out.tau = lp_norm(base, dist.forward, LpExponent::finite(1.0)) +
            lp_norm(base, dist.inverse, LpExponent::finite(1.0));
  if (!(out.tau < cert.delta_prime)) {
    throw DomainError("proof_internals_check: B is outside the certified rho_1 ball");
  }
  out.forward_l1 = base.integrate(dist.forward);

  std::vector<double> f(n), g(n), gap(n);
  for (Atom x = 0; x < n; ++x) {
    f[x] = log_plus(operator_norm(a.at(x)));
    g[x] = log_plus(operator_norm(b.at(x)));
    gap[x] = std::abs(g[x] - f[x]);
  }
  out.log_plus_gap_l1 = base.integrate(gap);

  std::vector<bool> ef_c(n), eg_c(n), union_c(n);
  for (Atom x = 0; x < n; ++x) {
    ef_c[x] = f[x] > K;
    eg_c[x] = g[x] > K;
    union_c[x] = ef_c[x] || eg_c[x];
  }
  out.tail_f = base.integrate_over(f, ef_c);
  out.tail_g = base.integrate_over(g, eg_c);
  out.tail_measure_f = base.measure_of(ef_c);
  out.tail_measure_g = base.measure_of(eg_c);
  out.cutoff_integral_bound = 2.0 * eta;
  out.cutoff_measure_bound = 2.0 * eta / K;

  // x in G iff T^i x lies in E_f n E_g for every i < N.
  std::vector<bool> good(n, true), bad(n, false);
  for (Atom x = 0; x < n; ++x) {
    Atom y = x;
    for (std::size_t i = 0; i < N; ++i) {
      if (union_c[y]) {
        good[x] = false;
        break;
      }
      y = base.apply(y);
    }
    bad[x] = !good[x];
  }
  out.measure_g_complement = base.measure_of(bad);
  out.union_bound = static_cast<double>(N) * base.measure_of(union_c);
  out.measure_bound = 4.0 * eps / K;

  out.shifted_complement_bound = 6.0 * eps;
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<bool> shifted(n, false);
    for (Atom x = 0; x < n; ++x) {
      if (bad[x]) shifted[base.iterate(x, static_cast<std::int64_t>(i))] = true;
    }
    out.shifted_complement_integrals.push_back(base.integrate_over(g, shifted));
  }

  ExteriorGrowth growth(b, k);
  for (std::size_t i = 0; i < N; ++i) growth.advance();
  std::vector<double> log_plus_bn(n);
  for (Atom x = 0; x < n; ++x) log_plus_bn[x] = std::max(growth.log_norms()[x], 0.0);
  out.complement_term = base.integrate_over(log_plus_bn, bad) / static_cast<double>(N);
  out.complement_bound = 6.0 * k * eps;
  out.good_term = base.integrate_over(log_plus_bn, good) / static_cast<double>(N);
  out.good_bound = cert.lambda_k + (2.0 + k) * eps;

  // int_G |B^i - A^i| <= i e^{K(i-1)} delta'.
  std::vector<Matrix> pa(n, Matrix::Identity(a.dimension(), a.dimension()));
  std::vector<Matrix> pb = pa;
  std::vector<Atom> position(n);
  std::iota(position.begin(), position.end(), Atom{0});
  std::vector<double> difference(n, 0.0);
  for (std::size_t i = 1; i <= N; ++i) {
    for (Atom x = 0; x < n; ++x) {
      if (!good[x]) continue;
      pa[x] = a.at(position[x]) * pa[x];
      pb[x] = b.at(position[x]) * pb[x];
      position[x] = base.apply(position[x]);
      difference[x] = operator_norm(pb[x] - pa[x]);
    }
    out.induction_lhs.push_back(base.integrate_over(difference, good));
    out.induction_rhs.push_back(static_cast<double>(i) * std::exp(K * static_cast<double>(i - 1)) *
                                cert.delta_prime);
  }

  out.lambda_k_b = lambda_k(b, k);
  out.final_bound = cert.lambda_k + (2.0 + 7.0 * k) * eps;

  auto& v = out.violations;
  const auto fail = [&](const std::string& what, double lhs, double rhs) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": " << lhs << " vs bound " << rhs;
    v.push_back(msg.str());
  };
  if (!le(out.log_plus_gap_l1, out.forward_l1)) fail("||g-f||_1 <= ||B-A||_1", out.log_plus_gap_l1, out.forward_l1);
  if (!lt(out.log_plus_gap_l1, eta)) fail("||g-f||_1 < eta", out.log_plus_gap_l1, eta);
  if (!lt(out.tail_f, out.cutoff_integral_bound)) fail("int_{E_f^c} f < 2 eta", out.tail_f, out.cutoff_integral_bound);
  if (!lt(out.tail_g, out.cutoff_integral_bound)) fail("int_{E_g^c} g < 2 eta", out.tail_g, out.cutoff_integral_bound);
  if (!lt(out.tail_measure_f, out.cutoff_measure_bound)) fail("mu(E_f^c) < 2 eta / K", out.tail_measure_f, out.cutoff_measure_bound);
  if (!lt(out.tail_measure_g, out.cutoff_measure_bound)) fail("mu(E_g^c) < 2 eta / K", out.tail_measure_g, out.cutoff_measure_bound);
  if (!le(out.measure_g_complement, out.union_bound)) fail("mu(G^c) <= N mu(E_f^c u E_g^c)", out.measure_g_complement, out.union_bound);
  if (!lt(out.union_bound, out.measure_bound)) fail("N mu(E_f^c u E_g^c) < 4 eps / K", out.union_bound, out.measure_bound);
  for (std::size_t i = 0; i < out.shifted_complement_integrals.size(); ++i) {
    if (!lt(out.shifted_complement_integrals[i], out.shifted_complement_bound)) {
      fail("int_{T^" + std::to_string(i) + "(G^c)} g < 6 eps", out.shifted_complement_integrals[i],
           out.shifted_complement_bound);
    }
  }
  if (!le(out.complement_term, out.complement_bound)) fail("(1/N) int_{G^c} log+|wedge^k B^N| <= 6 k eps", out.complement_term, out.complement_bound);
  for (std::size_t i = 0; i < out.induction_lhs.size(); ++i) {
    if (!le(out.induction_lhs[i], out.induction_rhs[i])) {
      fail("int_G |B^" + std::to_string(i + 1) + " - A^" + std::to_string(i + 1) + "|",
           out.induction_lhs[i], out.induction_rhs[i]);
    }
  }
  if (!le(out.good_term, out.good_bound)) fail("(1/N) int_G log+|wedge^k B^N| <= Lambda_k(A) + (2+k) eps", out.good_term, out.good_bound);
  if (!le(out.lambda_k_b, out.final_bound)) fail("Lambda_k(B) <= Lambda_k(A) + (2+7k) eps", out.lambda_k_b, out.final_bound);

  if (!out.ok()) {
    std::string what = "proof_internals_check failed:";
    for (const auto& s : v) what += "\n  " + s;
    throw ProofCheckFailure(what, out);
  }
  return out;
}

Matrix collapse_rotation(const Cocycle& a, Atom start) {
  const FiniteBase& base = a.base();
  const int d = a.dimension();
  const std::size_t period = base.cycles()[base.cycle_index(start)].size();
  const Matrix m = a.scaled_product(start, period).mantissa;

  Matrix u, v;
  const bool diagonal = (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) {
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
      return std::abs(m(l, l)) > std::abs(m(r, r));
    });
    u = Matrix::Zero(d, d);
    v = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      const int i = order[static_cast<std::size_t>(j)];
      u(i, j) = m(i, i) < 0.0 ? -1.0 : 1.0;
      v(i, j) = 1.0;
    }
  } else {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU();
    v = svd.matrixV();
  }
  return v * cyclic_quarter_turns(d) * u.transpose();
}

Cocycle collapse_perturbation(const Cocycle& a, double budget) {
  if (!(budget > 0.0 && budget <= 1.0)) throw DomainError("collapse_perturbation: budget must be in (0, 1]");
  const FiniteBase& base = a.base();
  if (!base.ergodic()) throw DomainError("collapse_perturbation: base must be a single cycle");
  if (is_one_point_spectrum(a, 1e-10)) return a;

  const Atom atom = base.apply_inverse(0);
  const Matrix s = collapse_rotation(a, 0);
  Cocycle b = perturb_on_set(a, {{atom, s}});
  const double rho = rho_p(a, b, LpExponent::finite(1.0));
  if (rho >= budget) {
    // tau_1 = w * c with c the pointwise cost at the changed atom; for a
    // constant cocycle c does not depend on n.
    const double cost = operator_norm(a.at(atom) - b.at(atom)) +
                        operator_norm(a.inverse_at(atom) - b.inverse_at(atom));
    const double tau_budget = budget >= 1.0 ? std::numeric_limits<double>::infinity()
                                            : budget / (1.0 - budget);
    const auto minimal = static_cast<std::size_t>(std::floor(cost / tau_budget)) + 1;
    std::ostringstream msg;
    msg.precision(17);
    msg << "collapse_perturbation: rho_1 = " << rho << " >= budget " << budget << " at n = "
        << base.size() << "; a constant cocycle needs n >= " << minimal;
    throw CollapseUnreachable(msg.str(), minimal);
  }
  return b;
}

ContinuityProfile continuity_profile(const Cocycle& a, int k, LpExponent p,
                                     const std::vector<double>& radii, std::size_t trials,
                                     const SweepOptions& options) {
  if (k < 1 || k > a.dimension()) throw DomainError("continuity_profile: k out of range");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] <= 1.0)) throw DomainError("continuity_profile: radii must be in (0, 1]");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw DomainError("continuity_profile: radii must be descending");
  }
  ContinuityProfile profile;
  profile.k = k;
  profile.p = p;
  profile.lambda_k = lambda_k(a, k);
  profile.lambda_d = lambda_d_logdet(a);

  std::optional<Cocycle> collapsed;
  MetricValue collapse_metric;
  if (a.base().ergodic()) {
    collapsed = collapse_perturbation(a, 1.0);
    collapse_metric = distance(a, *collapsed, p);
  }

  const BallSampler sampler(a, p, options.families);
  for (std::size_t row_index = 0; row_index < radii.size(); ++row_index) {
    const double r = radii[row_index];
    std::vector<PerturbationReport> reports(trials);
    detail::parallel_for(trials, options.threads, [&](std::size_t i) {
      const std::size_t trial = row_index * trials + i;
      Rng rng = make_rng(options.seed, trial);
      const BallSample sample = sampler.sample_inside(r, false, i, rng);
      PerturbationReport& rep = reports[i];
      rep.trial = trial;
      rep.radius = r;
      rep.metric = sample.metric;
      rep.lambda_k_a = profile.lambda_k;
      rep.lambda_k_b = lambda_k(sample.cocycle, k);
      rep.gap = rep.lambda_k_b - rep.lambda_k_a;
      rep.lambda_d_change = lambda_d_logdet(sample.cocycle) - profile.lambda_d;
      rep.family = sample.family;
      rep.degenerate = sample.degenerate;
    });

    ProfileRow row;
    row.radius = r;
    row.trials = trials;
    if (collapsed && collapse_metric.rho <= r) {
      PerturbationReport rep;
      rep.trial = row_index * trials + trials;
      rep.radius = r;
      rep.metric = collapse_metric;
      rep.lambda_k_a = profile.lambda_k;
      rep.lambda_k_b = lambda_k(*collapsed, k);
      rep.gap = rep.lambda_k_b - rep.lambda_k_a;
      rep.lambda_d_change = lambda_d_logdet(*collapsed) - profile.lambda_d;
      rep.family = PerturbationFamily::collapse;
      reports.push_back(rep);
      row.collapse_included = true;
    }
    row.sup_lambda = -std::numeric_limits<double>::infinity();
    row.inf_lambda = std::numeric_limits<double>::infinity();
    for (const auto& rep : reports) {
      row.sup_lambda = std::max(row.sup_lambda, rep.lambda_k_b);
      row.inf_lambda = std::min(row.inf_lambda, rep.lambda_k_b);
      row.sup_lambda_d_change = std::max(row.sup_lambda_d_change, std::abs(rep.lambda_d_change));
      if (rep.degenerate) ++row.degenerate;
    }
    if (reports.empty()) row.sup_lambda = row.inf_lambda = profile.lambda_k;
    profile.rows.push_back(row);
    profile.reports.insert(profile.reports.end(), reports.begin(), reports.end());
  }
  return profile;
}

double certified_epsilon(const Cocycle& a, int k, double radius, const CertificateOptions& options) {
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("certified_epsilon: radius must be in (0, 1)");
  double eps = 1e-6;
  for (int j = 0; j < 140 && eps <= 1e3; ++j, eps *= 1.25) {
    const auto cert = semicontinuity_modulus(a, k, eps, LpExponent::finite(1.0), options);
    if (cert.start_satisfied && cert.delta > radius) return eps;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace cocylab
