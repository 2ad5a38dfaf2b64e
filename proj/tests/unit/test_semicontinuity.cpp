#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "cocylab/errors.hpp"
#include "cocylab/semicontinuity.hpp"
#include "../support/oracles.hpp"

using namespace cocylab;

namespace {

const double kLog2 = std::log(2.0);

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

std::shared_ptr<const FiniteBase> cyclic(std::size_t n) {
  return std::make_shared<const FiniteBase>(FiniteBase::cyclic(n));
}

// Smallest measure of a set carrying integral >= eta, by enumerating subsets.
double brute_force_gamma(const std::vector<double>& w, const std::vector<double>& f, double eta) {
  const std::size_t n = w.size();
  double best = INFINITY;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double mass = 0, measure = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        mass += w[i] * f[i];
        measure += w[i];
      }
    if (mass >= eta) best = std::min(best, measure);
  }
  return best;
}

}  // namespace

TEST(UniformIntegrability, ZeroFunction) {
  const auto base = FiniteBase::cyclic(4);
  const std::vector<double> f(4, 0.0);
  const auto b = uniform_integrability_K(base, f, 0.5);
  EXPECT_EQ(b.gamma, 1.0);
  EXPECT_EQ(b.K, 0.5);
}

TEST(UniformIntegrability, HeavyAtom) {
  const auto base = FiniteBase::cyclic(3);
  const std::vector<double> f{10, 0, 0};
  const auto b = uniform_integrability_K(base, f, 1.0);
  EXPECT_DOUBLE_EQ(b.gamma, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.K, 13.0);
  EXPECT_EQ(base.tail_mass(f, b.K).integral, 0.0);
}

TEST(UniformIntegrability, GammaMatchesSubsetEnumeration) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto base = FiniteBase::cyclic(n);
    std::vector<double> f(n);
    for (auto& v : f) v = oracle::uniform(rng, 0, 4) * (oracle::uniform(rng, 0, 1) < 0.3 ? 0 : 1);
    const double total = base.integrate(f);
    const double eta = oracle::uniform(rng, 0.05, 1.0) * std::max(total, 0.1);
    const auto b = uniform_integrability_K(base, f, eta);
    const double expected = brute_force_gamma(base.weights(), f, eta);
    if (std::isinf(expected)) {
      EXPECT_EQ(b.gamma, 1.0);
    } else {
      EXPECT_NEAR(b.gamma, expected, 1e-14);
    }
  }
}

TEST(UniformIntegrability, KnapsackGammaIsAdmissibleForUnequalWeights) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 9;
    std::vector<double> w(n);
    for (auto& v : w) v = oracle::uniform(rng, 0.1, 1);
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= sum;
    std::vector<Atom> perm(n);
    std::iota(perm.begin(), perm.end(), Atom{0});
    const FiniteBase base(w, perm);
    std::vector<double> f(n);
    for (auto& v : f) v = oracle::uniform(rng, 0, 4);
    const double eta = oracle::uniform(rng, 0.05, 0.9) * base.integrate(f);
    const auto b = uniform_integrability_K(base, f, eta);
    EXPECT_LE(b.gamma, brute_force_gamma(w, f, eta) + 1e-14);
    EXPECT_GT(b.gamma, 0.0);
  }
}

// Every h >= 0 with ||h - f||_1 < eta has small mass above K.
TEST(UniformIntegrability, GuaranteeOnPerturbedFunctions) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto base = FiniteBase::cyclic(n);
    std::vector<double> f(n);
    for (auto& v : f) v = oracle::uniform(rng, 0, 5);
    const double eta = oracle::uniform(rng, 0.01, 1.0);
    const auto b = uniform_integrability_K(base, f, eta);
    for (int j = 0; j < 200; ++j) {
      std::vector<double> h = f;
      // Spend almost the whole L1 budget on a few atoms.
      double budget = eta * oracle::uniform(rng, 0.5, 0.999999);
      while (budget > 1e-15) {
        const auto x = static_cast<std::size_t>(oracle::uniform(rng, 0, double(n))) % n;
        const double spend = budget * oracle::uniform(rng, 0.3, 1.0);
        h[x] += spend / base.weight(x);
        budget -= spend;
      }
      const auto tail = base.tail_mass(h, b.K);
      EXPECT_LT(tail.integral, 2 * eta);
      EXPECT_LT(tail.measure, 2 * eta / b.K);
    }
  }
}

TEST(Certificate, IdentityCocycle) {
  const auto cert = semicontinuity_modulus(Cocycle::identity(cyclic(5), 3), 2, 0.1);
  EXPECT_EQ(cert.kind, CertificateCase::positive);
  EXPECT_EQ(cert.N, 1u);
  EXPECT_TRUE(std::isfinite(cert.K));
  EXPECT_GT(cert.delta, 0.0);
  EXPECT_TRUE(cert.start_satisfied);
}

// Recomputes every field of the diag(2, 1/2) certificate by hand.
TEST(Certificate, DiagonalReplay) {
  for (std::size_t n : {1u, 7u, 50u}) {
    const double eps = 0.1;
    const auto cert = semicontinuity_modulus(Cocycle::constant(cyclic(n), diag2(2, 0.5)), 1, eps);
    // n = 1 already meets both start conditions: log- = 0 and log = log 2 = Lambda_1.
    const std::size_t N = 1;
    const double eta = eps / N;
    const double count = std::ceil(eta * double(n) / kLog2);
    const double gamma = kLog2 >= eta ? count / double(n) : 1.0;
    const double K = (kLog2 + eta) / gamma;
    const double delta_prime = std::min(eta, eps * std::exp(-K * double(N - 1)));
    EXPECT_EQ(cert.kind, CertificateCase::positive);
    EXPECT_EQ(cert.N, N);
    EXPECT_DOUBLE_EQ(cert.eta, eta);
    EXPECT_DOUBLE_EQ(cert.gamma, gamma);
    EXPECT_DOUBLE_EQ(cert.K, K);
    EXPECT_DOUBLE_EQ(cert.delta_prime, delta_prime);
    EXPECT_DOUBLE_EQ(cert.delta, delta_prime / (1 + delta_prime));
    EXPECT_EQ(cert.constant, 9.0);
    EXPECT_DOUBLE_EQ(cert.bound(), kLog2 + 0.9);
  }
}

TEST(Certificate, ScaleCovariance) {
  std::mt19937_64 rng(34);
  const Cocycle a(cyclic(4), oracle::near_diagonal(4, {3.0, 1.5, 1.2}, 0.05, rng));
  const double c = 1.7;
  const Cocycle b = scale(a, c);
  for (int k = 1; k <= 2; ++k) {
    const auto cert = semicontinuity_modulus(b, k, 0.2);
    ASSERT_EQ(cert.kind, CertificateCase::positive);
    std::vector<double> f(4);
    for (Atom x = 0; x < 4; ++x) f[x] = std::max(0.0, std::log(oracle::power_norm(c * a.at(x))));
    const auto expected = uniform_integrability_K(b.base(), f, cert.eta);
    EXPECT_NEAR(cert.K, expected.K, 1e-10 * expected.K);
    EXPECT_NEAR(cert.lambda_k, lambda_k(a, k) + k * std::log(c), 1e-10);
  }
}

TEST(Certificate, ShiftedCase) {
  const Cocycle a = Cocycle::constant(cyclic(6), diag2(0.5, 0.25));
  const auto cert = semicontinuity_modulus(a, 1, 0.2);
  EXPECT_EQ(cert.kind, CertificateCase::shifted);
  EXPECT_EQ(cert.shift, 1.0);
  EXPECT_EQ(cert.constant, 4.0);
  EXPECT_DOUBLE_EQ(cert.working_epsilon, 0.2 / 9.0);
  EXPECT_GT(cert.delta, 0.0);
  EXPECT_LE(cert.delta_prime, 0.2);
  SweepOptions options;
  options.seed = 5;
  const auto summary = verify_semicontinuity(a, cert, 300, options);
  EXPECT_EQ(summary.violations, 0u);
}

TEST(Certificate, RejectsBadArguments) {
  const Cocycle a = Cocycle::identity(cyclic(3), 2);
  EXPECT_THROW(semicontinuity_modulus(a, 3, 0.1), DomainError);
  EXPECT_THROW(semicontinuity_modulus(a, 1, 0.0), DomainError);
}

TEST(Verify, DiagonalRotationSweep) {
  const Cocycle a = Cocycle::constant(cyclic(50), diag2(2, 0.5));
  const auto cert = semicontinuity_modulus(a, 1, 0.05);
  SweepOptions options;
  options.families = {PerturbationFamily::rotation};
  options.seed = 6;
  const auto summary = verify_semicontinuity(a, cert, 1000, options);
  EXPECT_EQ(summary.violations, 0u);
  EXPECT_LT(summary.max_gap, cert.constant * cert.epsilon);
  for (const auto& r : summary.reports) {
    EXPECT_LT(r.metric.tau, cert.delta_prime);
    EXPECT_NEAR(r.lambda_k_b, lambda_k(a, 1) + r.gap, 1e-12);
  }
}

TEST(Verify, CollapseDropsInsideTheBall) {
  const Cocycle a = Cocycle::constant(cyclic(400), diag2(2, 0.5));
  const auto cert = semicontinuity_modulus(a, 1, 0.05);
  SweepOptions options;
  options.families = {PerturbationFamily::collapse};
  options.boundary_fraction = 0;
  options.seed = 7;
  const auto summary = verify_semicontinuity(a, cert, 60, options);
  EXPECT_EQ(summary.violations, 0u);
  double lowest = INFINITY;
  for (const auto& r : summary.reports) {
    EXPECT_LE(r.gap, 1e-12);
    lowest = std::min(lowest, r.lambda_k_b);
  }
  EXPECT_LT(lowest, 1e-9);
}

TEST(Verify, IsDeterministic) {
  std::mt19937_64 rng(35);
  const Cocycle a(cyclic(4), oracle::near_diagonal(4, {2.0, 1.0, 0.5}, 0.05, rng));
  const auto cert = semicontinuity_modulus(a, 1, 0.2);
  SweepOptions one;
  one.seed = 9;
  one.threads = 1;
  SweepOptions many = one;
  many.threads = 4;
  const auto x = verify_semicontinuity(a, cert, 40, one);
  const auto y = verify_semicontinuity(a, cert, 40, many);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(x.reports[i].lambda_k_b, y.reports[i].lambda_k_b);
    EXPECT_EQ(x.reports[i].metric.tau, y.reports[i].metric.tau);
  }
}

TEST(ProofCheck, HoldsOnSampledPerturbations) {
  std::mt19937_64 rng(36);
  const Cocycle a(cyclic(5), oracle::near_diagonal(5, {2.0, 1.0, 0.6}, 0.05, rng));
  for (int k = 1; k <= 2; ++k) {
    const auto cert = semicontinuity_modulus(a, k, 0.2);
    ASSERT_EQ(cert.kind, CertificateCase::positive);
    const BallSampler sampler(a, LpExponent::finite(1), all_families());
    for (std::size_t t = 0; t < 100; ++t) {
      Rng r = make_rng(3, t);
      const auto s = sampler.sample_inside(cert.delta, true, t, r);
      const auto d = proof_internals_check(a, s.cocycle, cert);
      EXPECT_TRUE(d.ok());
      EXPECT_EQ(d.induction_lhs.size(), cert.N);
    }
  }
}

TEST(ProofCheck, DetectsABrokenCertificate) {
  const Cocycle a = Cocycle::constant(cyclic(20), diag2(2, 0.5));
  auto cert = semicontinuity_modulus(a, 1, 0.1);
  std::vector<Matrix> gens(20, diag2(2, 0.5));
  gens[0] = diag2(2.0 + 0.5, 1 / 2.5);
  const Cocycle b(a.shared_base(), gens);
  ASSERT_LT(tau_p(a, b, LpExponent::finite(1)), cert.delta_prime);
  EXPECT_NO_THROW(proof_internals_check(a, b, cert));
  cert.K = 0.01;  // far too small a cutoff
  EXPECT_THROW(proof_internals_check(a, b, cert), ProofCheckFailure);
}

TEST(ProofCheck, RejectsPointsOutsideTheBall) {
  const Cocycle a = Cocycle::constant(cyclic(4), diag2(2, 0.5));
  const auto cert = semicontinuity_modulus(a, 1, 0.05);
  const Cocycle b = Cocycle::constant(a.shared_base(), diag2(3, 1.0 / 3));
  EXPECT_THROW(proof_internals_check(a, b, cert), DomainError);
}

TEST(Collapse, ExplicitMonodromyForN10) {
  const Cocycle a = Cocycle::constant(cyclic(10), diag2(2, 0.5));
  const Cocycle b = collapse_perturbation(a, 1.0);
  Matrix expected(2, 2);
  expected << 0, -std::ldexp(1.0, -10), std::ldexp(1.0, 10), 0;
  EXPECT_EQ(b.product(0, 10), expected);
  const auto s = exact_spectrum_periodic(b).exponents;
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 0.0);
}

TEST(Collapse, SupNormCostDoesNotShrink) {
  double previous_rho1 = 1;
  for (std::size_t n : {10u, 100u, 1000u}) {
    const Cocycle a = Cocycle::constant(cyclic(n), diag2(2, 0.5));
    const Cocycle b = collapse_perturbation(a, 1.0);
    const double rho1 = rho_p(a, b, LpExponent::finite(1));
    const double rho_inf = rho_p(a, b, LpExponent::infinity());
    EXPECT_LT(rho1, previous_rho1);
    EXPECT_GT(rho_inf, 0.8);
    previous_rho1 = rho1;
  }
}

TEST(Collapse, IdentityNeedsNothing) {
  const Cocycle a = Cocycle::identity(cyclic(5), 3);
  const Cocycle b = collapse_perturbation(a, 0.01);
  EXPECT_EQ(rho_p(a, b, LpExponent::finite(1)), 0.0);
}

TEST(Collapse, RandomCocyclesReachOnePointSpectrum) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const std::size_t n = 3 + static_cast<std::size_t>(trial);
    std::vector<Matrix> gens;
    for (std::size_t i = 0; i < n; ++i) gens.push_back(oracle::well_conditioned(d, rng, 20));
    const Cocycle a(cyclic(n), gens);
    const Cocycle b = collapse_perturbation(a, 1.0);
    const auto s = oracle::periodic_exponents(b.generators());
    for (double v : s) EXPECT_NEAR(v, s.front(), 1e-8) << trial;
  }
}

TEST(Collapse, ReportsMinimalCycleLength) {
  const Cocycle a = Cocycle::constant(cyclic(20), diag2(2, 0.5));
  try {
    collapse_perturbation(a, 0.03);
    FAIL() << "expected CollapseUnreachable";
  } catch (const CollapseUnreachable& e) {
    const std::size_t n = e.minimal_n();
    EXPECT_GT(n, 20u);
    const Cocycle big = Cocycle::constant(cyclic(n), diag2(2, 0.5));
    EXPECT_LT(rho_p(big, collapse_perturbation(big, 0.03), LpExponent::finite(1)), 0.03);
    const Cocycle smaller = Cocycle::constant(cyclic(n - 1), diag2(2, 0.5));
    EXPECT_THROW(collapse_perturbation(smaller, 0.03), CollapseUnreachable);
  }
}

TEST(Profile, IdentityIsFlat) {
  const Cocycle a = Cocycle::identity(cyclic(200), 2);
  SweepOptions options;
  options.seed = 3;
  const auto p = continuity_profile(a, 1, LpExponent::finite(1), {0.1, 0.01}, 100, options);
  for (const auto& row : p.rows) {
    EXPECT_LT(std::abs(row.sup_lambda), 0.05);
    EXPECT_LT(std::abs(row.inf_lambda), 0.05);
  }
}

TEST(Profile, DiagonalDropsToZero) {
  const Cocycle a = Cocycle::constant(cyclic(300), diag2(2, 0.5));
  SweepOptions options;
  options.seed = 4;
  const auto p = continuity_profile(a, 1, LpExponent::finite(1), {0.5, 0.1, 0.03}, 60, options);
  for (const auto& row : p.rows) {
    EXPECT_TRUE(row.collapse_included);
    EXPECT_LT(row.inf_lambda, 1e-9);
    EXPECT_GE(row.sup_lambda, kLog2 - 0.1);
  }
}

TEST(CertifiedEpsilon, ShrinksWithTheRadius) {
  const Cocycle a = Cocycle::constant(cyclic(30), diag2(2, 0.5));
  const double big = certified_epsilon(a, 1, 0.1);
  const double small = certified_epsilon(a, 1, 0.01);
  EXPECT_LT(small, big);
  // With N = 1 and delta' = epsilon the modulus is epsilon ~ r / (1 - r).
  EXPECT_NEAR(small, 0.01 / 0.99, 0.25 * 0.01);
  const auto cert = semicontinuity_modulus(a, 1, small);
  EXPECT_GT(cert.delta, 0.01);
}
