#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cocylab/errors.hpp"
#include "cocylab/lyapunov.hpp"
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

// diag(2, 1/2) everywhere, with the last atom of the cycle also rotated by a
// quarter turn: the monodromy at 0 is [[0, -2^-n], [2^n, 0]].
Cocycle rotation_swap(std::size_t n) {
  std::vector<Matrix> gens(n, diag2(2, 0.5));
  gens[n - 1] = rotation2(M_PI / 2) * gens[n - 1];
  return Cocycle(cyclic(n), gens);
}

Cocycle random_periodic(std::size_t n, int d, std::mt19937_64& rng) {
  std::vector<double> scales;
  for (int i = 0; i < d; ++i) scales.push_back(std::exp(oracle::uniform(rng, -1.5, 1.5)));
  return Cocycle(cyclic(n), oracle::near_diagonal(n, scales, oracle::uniform(rng, 0.05, 0.8), rng));
}

}  // namespace

TEST(ExactSpectrum, DiagonalConstant) {
  const auto s = exact_spectrum_periodic(Cocycle::constant(cyclic(5), diag2(2, 0.5)));
  EXPECT_EQ(s.exponents[0], kLog2);
  EXPECT_EQ(s.exponents[1], -kLog2);
  EXPECT_EQ(s.method, SpectrumMethod::exact_periodic);
  const auto id = exact_spectrum_periodic(Cocycle::identity(cyclic(3), 4));
  for (double e : id.exponents) EXPECT_EQ(e, 0.0);
}

TEST(ExactSpectrum, RotationSwapCollapses) {
  const Cocycle a = rotation_swap(10);
  const Matrix m = a.product(0, 10);
  Matrix expected(2, 2);
  expected << 0, -std::ldexp(1.0, -10), std::ldexp(1.0, 10), 0;
  EXPECT_EQ(m, expected);
  const auto s = exact_spectrum_periodic(a);
  EXPECT_NEAR(s.exponents[0], 0.0, 1e-15);
  EXPECT_NEAR(s.exponents[1], 0.0, 1e-15);
}

TEST(ExactSpectrum, LongCyclesStayAccurate) {
  for (std::size_t n : {60u, 500u, 3000u}) {
    const auto s = exact_spectrum_periodic(rotation_swap(n));
    EXPECT_NEAR(s.exponents[0], 0.0, 1e-14) << n;
    EXPECT_NEAR(s.exponents[1], 0.0, 1e-14) << n;
  }
}

TEST(ExactSpectrum, MatchesLongDoubleMonodromyEigenvalues) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + trial % 3;
    const Cocycle a = random_periodic(1 + trial % 12, d, rng);
    const auto reference = oracle::periodic_exponents(a.generators());
    const auto got = exact_spectrum_periodic(a).exponents;
    for (int i = 0; i < d; ++i) EXPECT_NEAR(got[i], reference[i], 1e-9) << trial;
  }
}

TEST(ExactSpectrum, NonErgodicBaseRejected) {
  const auto base = std::make_shared<const FiniteBase>(FiniteBase::disjoint_cycles({2, 3}, {0.5, 0.5}));
  EXPECT_THROW(exact_spectrum_periodic(Cocycle::identity(base, 2)), DomainError);
}

TEST(CycleSpectra, MassWeightedPartialSums) {
  const auto base = std::make_shared<const FiniteBase>(FiniteBase::disjoint_cycles({2, 3}, {0.25, 0.75}));
  std::vector<Matrix> gens{diag2(2, 0.5), diag2(2, 0.5), diag2(3, 1), diag2(3, 1), diag2(3, 1)};
  const Cocycle a(base, gens);
  const auto spectra = cycle_spectra(a);
  ASSERT_EQ(spectra.size(), 2u);
  EXPECT_NEAR(spectra[1].exponents[0], std::log(3.0), 1e-15);
  EXPECT_NEAR(lambda_k(a, 1), 0.25 * kLog2 + 0.75 * std::log(3.0), 1e-15);
  EXPECT_NEAR(lambda_k(a, 2), 0.75 * std::log(3.0), 1e-15);
}

TEST(QrEstimate, TriangularConstant) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 3;
  m(1, 1) = 1;
  const auto s = qr_spectrum_estimate(Cocycle::constant(cyclic(1), m), 0, 100);
  EXPECT_NEAR(s.exponents[0], std::log(3.0), 1e-12);
  EXPECT_NEAR(s.exponents[1], 0.0, 1e-12);
  EXPECT_EQ(s.method, SpectrumMethod::qr_estimate);
}

TEST(QrEstimate, MatchesExactOnPeriodicCocycles) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t period = 1 + trial % 20;
    const Cocycle a = random_periodic(period, 2 + trial % 3, rng);
    const auto exact = exact_spectrum_periodic(a).exponents;
    const auto qr = qr_spectrum_estimate(a, 0, period * 4000).exponents;
    for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(qr[i], exact[i], 1e-8) << trial;
  }
}

TEST(QrEstimate, SymbolicIndependentRunsAgree) {
  const auto base = std::make_shared<const SampledBase>(SampledBase::bernoulli({0.5, 0.5}, 21));
  const SymbolicCocycle a(base, {rotation2(1.0) * diag2(2, 0.5), diag2(2, 0.5)});
  const auto first = qr_spectrum_estimate(a, 200000, 1);
  const auto second = qr_spectrum_estimate(a, 200000, 2);
  ASSERT_TRUE(std::isfinite(first.error_bound));
  EXPECT_GT(first.exponents[0], 0.1);
  EXPECT_LT(std::abs(first.exponents[0] - second.exponents[0]),
            3 * (first.error_bound + second.error_bound) + 1e-3);
  EXPECT_NEAR(first.exponents[0] + first.exponents[1], 0.0, 1e-9);
}

TEST(LambdaSequence, TopPowerIsConstant) {
  std::mt19937_64 rng(13);
  const Cocycle a = random_periodic(4, 3, rng);
  const auto seq = lambda_k_sequence(a, 3, 20);
  for (double v : seq.values) EXPECT_NEAR(v, lambda_d_logdet(a), 1e-12);
}

TEST(LambdaSequence, DiagonalConstantIsLog2) {
  const auto seq = lambda_k_sequence(Cocycle::constant(cyclic(3), diag2(2, 0.5)), 1, 30);
  for (double v : seq.values) EXPECT_NEAR(v, kLog2, 1e-14);
}

TEST(LambdaSequence, RotationSwapDecreasesTowardZero) {
  const auto seq = lambda_k_sequence(rotation_swap(10), 1, 2000);
  EXPECT_NEAR(seq.values.front(), kLog2, 1e-14);
  EXPECT_LT(seq.values.back(), 0.01);
  for (std::size_t i = 1; i < seq.running_inf.size(); ++i) EXPECT_LE(seq.running_inf[i], seq.running_inf[i - 1]);
}

// a_{m+n} <= (m a_m + n a_n) / (m + n): the integrals are subadditive.
TEST(LambdaSequence, Subadditive) {
  std::mt19937_64 rng(14);
  const Cocycle a = random_periodic(5, 3, rng);
  for (int k = 1; k <= 3; ++k) {
    const auto v = lambda_k_sequence(a, k, 40).values;
    for (std::size_t m = 1; m <= 20; ++m)
      for (std::size_t n = 1; n <= 20; ++n) {
        const double lhs = double(m + n) * v[m + n - 1];
        EXPECT_LE(lhs, double(m) * v[m - 1] + double(n) * v[n - 1] + 1e-10);
      }
    EXPECT_GE(v.back() + 1e-12, lambda_k(a, k));
  }
}

TEST(LambdaK, KnownValues) {
  const Cocycle d = Cocycle::constant(cyclic(4), diag2(2, 0.5));
  EXPECT_NEAR(lambda_k(d, 1), kLog2, 1e-15);
  EXPECT_NEAR(lambda_k(d, 2), 0.0, 1e-15);
  const Cocycle r = rotation_swap(10);
  EXPECT_NEAR(lambda_k(r, 1), 0.0, 1e-15);
  EXPECT_NEAR(lambda_k(r, 2), 0.0, 1e-15);
}

TEST(LambdaK, ScalingShiftsByKLogC) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Cocycle a = random_periodic(3 + trial, 3, rng);
    const Cocycle b = scale(a, 2.5);
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(lambda_k(b, k) - lambda_k(a, k), k * std::log(2.5), 1e-10);
  }
}

TEST(LambdaD, EqualsIntegralOfLogDet) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 3;
    const Cocycle a = random_periodic(1 + trial % 9, d, rng);
    double expected = 0;
    for (const auto& g : a.generators()) expected += std::log(std::abs(g.determinant()));
    expected /= static_cast<double>(a.generators().size());
    EXPECT_NEAR(lambda_d_logdet(a), expected, 1e-12);
    EXPECT_NEAR(lambda_k(a, d), expected, 1e-9);
  }
  EXPECT_NEAR(lambda_d_logdet(rotation_swap(7)), 0.0, 1e-15);
}

TEST(LambdaTilde, Identities) {
  EXPECT_NEAR(lambda_tilde_k(Cocycle::constant(cyclic(2), diag2(2, 0.5)), 1), -kLog2, 1e-15);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const Cocycle a = random_periodic(2 + trial % 5, d, rng);
    EXPECT_NEAR(lambda_tilde_k(a, d), lambda_k(a, d), 1e-10);
    for (int k = 1; k < d; ++k) EXPECT_NEAR(lambda_tilde_k(a, k), lambda_k(a, d) - lambda_k(a, d - k), 1e-9);
  }
}

TEST(OnePointSpectrum, Cases) {
  EXPECT_TRUE(is_one_point_spectrum(Cocycle::identity(cyclic(3), 3), 1e-12));
  EXPECT_FALSE(is_one_point_spectrum(Cocycle::constant(cyclic(3), diag2(2, 0.5)), 1e-12));
  EXPECT_TRUE(is_one_point_spectrum(rotation_swap(10), 1e-12));
}

TEST(PointwisePartialSum, IntegratesToLambda) {
  std::mt19937_64 rng(18);
  const Cocycle a = random_periodic(6, 3, rng);
  for (int k = 1; k <= 3; ++k) {
    const auto hat = pointwise_partial_sum(a, k);
    EXPECT_NEAR(a.base().integrate(hat), lambda_k(a, k), 1e-10);
  }
}
