#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cocylab/errors.hpp"
#include "cocylab/metrics.hpp"
#include "../support/oracles.hpp"

using namespace cocylab;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

std::shared_ptr<const FiniteBase> cyclic(std::size_t n) {
  return std::make_shared<const FiniteBase>(FiniteBase::cyclic(n));
}

Cocycle random_cocycle(std::shared_ptr<const FiniteBase> base, int d, std::mt19937_64& rng) {
  std::vector<Matrix> gens;
  for (std::size_t i = 0; i < base->size(); ++i) gens.push_back(oracle::well_conditioned(d, rng, 50));
  return Cocycle(std::move(base), gens);
}

}  // namespace

TEST(LpExponent, Parsing) {
  EXPECT_EQ(LpExponent::parse("2"), LpExponent::finite(2));
  EXPECT_TRUE(LpExponent::parse("inf").is_infinite());
  EXPECT_THROW(LpExponent::parse("0.5"), DomainError);
  EXPECT_THROW(LpExponent::finite(0.5), DomainError);
  EXPECT_THROW(LpExponent::parse("abc"), DomainError);
}

TEST(LpNorm, SmallCases) {
  const auto base = FiniteBase::cyclic(2);
  const std::vector<double> v{1, 3};
  EXPECT_DOUBLE_EQ(lp_norm(base, v, LpExponent::finite(1)), 2.0);
  EXPECT_DOUBLE_EQ(lp_norm(base, v, LpExponent::infinity()), 3.0);
  EXPECT_NEAR(lp_norm(base, v, LpExponent::finite(2)), std::sqrt(5.0), 1e-15);
  const std::vector<Matrix> m(2, diag2(2, 0.5));
  for (double p : {1.0, 2.0, 7.0}) EXPECT_DOUBLE_EQ(lp_norm(base, m, LpExponent::finite(p)), 2.0);
  EXPECT_DOUBLE_EQ(lp_norm(base, m, LpExponent::infinity()), 2.0);
}

// |A - B| = |diag(-1, 1/6)| = 1 and |A^-1 - B^-1| = |diag(1/6, -1)| = 1.
TEST(Tau, DiagonalDifference) {
  const auto base = cyclic(3);
  const Cocycle a = Cocycle::constant(base, diag2(2, 0.5));
  const Cocycle b = Cocycle::constant(base, diag2(3, 1.0 / 3));
  for (auto p : {LpExponent::finite(1), LpExponent::finite(3), LpExponent::infinity()}) {
    EXPECT_NEAR(tau_p(a, b, p), 2.0, 1e-15);
    EXPECT_EQ(tau_p(a, a, p), 0.0);
    EXPECT_EQ(rho_p(a, a, p), 0.0);
  }
}

TEST(Rho, FromTau) {
  EXPECT_EQ(rho_from_tau(1.0), 0.5);
  EXPECT_EQ(rho_from_tau(INFINITY), 1.0);
  EXPECT_EQ(rho_from_tau(0.0), 0.0);
}

TEST(Rho, SymmetricAndRejectsMismatch) {
  std::mt19937_64 rng(8);
  const auto base = cyclic(4);
  const Cocycle a = random_cocycle(base, 2, rng), b = random_cocycle(base, 2, rng);
  EXPECT_EQ(rho_p(a, b, LpExponent::finite(2)), rho_p(b, a, LpExponent::finite(2)));
  const Cocycle other = random_cocycle(cyclic(5), 2, rng);
  EXPECT_THROW(rho_p(a, other, LpExponent::finite(1)), DomainError);
  const Cocycle other_dim = random_cocycle(base, 3, rng);
  EXPECT_THROW(rho_p(a, other_dim, LpExponent::finite(1)), DomainError);
}

// rho_1 <= rho_p <= rho_q <= rho_inf for p <= q on a probability space.
TEST(Rho, HolderChainOnRandomPairs) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 6;
    std::vector<double> w(n);
    for (auto& x : w) x = oracle::uniform(rng, 0.1, 1);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    std::vector<Atom> perm(n);
    std::iota(perm.begin(), perm.end(), Atom{0});
    auto base = std::make_shared<const FiniteBase>(w, perm);
    const Cocycle a = random_cocycle(base, 2 + trial % 3, rng);
    const Cocycle b = random_cocycle(base, a.dimension(), rng);
    double previous = 0;
    for (auto p : {LpExponent::finite(1), LpExponent::finite(2), LpExponent::finite(4), LpExponent::infinity()}) {
      const double r = rho_p(a, b, p);
      EXPECT_LE(previous, r * (1 + 1e-14));
      previous = r;
    }
  }
}

TEST(Rho, TriangleInequality) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const auto base = cyclic(1 + trial % 5);
    const Cocycle a = random_cocycle(base, 2, rng), b = random_cocycle(base, 2, rng), c = random_cocycle(base, 2, rng);
    for (auto p : {LpExponent::finite(1), LpExponent::finite(2), LpExponent::infinity()}) {
      EXPECT_LE(rho_p(a, c, p), rho_p(a, b, p) + rho_p(b, c, p) + 1e-12);
    }
  }
}

TEST(Rho, SymbolicMatchesStationaryWeights) {
  const auto base = std::make_shared<const SampledBase>(SampledBase::bernoulli({0.25, 0.75}, 1));
  const SymbolicCocycle a(base, {diag2(2, 0.5), Matrix::Identity(2, 2)});
  const SymbolicCocycle b(base, {diag2(3, 1.0 / 3), Matrix::Identity(2, 2)});
  EXPECT_NEAR(tau_p(a, b, LpExponent::finite(1)), 0.25 * 2.0, 1e-15);
  EXPECT_NEAR(tau_p(a, b, LpExponent::infinity()), 2.0, 1e-15);
}
