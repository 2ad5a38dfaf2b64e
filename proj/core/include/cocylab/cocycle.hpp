#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include "cocylab/base_system.hpp"
#include "cocylab/linalg.hpp"

namespace cocylab {

struct IntegrabilityReport {
  double int_log_plus = 0.0;          // integral of log+ |A|
  double int_log_plus_inverse = 0.0;  // integral of log+ |A^-1|
  bool integrable = false;
};

/// A GL(d, R)-valued cocycle over a finite base: one invertible matrix per
/// atom. Inverses are computed once at construction. Immutable.
class Cocycle {
 public:
  Cocycle(std::shared_ptr<const FiniteBase> base, std::vector<Matrix> generators);

  static Cocycle constant(std::shared_ptr<const FiniteBase> base, const Matrix& m);
  static Cocycle identity(std::shared_ptr<const FiniteBase> base, int d);

  int dimension() const { return dimension_; }
  const FiniteBase& base() const { return *base_; }
  const std::shared_ptr<const FiniteBase>& shared_base() const { return base_; }

  const Matrix& at(Atom x) const;
  const Matrix& inverse_at(Atom x) const;
  const std::vector<Matrix>& generators() const { return generators_; }
  const std::vector<Matrix>& inverses() const { return inverses_; }

  /// A^n(x) = A(T^{n-1} x) ... A(T x) A(x); A^0(x) = I.
  /// Throws ProductOverflow when an entry leaves the double range; use
  /// scaled_product for long products.
  Matrix product(Atom x, std::size_t n) const;
  ScaledMatrix scaled_product(Atom x, std::size_t n) const;

 private:
  std::shared_ptr<const FiniteBase> base_;
  std::vector<Matrix> generators_;
  std::vector<Matrix> inverses_;
  int dimension_;
};

/// x -> A(T^{-1} x)^{-1} over T^{-1}. Its n-th product at x is
/// (A^n(T^{-n} x))^{-1}, so its exponents are -lambda_d >= ... >= -lambda_1.
Cocycle inverse_cocycle(const Cocycle& a);

/// x -> A(x)^{-1} over the same T (kept for comparison; its products are not
/// inverses of the products of A in general).
Cocycle pointwise_inverse(const Cocycle& a);

/// Pointwise multiplication by c > 0.
Cocycle scale(const Cocycle& a, double c);

IntegrabilityReport integrability(const Cocycle& a);

/// B(x) = R(x) A(x) for x in `rotations`, B(x) = A(x) elsewhere.
Cocycle perturb_on_set(const Cocycle& a, const std::map<Atom, Matrix>& rotations);

/// Locally constant cocycle over a symbolic shift: A(x) depends on x_0 only.
class SymbolicCocycle {
 public:
  SymbolicCocycle(std::shared_ptr<const SampledBase> base, std::vector<Matrix> by_symbol);

  int dimension() const { return dimension_; }
  const SampledBase& base() const { return *base_; }
  const Matrix& at(const SymbolicPoint& x) const;
  const Matrix& inverse_at(const SymbolicPoint& x) const;
  const std::vector<Matrix>& by_symbol() const { return by_symbol_; }

  Matrix product(const SymbolicPoint& x, std::size_t n) const;

 private:
  std::shared_ptr<const SampledBase> base_;
  std::vector<Matrix> by_symbol_;
  std::vector<Matrix> inverses_;
  int dimension_;
};

// Exact under the stationary law (the cocycle takes finitely many values).
IntegrabilityReport integrability(const SymbolicCocycle& a);

}  // namespace cocylab
