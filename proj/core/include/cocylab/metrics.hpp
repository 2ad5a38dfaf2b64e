#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "cocylab/cocycle.hpp"

namespace cocylab {

/// Exponent p in [1, inf] of an L^p norm. Infinity is a distinguished tag.
class LpExponent {
 public:
  static LpExponent finite(double p);
  static LpExponent infinity() { return LpExponent(std::numeric_limits<double>::infinity()); }
  // Accepts a decimal number >= 1 or the literal "inf".
  static LpExponent parse(const std::string& text);

  bool is_infinite() const { return std::isinf(value_); }
  double value() const { return value_; }
  std::string to_string() const;

  friend bool operator==(LpExponent a, LpExponent b) { return a.value_ == b.value_; }

 private:
  explicit LpExponent(double p) : value_(p) {}
  double value_;
};

struct MetricValue {
  double tau = 0.0;  // may be +inf
  double rho = 0.0;  // in [0, 1]
  LpExponent p = LpExponent::finite(1.0);
};

/// Weighted p-mean of pointwise values (ess-sup for p = inf). Values must be
/// non-negative; a non-finite value yields +inf.
double lp_norm(const FiniteBase& base, std::span<const double> pointwise, LpExponent p);
/// ||A||_p with the spectral norm at each atom.
double lp_norm(const FiniteBase& base, std::span<const Matrix> a, LpExponent p);

// t / (1 + t), with rho = 1 exactly when t = +inf.
double rho_from_tau(double tau);

/// tau_p(A,B) = ||A - B||_p + ||A^-1 - B^-1||_p. Cocycles must share the base
/// (structurally) and the dimension.
double tau_p(const Cocycle& a, const Cocycle& b, LpExponent p);
double rho_p(const Cocycle& a, const Cocycle& b, LpExponent p);
MetricValue distance(const Cocycle& a, const Cocycle& b, LpExponent p);

// Pointwise |A(x) - B(x)| and |A^-1(x) - B^-1(x)|; atoms where the matrices
// coincide are skipped (exact zero).
struct PointwiseDistances {
  std::vector<double> forward;
  std::vector<double> inverse;
};
PointwiseDistances pointwise_distances(const Cocycle& a, const Cocycle& b);

// Same metrics for locally constant cocycles over one symbolic base, exact
// under the stationary law.
double tau_p(const SymbolicCocycle& a, const SymbolicCocycle& b, LpExponent p);
double rho_p(const SymbolicCocycle& a, const SymbolicCocycle& b, LpExponent p);

}  // namespace cocylab
