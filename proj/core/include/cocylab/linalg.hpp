#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cocylab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Matrices with |det| below this are rejected as cocycle values.
inline constexpr double kMinAbsDeterminant = 1e-300;

std::size_t binomial(std::size_t n, std::size_t k);

// All k-subsets of {0, ..., d-1} in lexicographic order. Row/column I of a
// compound matrix corresponds to the I-th subset of this list.
std::vector<std::vector<int>> k_subsets(int d, int k);

/// k-th compound (exterior power) of a square matrix. Entry (I, J) is the
/// minor of `m` with rows I and columns J, subsets taken in lexicographic
/// order. The result is binomial(d,k) x binomial(d,k); for k = d it is the
/// 1x1 matrix [det m]. Throws DomainError unless 1 <= k <= d.
Matrix exterior_power(const Matrix& m, int k);

/// Spectral (l2-induced) norm, i.e. the largest singular value.
double operator_norm(const Matrix& m);

/// Singular values in descending order.
Vector singular_values(const Matrix& m);

/// log+ x = max(log x, 0), with log+ 0 = 0. Throws DomainError for x < 0.
double log_plus(double x);
/// log- x = max(-log x, 0). Throws DomainError for x <= 0.
double log_minus(double x);

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, std::string_view what);
// Square, finite and |det| >= kMinAbsDeterminant.
void require_invertible(const Matrix& m, std::string_view what);

double log_abs_det(const Matrix& m);
// Same in base 2; exact when the pivots are powers of two.
double log2_abs_det(const Matrix& m);

// Largest eigenvalue modulus.
double spectral_radius(const Matrix& m);

// Givens rotation by `theta` in the (i, j) coordinate plane of R^d. Quarter
// turns (theta a multiple of pi/2 up to 1e-15) are built with exact 0/+-1
// entries so that long products involving them stay exact.
Matrix plane_rotation(int d, int i, int j, double theta);
Matrix rotation2(double theta);

// Signed cyclic permutation e_j -> e_{j+1}, e_{d-1} -> -(-1)^d e_0 written as
// a product of quarter turns in consecutive coordinate planes (det = +1).
Matrix cyclic_quarter_turns(int d);

/// A matrix stored as mantissa * 2^exponent. Renormalization uses exact
/// powers of two so no rounding is introduced by the scaling itself.
struct ScaledMatrix {
  Matrix mantissa;
  std::int64_t exponent = 0;

  static ScaledMatrix identity(Eigen::Index n);

  // this <- m * this, then renormalize.
  void left_multiply(const Matrix& m);
  void renormalize();

  double log_norm() const;
  double log_spectral_radius() const;
  // Throws ProductOverflow if the value is not representable.
  Matrix value() const;
};

// Long product kept as (extended-precision mantissa) * 2^exponent. The wider
// exponent range of long double keeps strongly non-normal monodromies such as
// [[0, -2^-n], [2^n, 0]] representable for n in the thousands.
struct ExtendedProduct {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

  LMatrix mantissa;
  std::int64_t exponent = 0;

  static ExtendedProduct identity(Eigen::Index n);
  void left_multiply(const Matrix& m);
  // log2 of the spectral radius; the mantissa is balanced by exact powers of
  // two before the eigenvalue solve.
  double log2_spectral_radius() const;
};

}  // namespace cocylab
