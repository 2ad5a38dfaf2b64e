#include "cocylab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cocylab/errors.hpp"

namespace cocylab {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

std::vector<std::vector<int>> k_subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > d) return out;
  out.reserve(binomial(static_cast<std::size_t>(d), static_cast<std::size_t>(k)));
  std::vector<int> current(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

namespace {

double minor_determinant(const Matrix& m, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
  const auto k = rows.size();
  if (k == 1) return m(rows[0], cols[0]);
  if (k == 2) {
    return m(rows[0], cols[0]) * m(rows[1], cols[1]) -
           m(rows[0], cols[1]) * m(rows[1], cols[0]);
  }
  Matrix sub(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return sub.partialPivLu().determinant();
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

Matrix exterior_power(const Matrix& m, int k) {
  require_square(m, "exterior_power");
  const int d = static_cast<int>(m.rows());
  if (k < 1 || k > d) {
    throw DomainError("exterior_power: k=" + std::to_string(k) + " outside 1.." +
                      std::to_string(d));
  }
  if (k == 1) return m;
  if (k == d) {
    Matrix out(1, 1);
    out(0, 0) = m.partialPivLu().determinant();
    return out;
  }
  const auto subsets = k_subsets(d, k);
  const auto n = static_cast<Eigen::Index>(subsets.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = minor_determinant(m, subsets[static_cast<std::size_t>(i)],
                                    subsets[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2 && m.cols() == 2) {
    // sigma_max = (|z1| + |z2|) / 2 with z1 = (a+d, c-b), z2 = (a-d, b+c).
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    return 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Vector singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

double log_plus(double x) {
  if (!(x >= 0.0)) throw DomainError("log_plus: argument must be >= 0");
  return x > 1.0 ? std::log(x) : 0.0;
}

double log_minus(double x) {
  if (!(x > 0.0)) throw DomainError("log_minus: argument must be > 0");
  return x < 1.0 ? -std::log(x) : 0.0;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

void require_invertible(const Matrix& m, std::string_view what) {
  require_square(m, what);
  require_finite(m, what);
  const double det = m.partialPivLu().determinant();
  if (!(std::abs(det) >= kMinAbsDeterminant)) {
    throw DomainError(std::string(what) + ": matrix is singular (|det| < 1e-300)");
  }
}

double log_abs_det(const Matrix& m) {
  require_square(m, "log_abs_det");
  // Sum of log|U_ii| avoids overflow of the determinant itself.
  Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& lu_matrix = lu.matrixLU();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lu_matrix.rows(); ++i) sum += std::log(std::abs(lu_matrix(i, i)));
  return sum;
}

double log2_abs_det(const Matrix& m) {
  require_square(m, "log2_abs_det");
  Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& lu_matrix = lu.matrixLU();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lu_matrix.rows(); ++i) sum += std::log2(std::abs(lu_matrix(i, i)));
  return sum;
}

double spectral_radius(const Matrix& m) {
  require_square(m, "spectral_radius");
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_radius: eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix plane_rotation(int d, int i, int j, double theta) {
  if (i < 0 || j < 0 || i >= d || j >= d || i == j) {
    throw DomainError("plane_rotation: invalid coordinate plane");
  }
  Matrix r = Matrix::Identity(d, d);
  double c = std::cos(theta);
  double s = std::sin(theta);
  const double quarters = theta / (std::numbers::pi / 2.0);
  const double nearest = std::round(quarters);
  if (std::abs(quarters - nearest) < 1e-15 * std::max(1.0, std::abs(quarters))) {
    const auto q = static_cast<long long>(nearest);
    const int phase = static_cast<int>(((q % 4) + 4) % 4);
    constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0};
    constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0};
    c = kCos[phase];
    s = kSin[phase];
  }
  r(i, i) = c;
  r(j, j) = c;
  r(i, j) = -s;
  r(j, i) = s;
  return r;
}

Matrix rotation2(double theta) { return plane_rotation(2, 0, 1, theta); }

Matrix cyclic_quarter_turns(int d) {
  Matrix p = Matrix::Identity(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    p = p * plane_rotation(d, i, i + 1, std::numbers::pi / 2.0);
  }
  return p;
}

ScaledMatrix ScaledMatrix::identity(Eigen::Index n) {
  return ScaledMatrix{Matrix::Identity(n, n), 0};
}

void ScaledMatrix::left_multiply(const Matrix& m) {
  mantissa = m * mantissa;
  renormalize();
}

void ScaledMatrix::renormalize() {
  const double peak = mantissa.cwiseAbs().maxCoeff();
  if (!std::isfinite(peak)) throw ProductOverflow("scaled product: non-finite entry");
  if (peak == 0.0) throw NumericalError("scaled product: collapsed to the zero matrix");
  int e = 0;
  std::frexp(peak, &e);
  if (e != 0) {
    mantissa = mantissa.unaryExpr([e](double v) { return std::ldexp(v, -e); });
    exponent += e;
  }
}

double ScaledMatrix::log_norm() const {
  return std::log(operator_norm(mantissa)) +
         static_cast<double>(exponent) * std::numbers::ln2;
}

double ScaledMatrix::log_spectral_radius() const {
  const double radius = spectral_radius(mantissa);
  if (!(radius > 0.0)) {
    throw NumericalError("scaled product: spectral radius underflow");
  }
  return std::log(radius) + static_cast<double>(exponent) * std::numbers::ln2;
}

Matrix ScaledMatrix::value() const {
  if (exponent > 4096 || exponent < -4096) {
    throw ProductOverflow("scaled product: value outside double range");
  }
  const int e = static_cast<int>(exponent);
  Matrix out = mantissa.unaryExpr([e](double v) { return std::ldexp(v, e); });
  if (!out.allFinite()) throw ProductOverflow("scaled product: value outside double range");
  return out;
}

namespace {

using LMatrix = ExtendedProduct::LMatrix;

// Diagonal similarity by powers of two (Parlett-Reinsch) so that each row
// and column carry comparable mass. Exact: only exponents change.
void balance(LMatrix& m) {
  const Eigen::Index n = m.rows();
  bool done = false;
  for (int sweep = 0; sweep < 10000 && !done; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      long double c = 0, r = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0 || r == 0) continue;
      const long double total = c + r;
      int ec = 0, er = 0;
      std::frexp(c, &ec);
      std::frexp(r, &er);
      // Scaling column i by 2^s and row i by 2^-s moves log2(c/r) by 2s.
      const int s = (er - ec) / 2;
      if (s == 0) continue;
      const long double c2 = std::ldexp(c, s), r2 = std::ldexp(r, -s);
      if (c2 + r2 < 0.95L * total) {
        done = false;
        m.col(i) = m.col(i).unaryExpr([s](long double v) { return std::ldexp(v, s); });
        m.row(i) = m.row(i).unaryExpr([s](long double v) { return std::ldexp(v, -s); });
      }
    }
  }
}

}  // namespace

ExtendedProduct ExtendedProduct::identity(Eigen::Index n) {
  return ExtendedProduct{LMatrix::Identity(n, n), 0};
}

void ExtendedProduct::left_multiply(const Matrix& m) {
  mantissa = m.cast<long double>() * mantissa;
  const long double peak = mantissa.cwiseAbs().maxCoeff();
  if (!std::isfinite(peak)) throw ProductOverflow("extended product: non-finite entry");
  if (peak == 0) throw NumericalError("extended product: collapsed to the zero matrix");
  int e = 0;
  std::frexp(peak, &e);
  if (e != 0) {
    mantissa = mantissa.unaryExpr([e](long double v) { return std::ldexp(v, -e); });
    exponent += e;
  }
}

double ExtendedProduct::log2_spectral_radius() const {
  long double radius = 0;
  if (mantissa.rows() == 1) {
    radius = std::abs(mantissa(0, 0));
  } else {
    LMatrix balanced = mantissa;
    balance(balanced);
    Eigen::EigenSolver<LMatrix> solver(balanced, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("extended product: eigenvalue iteration did not converge");
    }
    radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (!(radius > 0)) throw NumericalError("extended product: spectral radius underflow");
  return static_cast<double>(std::log2(radius)) + static_cast<double>(exponent);
}

}  // namespace cocylab
