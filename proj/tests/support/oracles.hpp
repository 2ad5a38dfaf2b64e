#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix random_matrix(int d, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = uniform(rng, lo, hi);
  return m;
}

// Random matrix with condition number below `max_condition`.
inline Matrix well_conditioned(int d, std::mt19937_64& rng, double max_condition = 1e6) {
  for (;;) {
    Matrix m = random_matrix(d, rng);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto s = svd.singularValues();
    if (s(d - 1) > 0 && s(0) / s(d - 1) < max_condition) return m;
  }
}

// Leibniz-free cofactor expansion; fine for the tiny sizes used here.
inline long double det_laplace(const LMatrix& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  long double sum = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    LMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index c2 = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, c2++) = m(r, c);
      }
    }
    sum += ((j % 2 == 0) ? 1.0L : -1.0L) * m(0, j) * det_laplace(minor);
  }
  return sum;
}

inline std::vector<std::vector<int>> subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> mask(static_cast<std::size_t>(d), 0);
  std::fill(mask.begin(), mask.begin() + k, 1);
  // prev_permutation over a sorted-descending mask yields lexicographic subsets.
  do {
    std::vector<int> s;
    for (int i = 0; i < d; ++i)
      if (mask[static_cast<std::size_t>(i)]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

inline Matrix compound(const Matrix& m, int k) {
  const int d = static_cast<int>(m.rows());
  const auto sets = subsets(d, k);
  const auto c = static_cast<Eigen::Index>(sets.size());
  Matrix out(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      LMatrix sub(k, k);
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
          sub(r, s) = m(sets[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)],
                        sets[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)]);
      out(i, j) = static_cast<double>(det_laplace(sub));
    }
  }
  return out;
}

// Largest singular value by power iteration on M^T M.
inline double power_norm(const Matrix& m, int iterations = 2000) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.cols());
  v(0) += 0.318;
  double lambda = 0;
  for (int i = 0; i < iterations; ++i) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double n = w.norm();
    if (n == 0) return 0;
    lambda = n / v.norm();
    v = w / n;
  }
  return std::sqrt(lambda);
}

// Moduli of the eigenvalues of A(x_{n-1}) ... A(x_0), in long double, sorted
// descending and returned as logs.
inline std::vector<long double> log_moduli_of_product(const std::vector<Matrix>& factors) {
  const auto d = factors.front().rows();
  LMatrix p = LMatrix::Identity(d, d);
  long double log_scale = 0;
  for (const auto& f : factors) {
    p = f.cast<long double>() * p;
    const long double s = p.cwiseAbs().maxCoeff();
    p /= s;
    log_scale += std::log(s);
  }
  Eigen::EigenSolver<LMatrix> es(p, false);
  std::vector<long double> out;
  for (Eigen::Index i = 0; i < d; ++i) out.push_back(std::log(std::abs(es.eigenvalues()(i))) + log_scale);
  std::sort(out.rbegin(), out.rend());
  return out;
}

// Exponents of a cocycle on a single n-cycle x -> x+1, from the monodromy at
// 0. The upper half comes from the forward product and the lower half from
// the inverse product, where each is the dominant (accurate) part.
inline std::vector<double> periodic_exponents(const std::vector<Matrix>& gens) {
  const auto forward = log_moduli_of_product(gens);
  std::vector<Matrix> inverses;
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) inverses.push_back(it->inverse());
  const auto backward = log_moduli_of_product(inverses);
  const std::size_t d = forward.size();
  const auto n = static_cast<long double>(gens.size());
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const long double v = (2 * i < d) ? forward[i] : -backward[d - 1 - i];
    out[i] = static_cast<double>(v / n);
  }
  return out;
}

// Near-diagonal generators diag(scales) (I + spread G).
inline std::vector<Matrix> near_diagonal(std::size_t n, const std::vector<double>& scales,
                                         double spread, std::mt19937_64& rng) {
  const int d = static_cast<int>(scales.size());
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix g = random_matrix(d, rng);
    Matrix diag = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) diag(j, j) = scales[static_cast<std::size_t>(j)];
    out.push_back(diag * (Matrix::Identity(d, d) + spread * g));
  }
  return out;
}

}  // namespace oracle
