#include "cocylab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "cocylab/errors.hpp"

namespace cocylab {

std::string to_string(SpectrumMethod method) {
  switch (method) {
    case SpectrumMethod::exact_periodic:
      return "exact_periodic";
    case SpectrumMethod::qr_estimate:
      return "qr_estimate";
  }
  return "unknown";
}

namespace {

void require_k(const Cocycle& a, int k) {
  if (k < 1 || k > a.dimension()) {
    throw DomainError("k=" + std::to_string(k) + " outside 1.." + std::to_string(a.dimension()));
  }
}

// Sum of the k largest log2-moduli of the monodromy eigenvalues along
// `cycle`. Base 2 keeps power-of-two monodromies exact.
double cycle_top_sum(const Cocycle& a, const std::vector<Atom>& cycle, int k) {
  const int d = a.dimension();
  if (k == 0) return 0.0;
  double log_det = 0.0;
  if (k == d || 2 * k > d) {
    for (Atom x : cycle) log_det += log2_abs_det(a.at(x));
    if (k == d) return log_det;
  }
  if (2 * k <= d) {
    const auto size = static_cast<Eigen::Index>(binomial(static_cast<std::size_t>(d),
                                                         static_cast<std::size_t>(k)));
    ExtendedProduct product = ExtendedProduct::identity(size);
    for (Atom x : cycle) product.left_multiply(exterior_power(a.at(x), k));
    return product.log2_spectral_radius();
  }
  // Bottom (d-k) log-moduli of M are minus the top (d-k) of M^{-1}, with
  // M^{-1} = A(x_0)^{-1} ... A(x_{L-1})^{-1}.
  const int j = d - k;
  const auto size = static_cast<Eigen::Index>(binomial(static_cast<std::size_t>(d),
                                                       static_cast<std::size_t>(j)));
  ExtendedProduct product = ExtendedProduct::identity(size);
  for (auto it = cycle.rbegin(); it != cycle.rend(); ++it) {
    product.left_multiply(exterior_power(a.inverse_at(*it), j));
  }
  return log_det + product.log2_spectral_radius();
}

std::vector<Atom> orbit_cycle(const FiniteBase& base, Atom start) {
  std::vector<Atom> cycle;
  Atom x = start;
  do {
    cycle.push_back(x);
    x = base.apply(x);
  } while (x != start);
  return cycle;
}

LyapunovSpectrum spectrum_from_sums(const std::vector<double>& sums, std::size_t period) {
  const std::size_t d = sums.size() - 1;
  const auto n = static_cast<double>(period);
  LyapunovSpectrum out;
  out.method = SpectrumMethod::exact_periodic;
  out.exponents.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.exponents[i] = (sums[i + 1] - sums[i]) / n * std::numbers::ln2;
  }
  std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
  out.partial_sums.resize(d);
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    acc += out.exponents[i];
    out.partial_sums[i] = acc;
  }
  return out;
}

// Running averages -> exponents, error bounds and optional multiplicity merge.
LyapunovSpectrum finish_qr(const std::vector<double>& log_sums, std::size_t window,
                           const std::vector<std::vector<double>>& running,
                           const QrOptions& options) {
  const std::size_t d = log_sums.size();
  LyapunovSpectrum out;
  out.method = SpectrumMethod::qr_estimate;
  out.exponents.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.exponents[i] = log_sums[i] / static_cast<double>(window);

  std::vector<double> errors(d, std::numeric_limits<double>::infinity());
  if (running.size() >= 2) {
    const std::size_t from = std::min(running.size() - 2, (3 * running.size()) / 4);
    for (std::size_t i = 0; i < d; ++i) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t r = from; r < running.size(); ++r) {
        lo = std::min(lo, running[r][i]);
        hi = std::max(hi, running[r][i]);
      }
      errors[i] = 0.5 * (hi - lo);
    }
  }

  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return out.exponents[l] > out.exponents[r];
  });
  std::vector<double> sorted(d), sorted_errors(d);
  for (std::size_t i = 0; i < d; ++i) {
    sorted[i] = out.exponents[order[i]];
    sorted_errors[i] = errors[order[i]];
  }

  if (options.merge_multiplicities) {
    std::size_t begin = 0;
    while (begin < d) {
      std::size_t end = begin + 1;
      while (end < d && std::isfinite(sorted_errors[end - 1] + sorted_errors[end]) &&
             std::abs(sorted[end - 1] - sorted[end]) <=
                            4.0 * (sorted_errors[end - 1] + sorted_errors[end]) + 1e-12) {
        ++end;
      }
      if (end - begin > 1) {
        double mean = 0.0;
        double err = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          mean += sorted[i];
          err = std::max(err, sorted_errors[i]);
        }
        mean /= static_cast<double>(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
          sorted[i] = mean;
          sorted_errors[i] = err;
        }
      }
      begin = end;
    }
  }

  out.exponents = sorted;
  out.error_bound = 0.0;
  for (double e : sorted_errors) out.error_bound = std::max(out.error_bound, e);
  out.partial_sums.resize(d);
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    acc += out.exponents[i];
    out.partial_sums[i] = acc;
  }
  return out;
}

// One Benettin step: frame <- QR(m * frame), accumulating log |R_ii|.
void qr_step(const Matrix& m, Matrix& frame, std::vector<double>* log_sums) {
  const Matrix image = m * frame;
  Eigen::HouseholderQR<Matrix> qr(image);
  const Matrix& packed = qr.matrixQR();
  frame = qr.householderQ();
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double r = packed(i, i);
    if (r == 0.0 || !std::isfinite(r)) {
      throw NumericalError("qr_spectrum_estimate: rank collapse in the reorthogonalized product");
    }
    if (r < 0.0) frame.col(i) *= -1.0;
    if (log_sums != nullptr) (*log_sums)[static_cast<std::size_t>(i)] += std::log(std::abs(r));
  }
}

template <typename StepFn>
LyapunovSpectrum run_qr(int d, std::size_t n, std::size_t period, const QrOptions& options,
                        StepFn&& matrix_at_step) {
  if (n == 0) throw DomainError("qr_spectrum_estimate: n must be >= 1");
  if (!(options.burn_in_fraction >= 0.0 && options.burn_in_fraction < 1.0)) {
    throw DomainError("qr_spectrum_estimate: burn-in fraction must be in [0, 1)");
  }
  std::size_t burn = static_cast<std::size_t>(options.burn_in_fraction * static_cast<double>(n));
  burn -= burn % period;
  const std::size_t window = n - burn;

  Matrix frame = Matrix::Identity(d, d);
  std::vector<double> log_sums(static_cast<std::size_t>(d), 0.0);
  std::vector<std::vector<double>> running;
  for (std::size_t i = 0; i < n; ++i) {
    const bool measuring = i >= burn;
    qr_step(matrix_at_step(i), frame, measuring ? &log_sums : nullptr);
    if (measuring && (i + 1 - burn) % period == 0) {
      std::vector<double> avg(log_sums);
      for (double& v : avg) v /= static_cast<double>(i + 1 - burn);
      running.push_back(std::move(avg));
    }
  }
  return finish_qr(log_sums, window, running, options);
}

}  // namespace

namespace {

std::vector<double> log2_sums(const Cocycle& a, Atom start) {
  const auto cycle = orbit_cycle(a.base(), start);
  const int d = a.dimension();
  std::vector<double> sums(static_cast<std::size_t>(d) + 1, 0.0);
  for (int k = 1; k <= d; ++k) sums[static_cast<std::size_t>(k)] = cycle_top_sum(a, cycle, k);
  return sums;
}

}  // namespace

std::vector<double> monodromy_log_moduli_sums(const Cocycle& a, Atom start) {
  auto sums = log2_sums(a, start);
  for (auto& s : sums) s *= std::numbers::ln2;
  return sums;
}

LyapunovSpectrum exact_spectrum_periodic(const Cocycle& a, Atom start) {
  if (!a.base().ergodic()) {
    throw DomainError("exact_spectrum_periodic: base is not a single cycle; use cycle_spectra");
  }
  return spectrum_from_sums(log2_sums(a, start), a.base().size());
}

std::vector<LyapunovSpectrum> cycle_spectra(const Cocycle& a) {
  std::vector<LyapunovSpectrum> out;
  for (const auto& cycle : a.base().cycles()) {
    out.push_back(spectrum_from_sums(log2_sums(a, cycle.front()), cycle.size()));
  }
  return out;
}

std::vector<double> pointwise_partial_sum(const Cocycle& a, int k) {
  require_k(a, k);
  const FiniteBase& base = a.base();
  std::vector<double> out(base.size());
  for (const auto& cycle : base.cycles()) {
    const double value =
        cycle_top_sum(a, cycle, k) / static_cast<double>(cycle.size()) * std::numbers::ln2;
    for (Atom x : cycle) out[x] = value;
  }
  return out;
}

LyapunovSpectrum qr_spectrum_estimate(const Cocycle& a, Atom x, std::size_t n,
                                      const QrOptions& options) {
  const FiniteBase& base = a.base();
  const std::size_t period = base.cycles()[base.cycle_index(x)].size();
  Atom y = x;
  return run_qr(a.dimension(), n, period, options, [&](std::size_t) -> const Matrix& {
    const Matrix& m = a.at(y);
    y = base.apply(y);
    return m;
  });
}

LyapunovSpectrum qr_spectrum_estimate(const SymbolicCocycle& a, std::size_t n,
                                      std::uint64_t stream, const QrOptions& options) {
  const SymbolOrbit path = a.base().orbit(0, n, stream);
  return run_qr(a.dimension(), n, 1, options, [&](std::size_t i) -> const Matrix& {
    return a.at(path.point(static_cast<std::int64_t>(i)));
  });
}

ExteriorGrowth::ExteriorGrowth(const Cocycle& a, int k) : cocycle_(&a) {
  require_k(a, k);
  const std::size_t n = a.base().size();
  compounds_.reserve(n);
  for (Atom x = 0; x < n; ++x) compounds_.push_back(exterior_power(a.at(x), k));
  const auto size = compounds_.front().rows();
  products_.assign(n, ScaledMatrix::identity(size));
  positions_.resize(n);
  for (Atom x = 0; x < n; ++x) positions_[x] = x;
  log_norms_.assign(n, 0.0);
}

void ExteriorGrowth::advance() {
  const FiniteBase& base = cocycle_->base();
  for (Atom x = 0; x < products_.size(); ++x) {
    products_[x].left_multiply(compounds_[positions_[x]]);
    positions_[x] = base.apply(positions_[x]);
    log_norms_[x] = products_[x].log_norm();
  }
  ++steps_;
}

LambdaSequence lambda_k_sequence(const Cocycle& a, int k, std::size_t n_max) {
  if (n_max < 1) throw DomainError("lambda_k_sequence: n_max must be >= 1");
  ExteriorGrowth growth(a, k);
  const FiniteBase& base = a.base();
  LambdaSequence out;
  out.k = k;
  std::vector<double> plus(base.size()), minus(base.size());
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= n_max; ++n) {
    growth.advance();
    const auto& logs = growth.log_norms();
    for (Atom x = 0; x < base.size(); ++x) {
      plus[x] = std::max(logs[x], 0.0);
      minus[x] = std::max(-logs[x], 0.0);
    }
    const auto scale = static_cast<double>(n);
    const double value = base.integrate(logs) / scale;
    out.values.push_back(value);
    out.log_plus_values.push_back(base.integrate(plus) / scale);
    out.log_minus_values.push_back(base.integrate(minus) / scale);
    inf = std::min(inf, value);
    out.running_inf.push_back(inf);
  }
  return out;
}

double lambda_k(const Cocycle& a, int k) {
  require_k(a, k);
  const FiniteBase& base = a.base();
  double total = 0.0;
  for (std::size_t c = 0; c < base.cycles().size(); ++c) {
    const auto& cycle = base.cycles()[c];
    total += base.cycle_mass(c) * cycle_top_sum(a, cycle, k) / static_cast<double>(cycle.size()) *
             std::numbers::ln2;
  }
  return total;
}

double lambda_d_logdet(const Cocycle& a) {
  return a.base().integrate([&](Atom x) { return log_abs_det(a.at(x)); });
}

double lambda_tilde_k(const Cocycle& a, int k) { return -lambda_k(inverse_cocycle(a), k); }

bool is_one_point_spectrum(const Cocycle& a, double tol) {
  if (!a.base().ergodic()) {
    throw DomainError("is_one_point_spectrum: base is not ergodic");
  }
  const auto spectrum = exact_spectrum_periodic(a);
  return spectrum.exponents.front() - spectrum.exponents.back() < tol;
}

}  // namespace cocylab
