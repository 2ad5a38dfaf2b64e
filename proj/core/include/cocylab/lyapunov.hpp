#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cocylab/cocycle.hpp"

namespace cocylab {

enum class SpectrumMethod { exact_periodic, qr_estimate };

std::string to_string(SpectrumMethod method);

/// Lyapunov exponents with multiplicity, in nats per iteration.
struct LyapunovSpectrum {
  std::vector<double> exponents;     // descending
  std::vector<double> partial_sums;  // [k-1] = lambda_1 + ... + lambda_k
  SpectrumMethod method = SpectrumMethod::exact_periodic;
  double error_bound = 0.0;          // +inf when no estimate is available
};

/// Sums S_0..S_d of the k largest log-moduli of the eigenvalues of the
/// monodromy along the cycle of `start` (not divided by the period).
///
/// S_k is the log spectral radius of the k-th compound of the monodromy.
/// For 2k <= d it is taken from the forward product; otherwise from
/// S_d - S'_{d-k}, with S' from the inverse product, so that only dominant
/// eigenvalues are ever extracted. S_d is the sum of log|det|.
std::vector<double> monodromy_log_moduli_sums(const Cocycle& a, Atom start);

/// Exact spectrum on a base that is a single cycle: exponents are
/// (1/n) log |eigenvalues| of the monodromy A^n(start).
/// Throws DomainError for a non-ergodic base (see cycle_spectra).
LyapunovSpectrum exact_spectrum_periodic(const Cocycle& a, Atom start = 0);

// Exact spectrum of each cycle of the base, in FiniteBase::cycles() order.
std::vector<LyapunovSpectrum> cycle_spectra(const Cocycle& a);

// lambda_1(A,x) + ... + lambda_k(A,x) for every atom x.
std::vector<double> pointwise_partial_sum(const Cocycle& a, int k);

struct QrOptions {
  // Leading fraction of the steps discarded before averaging.
  double burn_in_fraction = 0.25;
  // Replace runs of exponents that agree within their error bounds by their
  // mean (a complex pair never converges individually, only its sum does).
  bool merge_multiplicities = true;
};

/// Reorthogonalized (Benettin) estimate along the orbit of x over n steps.
/// Running averages are sampled at multiples of the orbit period; the error
/// bound is the half-width of their excursion over the last quarter.
LyapunovSpectrum qr_spectrum_estimate(const Cocycle& a, Atom x, std::size_t n,
                                      const QrOptions& options = {});
LyapunovSpectrum qr_spectrum_estimate(const SymbolicCocycle& a, std::size_t n,
                                      std::uint64_t stream = 0, const QrOptions& options = {});

/// Running values of log |wedge^k A^n(x)| at every atom, advanced one step at
/// a time with exact power-of-two rescaling.
class ExteriorGrowth {
 public:
  ExteriorGrowth(const Cocycle& a, int k);

  void advance();
  std::size_t steps() const { return steps_; }
  const std::vector<double>& log_norms() const { return log_norms_; }

 private:
  const Cocycle* cocycle_;
  std::vector<Matrix> compounds_;
  std::vector<ScaledMatrix> products_;
  std::vector<Atom> positions_;
  std::vector<double> log_norms_;
  std::size_t steps_ = 0;
};

/// a_n = (1/n) int log |wedge^k A^n| dmu for n = 1..n_max (index n-1).
struct LambdaSequence {
  int k = 1;
  std::vector<double> values;
  std::vector<double> log_plus_values;   // (1/n) int log+ |wedge^k A^n|
  std::vector<double> log_minus_values;  // (1/n) int log- |wedge^k A^n|
  std::vector<double> running_inf;
};

LambdaSequence lambda_k_sequence(const Cocycle& a, int k, std::size_t n_max);

/// Integral of lambda_1 + ... + lambda_k; exact, cycle by cycle.
double lambda_k(const Cocycle& a, int k);
/// Integral of log |det A|, which equals lambda_k(a, d).
double lambda_d_logdet(const Cocycle& a);
/// Integral of the k smallest exponents, computed as -lambda_k(inverse_cocycle(a), k).
double lambda_tilde_k(const Cocycle& a, int k);

/// lambda_1 - lambda_d < tol. Requires an ergodic base.
bool is_one_point_spectrum(const Cocycle& a, double tol);

}  // namespace cocylab
