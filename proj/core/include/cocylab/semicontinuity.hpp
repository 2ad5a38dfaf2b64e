#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cocylab/cocycle.hpp"
#include "cocylab/errors.hpp"
#include "cocylab/lyapunov.hpp"
#include "cocylab/metrics.hpp"
#include "cocylab/sampler.hpp"

namespace cocylab {

// --- uniform integrability cutoff -------------------------------------------

struct UniformIntegrabilityBound {
  double gamma = 0.0;  // mu(Z) < gamma  =>  int_Z f < eta
  double K = 0.0;      // (int f + eta) / gamma
};

/// Cutoff K such that every h >= 0 with ||h - f||_1 < eta has
/// int_{h > K} h < 2 eta and mu{h > K} < 2 eta / K.
///
/// gamma is the exact largest admissible value when the atoms in `mask` all
/// carry the same weight (the smallest measure of a set carrying mass
/// >= eta), and the fractional-knapsack lower bound otherwise. When the total
/// mass is below eta every gamma works and gamma = 1 is returned.
/// Integrals run over the atoms in `mask` (all atoms when empty).
UniformIntegrabilityBound uniform_integrability_K(const FiniteBase& base,
                                                  std::span<const double> f, double eta,
                                                  const std::vector<bool>& mask = {});

// --- semicontinuity certificate ---------------------------------------------

enum class CertificateCase {
  positive,  // lambda_hat_k >= 0 almost everywhere
  shifted,   // general case, reduced through L_a and e^a A
};

std::string to_string(CertificateCase c);

/// Constructive modulus of upper semicontinuity of Lambda_k at A:
/// rho_1(A, B) < delta  =>  Lambda_k(B) < Lambda_k(A) + constant * epsilon.
/// Because rho_1 <= rho_p, the same delta works for every rho_p ball.
struct SemicontinuityCertificate {
  int k = 1;
  double epsilon = 0.0;
  LpExponent p = LpExponent::finite(1.0);
  CertificateCase kind = CertificateCase::positive;

  double shift = 0.0;            // a; 0 in the positive case
  double working_epsilon = 0.0;  // epsilon fed to the positive-case construction
  std::vector<bool> working_set; // L_a^c (all atoms in the positive case)

  std::size_t N = 1;
  double gamma = 0.0;
  double K = 0.0;
  double eta = 0.0;
  double delta_prime = 0.0;
  double delta = 0.0;
  double constant = 0.0;  // 2 + 7k (positive) or 3 + k (shifted)

  double lambda_k = 0.0;  // Lambda_k(A)
  // Start conditions at N on the working set, for the (shifted) cocycle.
  double start_log_minus = 0.0;  // (1/N) int log- |wedge^k A^N|
  double start_log = 0.0;        // (1/N) int log  |wedge^k A^N|
  double start_log_plus = 0.0;   // (1/N) int log+ |wedge^k A^N|
  double working_lambda_k = 0.0; // int over the working set of lambda_hat_k of the shifted cocycle
  bool start_satisfied = true;   // false when the scan hit n_max

  double bound() const { return lambda_k + constant * epsilon; }
};

struct CertificateOptions {
  std::size_t n_max = 10000;
  // lambda_hat_k >= -tolerance counts as non-negative; the start conditions
  // are verified directly by the scan, so this only selects the case.
  double positivity_tolerance = 1e-12;
};

SemicontinuityCertificate semicontinuity_modulus(const Cocycle& a, int k, double epsilon,
                                                 LpExponent p = LpExponent::finite(1.0),
                                                 const CertificateOptions& options = {});

// --- verification sweeps ----------------------------------------------------

struct PerturbationReport {
  std::size_t trial = 0;
  double radius = 0.0;  // ball radius the sample was drawn for
  MetricValue metric;
  double lambda_k_a = 0.0;
  double lambda_k_b = 0.0;
  double gap = 0.0;  // lambda_k_b - lambda_k_a
  double lambda_d_change = 0.0;
  PerturbationFamily family = PerturbationFamily::rotation;
  SpectrumMethod method = SpectrumMethod::exact_periodic;
  bool degenerate = false;
  std::vector<double> exponents_a;  // filled for ergodic bases
  std::vector<double> exponents_b;
};

struct VerificationSummary {
  std::vector<PerturbationReport> reports;
  double max_gap = 0.0;
  double bound = 0.0;  // constant * epsilon
  std::size_t violations = 0;
  std::size_t degenerate = 0;
};

struct SweepOptions {
  std::vector<PerturbationFamily> families = all_families();
  std::uint64_t seed = 0;
  // Fraction of trials drawn at the ball boundary (tau = delta' (1 - 1e-9)).
  double boundary_fraction = 0.1;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Draws `trials` perturbations with rho_p(A, B) < certificate.delta and
/// checks Lambda_k(B) - Lambda_k(A) < constant * epsilon on each.
VerificationSummary verify_semicontinuity(const Cocycle& a, const SemicontinuityCertificate& cert,
                                          std::size_t trials, const SweepOptions& options = {});

// --- proof internals -----------------------------------------------------------

struct ProofDiagnostics {
  double tau = 0.0;
  double forward_l1 = 0.0;       // ||B - A||_1
  double log_plus_gap_l1 = 0.0;  // ||g - f||_1, g = log+|B|, f = log+|A|

  double tail_f = 0.0;  // int_{E_f^c} f   (< 2 eta)
  double tail_g = 0.0;  // int_{E_g^c} g   (< 2 eta)
  double tail_measure_f = 0.0;  // mu(E_f^c) (< 2 eta / K)
  double tail_measure_g = 0.0;
  double cutoff_integral_bound = 0.0;
  double cutoff_measure_bound = 0.0;

  double measure_g_complement = 0.0;  // mu(G^c)
  double union_bound = 0.0;           // N mu(E_f^c u E_g^c)
  double measure_bound = 0.0;         // 4 epsilon / K

  std::vector<double> shifted_complement_integrals;  // int_{T^i(G^c)} g, i < N
  double shifted_complement_bound = 0.0;             // 6 epsilon

  double complement_term = 0.0;  // (1/N) int_{G^c} log+ |wedge^k B^N|
  double complement_bound = 0.0; // 6 k epsilon

  std::vector<double> induction_lhs;  // int_G |B^i - A^i|, i = 1..N
  std::vector<double> induction_rhs;  // i e^{K(i-1)} delta'

  double good_term = 0.0;   // (1/N) int_G log+ |wedge^k B^N|
  double good_bound = 0.0;  // Lambda_k(A) + (2 + k) epsilon

  double lambda_k_b = 0.0;
  double final_bound = 0.0;  // Lambda_k(A) + (2 + 7k) epsilon

  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

class ProofCheckFailure : public std::logic_error {
 public:
  ProofCheckFailure(const std::string& what, ProofDiagnostics diagnostics)
      : std::logic_error(what), diagnostics_(std::move(diagnostics)) {}
  const ProofDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  ProofDiagnostics diagnostics_;
};

/// Builds E_f, E_g and G = intersection of T^{-i}(E_f n E_g), i < N, for a
/// positive-case certificate and evaluates every intermediate inequality of
/// the semicontinuity argument. Throws ProofCheckFailure if one fails and
/// DomainError if B is outside the certified ball.
ProofDiagnostics proof_internals_check(const Cocycle& a, const Cocycle& b,
                                       const SemicontinuityCertificate& cert);

// --- collapse -------------------------------------------------------------------

/// Orthogonal S such that S * (monodromy at `start`) has all eigenvalues of
/// equal modulus: with M = U Sigma V^T, S = V P U^T where P is the signed
/// cyclic permutation built from quarter turns. Diagonal monodromies get an
/// exact signed-permutation S.
Matrix collapse_rotation(const Cocycle& a, Atom start);

class CollapseUnreachable : public DomainError {
 public:
  CollapseUnreachable(const std::string& what, std::size_t minimal_n)
      : DomainError(what), minimal_n_(minimal_n) {}
  std::size_t minimal_n() const { return minimal_n_; }

 private:
  std::size_t minimal_n_;
};

/// B = A except at T^{-1}(0), where B = S A with S from collapse_rotation(a, 0),
/// so that the monodromy of B at 0 is S times that of A. On a single n-cycle
/// the change costs O(1/n) in rho_1. Requires an ergodic base. Returns A
/// unchanged if it already has one-point spectrum; throws
/// CollapseUnreachable (carrying the smallest sufficient n for constant
/// cocycles) if rho_1(A, B) >= budget.
Cocycle collapse_perturbation(const Cocycle& a, double budget);

// --- continuity profiles --------------------------------------------------------

struct ProfileRow {
  double radius = 0.0;
  double sup_lambda = 0.0;
  double inf_lambda = 0.0;
  double sup_lambda_d_change = 0.0;
  bool collapse_included = false;
  std::size_t trials = 0;
  std::size_t degenerate = 0;
};

struct ContinuityProfile {
  int k = 1;
  LpExponent p = LpExponent::finite(1.0);
  double lambda_k = 0.0;
  double lambda_d = 0.0;
  std::vector<ProfileRow> rows;
  std::vector<PerturbationReport> reports;
};

/// For each radius r samples B with rho_p(A, B) <= r (plus the collapse
/// perturbation when it fits in the ball) and records the extremes of
/// Lambda_k(B) and of |Lambda_d(B) - Lambda_d(A)|.
ContinuityProfile continuity_profile(const Cocycle& a, int k, LpExponent p,
                                     const std::vector<double>& radii, std::size_t trials,
                                     const SweepOptions& options = {});

/// Smallest epsilon on the grid 1e-6 * 1.25^j whose certificate radius
/// exceeds r (Lambda_k(B) < Lambda_k(A) + C epsilon is then certified in the
/// rho_1 ball of radius r). Returns +inf if no grid value reaches r.
double certified_epsilon(const Cocycle& a, int k, double radius,
                         const CertificateOptions& options = {});

}  // namespace cocylab
