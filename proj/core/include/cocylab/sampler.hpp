#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cocylab/cocycle.hpp"
#include "cocylab/metrics.hpp"
#include "cocylab/random.hpp"

namespace cocylab {

// Named perturbation families used for ball sweeps. Uniform sampling in a
// rho_p ball is not well defined, so each family is a reproducible
// one-parameter curve s -> B(s) with B(0) = A.
enum class PerturbationFamily {
  rotation,  // small two-plane rotations on a random atom subset
  diagonal,  // multiplicative diagonal noise on a random atom subset
  collapse,  // partial step toward the spectrum-collapsing rotation
};

std::string to_string(PerturbationFamily family);
PerturbationFamily parse_family(const std::string& name);
std::vector<PerturbationFamily> all_families();

/// A fixed random direction: B(s)(x) = F_x(s) A(x) on a set of atoms, with
/// F_x(0) = I. `at(s)` builds the perturbed cocycle.
class PerturbationCurve {
 public:
  using Factor = std::function<Matrix(double)>;

  PerturbationCurve(const Cocycle& a, PerturbationFamily family, std::vector<Atom> atoms,
                    std::vector<Factor> factors, double max_magnitude);

  PerturbationFamily family() const { return family_; }
  double max_magnitude() const { return max_magnitude_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  // Throws DomainError if B(s) is not invertible.
  Cocycle at(double s) const;

 private:
  const Cocycle* center_;
  PerturbationFamily family_;
  std::vector<Atom> atoms_;
  std::vector<Factor> factors_;
  double max_magnitude_;
};

struct BallSample {
  Cocycle cocycle;
  MetricValue metric;
  PerturbationFamily family;
  double magnitude = 0.0;
  // B == A after rounding: the requested radius is below what a double
  // perturbation can represent.
  bool degenerate = false;
};

/// Draws perturbations B of A inside rho_p balls, cycling through the
/// requested families.
class BallSampler {
 public:
  BallSampler(const Cocycle& a, LpExponent p, std::vector<PerturbationFamily> families);

  LpExponent p() const { return p_; }
  const Cocycle& center() const { return *a_; }

  PerturbationCurve draw_curve(PerturbationFamily family, Rng& rng) const;

  // B with rho_p(A, B) <= radius (strictly below when `strict`), at a target
  // distance drawn uniformly from (0, radius].
  BallSample sample_inside(double radius, bool strict, std::size_t trial, Rng& rng) const;
  // B with tau_p(A, B) in [(1 - 1e-8) tau_max, tau_max): boundary sampling.
  BallSample sample_near_tau(double tau_max, std::size_t trial, Rng& rng) const;

 private:
  BallSample evaluate(const PerturbationCurve& curve, double s) const;

  const Cocycle* a_;
  LpExponent p_;
  std::vector<PerturbationFamily> families_;
  std::optional<Matrix> collapse_rotation_;
  Atom collapse_atom_ = 0;
};

}  // namespace cocylab
