#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cocylab/linalg.hpp"

namespace cocylab {

using Atom = std::size_t;

// mu{f > c} together with the integral of f over that set.
struct TailMass {
  double measure = 0.0;
  double integral = 0.0;
};

/// Finite probability space {0, ..., n-1} with positive atom weights and an
/// invertible measure-preserving map given as a permutation. Exact integration.
///
/// The permutation may consist of several cycles; the base is ergodic iff it
/// is a single cycle. Weights must be constant along each cycle.
class FiniteBase {
 public:
  FiniteBase(std::vector<double> weights, std::vector<Atom> permutation);

  // Uniform weights, x -> x + 1 mod n.
  static FiniteBase cyclic(std::size_t n);
  // Disjoint shift cycles of the given lengths; `cycle_masses` must sum to 1
  // and are spread uniformly over each cycle.
  static FiniteBase disjoint_cycles(const std::vector<std::size_t>& lengths,
                                    const std::vector<double>& cycle_masses);

  std::size_t size() const { return weights_.size(); }
  double weight(Atom x) const;
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Atom>& permutation() const { return forward_; }

  Atom apply(Atom x) const;
  Atom apply_inverse(Atom x) const;
  // T^n x for any integer n.
  Atom iterate(Atom x, std::int64_t n) const;

  // The base (X, mu, T^{-1}).
  FiniteBase inverse() const;

  bool ergodic() const { return cycles_.size() == 1; }
  // Cycles in order of their smallest atom; each starts at that atom and
  // follows T.
  const std::vector<std::vector<Atom>>& cycles() const { return cycles_; }
  std::size_t cycle_index(Atom x) const;
  double cycle_mass(std::size_t cycle) const;

  /// Exact sum of weight(x) * f[x]. Throws IntegrationError on a non-finite value.
  double integrate(std::span<const double> f) const;
  double integrate(const std::function<double(Atom)>& f) const;
  // Integral of f over the atoms where `mask` is true.
  double integrate_over(std::span<const double> f, const std::vector<bool>& mask) const;
  double measure_of(const std::vector<bool>& mask) const;

  TailMass tail_mass(std::span<const double> f, double c) const;

  bool operator==(const FiniteBase& other) const;

 private:
  void check_atom(Atom x) const;

  std::vector<double> weights_;
  std::vector<Atom> forward_;
  std::vector<Atom> backward_;
  std::vector<std::vector<Atom>> cycles_;
  std::vector<std::size_t> cycle_of_;
};

// Monte Carlo estimate with its standard error.
struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

class SymbolOrbit;

/// A point of a two-sided symbolic shift, represented by a position on a
/// finite window of a generated orbit. Shifting past the window is an error.
struct SymbolicPoint {
  const SymbolOrbit* orbit = nullptr;
  std::int64_t time = 0;

  // x_{offset} of this point, i.e. the symbol at orbit position time + offset.
  int symbol(std::int64_t offset = 0) const;
};

class SymbolOrbit {
 public:
  SymbolOrbit(std::vector<int> symbols, std::int64_t first_time);

  std::int64_t first_time() const { return first_; }
  std::int64_t last_time() const { return first_ + static_cast<std::int64_t>(symbols_.size()) - 1; }
  bool contains(std::int64_t t) const { return t >= first_ && t <= last_time(); }
  int symbol(std::int64_t t) const;
  SymbolicPoint point(std::int64_t t) const;
  const std::vector<int>& symbols() const { return symbols_; }

 private:
  std::vector<int> symbols_;
  std::int64_t first_;
};

/// Stationary Bernoulli or Markov shift on a finite alphabet. Points are
/// sampled from the stationary measure; orbits are deterministic functions of
/// (seed, stream).
class SampledBase {
 public:
  enum class Kind { bernoulli_shift, markov_shift };

  static SampledBase bernoulli(std::vector<double> probabilities, std::uint64_t seed);
  static SampledBase markov(const Matrix& transition, std::uint64_t seed);

  Kind kind() const { return kind_; }
  std::size_t alphabet_size() const { return stationary_.size(); }
  const std::vector<double>& stationary() const { return stationary_; }
  const Matrix& transition() const { return transition_; }
  std::uint64_t seed() const { return seed_; }

  // Orbit window covering times -past .. future, with x_0 ~ stationary law.
  SymbolOrbit orbit(std::size_t past, std::size_t future, std::uint64_t stream = 0) const;

  SymbolicPoint apply(const SymbolicPoint& x) const;
  SymbolicPoint apply_inverse(const SymbolicPoint& x) const;

  /// Birkhoff average of f along one generated orbit of `samples` points,
  /// with a batch-means standard error. `lookahead` extra future symbols are
  /// generated so that f may inspect x_0 .. x_lookahead.
  Estimate integrate(const std::function<double(const SymbolicPoint&)>& f,
                     std::size_t samples, std::size_t lookahead = 0,
                     std::uint64_t stream = 0) const;

 private:
  SampledBase(Kind kind, Matrix transition, std::vector<double> stationary,
              std::uint64_t seed);

  Kind kind_;
  Matrix transition_;
  Matrix reversed_;
  std::vector<double> stationary_;
  std::uint64_t seed_;
};

}  // namespace cocylab
