#include "cocylab/base_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cocylab/errors.hpp"
#include "cocylab/random.hpp"

namespace cocylab {

namespace {

constexpr double kWeightTolerance = 1e-12;

double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int sample_categorical(Rng& rng, const double* probabilities, std::size_t n) {
  const double u = unit_uniform(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);
}

}  // namespace

FiniteBase::FiniteBase(std::vector<double> weights, std::vector<Atom> permutation)
    : weights_(std::move(weights)), forward_(std::move(permutation)) {
  const std::size_t n = weights_.size();
  if (n == 0) throw DomainError("FiniteBase: need at least one atom");
  if (forward_.size() != n) throw DomainError("FiniteBase: permutation size differs from weights");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("FiniteBase: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw DomainError("FiniteBase: weights must sum to 1");
  }
  backward_.assign(n, n);
  for (Atom i = 0; i < n; ++i) {
    const Atom j = forward_[i];
    if (j >= n || backward_[j] != n) throw DomainError("FiniteBase: permutation is not a bijection");
    backward_[j] = i;
  }
  for (Atom i = 0; i < n; ++i) {
    if (std::abs(weights_[forward_[i]] - weights_[i]) > kWeightTolerance * weights_[i]) {
      throw DomainError("FiniteBase: permutation does not preserve the weights");
    }
  }
  cycle_of_.assign(n, n);
  for (Atom start = 0; start < n; ++start) {
    if (cycle_of_[start] != n) continue;
    std::vector<Atom> cycle;
    Atom x = start;
    do {
      cycle_of_[x] = cycles_.size();
      cycle.push_back(x);
      x = forward_[x];
    } while (x != start);
    cycles_.push_back(std::move(cycle));
  }
}

FiniteBase FiniteBase::cyclic(std::size_t n) {
  if (n == 0) throw DomainError("FiniteBase::cyclic: n must be >= 1");
  std::vector<Atom> perm(n);
  for (Atom i = 0; i < n; ++i) perm[i] = (i + 1) % n;
  return FiniteBase(std::vector<double>(n, 1.0 / static_cast<double>(n)), std::move(perm));
}

FiniteBase FiniteBase::disjoint_cycles(const std::vector<std::size_t>& lengths,
                                       const std::vector<double>& cycle_masses) {
  if (lengths.empty() || lengths.size() != cycle_masses.size()) {
    throw DomainError("FiniteBase::disjoint_cycles: lengths and masses must match");
  }
  std::vector<double> weights;
  std::vector<Atom> perm;
  Atom offset = 0;
  for (std::size_t c = 0; c < lengths.size(); ++c) {
    if (lengths[c] == 0) throw DomainError("FiniteBase::disjoint_cycles: empty cycle");
    for (std::size_t i = 0; i < lengths[c]; ++i) {
      weights.push_back(cycle_masses[c] / static_cast<double>(lengths[c]));
      perm.push_back(offset + (i + 1) % lengths[c]);
    }
    offset += lengths[c];
  }
  return FiniteBase(std::move(weights), std::move(perm));
}

void FiniteBase::check_atom(Atom x) const {
  if (x >= size()) {
    throw DomainError("FiniteBase: atom " + std::to_string(x) + " out of range");
  }
}

double FiniteBase::weight(Atom x) const {
  check_atom(x);
  return weights_[x];
}

Atom FiniteBase::apply(Atom x) const {
  check_atom(x);
  return forward_[x];
}

Atom FiniteBase::apply_inverse(Atom x) const {
  check_atom(x);
  return backward_[x];
}

Atom FiniteBase::iterate(Atom x, std::int64_t n) const {
  check_atom(x);
  const auto& cycle = cycles_[cycle_of_[x]];
  const auto len = static_cast<std::int64_t>(cycle.size());
  const auto pos = static_cast<std::int64_t>(std::find(cycle.begin(), cycle.end(), x) - cycle.begin());
  const std::int64_t target = ((pos + n) % len + len) % len;
  return cycle[static_cast<std::size_t>(target)];
}

FiniteBase FiniteBase::inverse() const { return FiniteBase(weights_, backward_); }

std::size_t FiniteBase::cycle_index(Atom x) const {
  check_atom(x);
  return cycle_of_[x];
}

double FiniteBase::cycle_mass(std::size_t cycle) const {
  if (cycle >= cycles_.size()) throw DomainError("FiniteBase: cycle index out of range");
  if (cycles_.size() == 1) return 1.0;
  double mass = 0.0;
  for (Atom x : cycles_[cycle]) mass += weights_[x];
  return mass;
}

double FiniteBase::integrate(std::span<const double> f) const {
  if (f.size() != size()) throw DomainError("FiniteBase::integrate: wrong number of values");
  double sum = 0.0;
  for (Atom i = 0; i < size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw IntegrationError("integrand is not finite at atom " + std::to_string(i));
    }
    sum += weights_[i] * f[i];
  }
  return sum;
}

double FiniteBase::integrate(const std::function<double(Atom)>& f) const {
  std::vector<double> values(size());
  for (Atom i = 0; i < size(); ++i) values[i] = f(i);
  return integrate(values);
}

double FiniteBase::integrate_over(std::span<const double> f, const std::vector<bool>& mask) const {
  if (f.size() != size() || mask.size() != size()) {
    throw DomainError("FiniteBase::integrate_over: size mismatch");
  }
  double sum = 0.0;
  for (Atom i = 0; i < size(); ++i) {
    if (!mask[i]) continue;
    if (!std::isfinite(f[i])) {
      throw IntegrationError("integrand is not finite at atom " + std::to_string(i));
    }
    sum += weights_[i] * f[i];
  }
  return sum;
}

double FiniteBase::measure_of(const std::vector<bool>& mask) const {
  if (mask.size() != size()) throw DomainError("FiniteBase::measure_of: size mismatch");
  double sum = 0.0;
  for (Atom i = 0; i < size(); ++i) {
    if (mask[i]) sum += weights_[i];
  }
  return sum;
}

TailMass FiniteBase::tail_mass(std::span<const double> f, double c) const {
  if (f.size() != size()) throw DomainError("FiniteBase::tail_mass: wrong number of values");
  TailMass out;
  for (Atom i = 0; i < size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw IntegrationError("integrand is not finite at atom " + std::to_string(i));
    }
    if (f[i] > c) {
      out.measure += weights_[i];
      out.integral += weights_[i] * f[i];
    }
  }
  return out;
}

bool FiniteBase::operator==(const FiniteBase& other) const {
  return forward_ == other.forward_ && weights_ == other.weights_;
}

// --- symbolic shifts -------------------------------------------------------

int SymbolicPoint::symbol(std::int64_t offset) const {
  if (orbit == nullptr) throw DomainError("SymbolicPoint: detached point");
  return orbit->symbol(time + offset);
}

SymbolOrbit::SymbolOrbit(std::vector<int> symbols, std::int64_t first_time)
    : symbols_(std::move(symbols)), first_(first_time) {}

int SymbolOrbit::symbol(std::int64_t t) const {
  if (!contains(t)) {
    throw DomainError("SymbolOrbit: time " + std::to_string(t) + " outside generated window");
  }
  return symbols_[static_cast<std::size_t>(t - first_)];
}

SymbolicPoint SymbolOrbit::point(std::int64_t t) const {
  if (!contains(t)) {
    throw DomainError("SymbolOrbit: time " + std::to_string(t) + " outside generated window");
  }
  return SymbolicPoint{this, t};
}

SampledBase::SampledBase(Kind kind, Matrix transition, std::vector<double> stationary,
                         std::uint64_t seed)
    : kind_(kind), transition_(std::move(transition)), stationary_(std::move(stationary)),
      seed_(seed) {
  const auto n = transition_.rows();
  reversed_ = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (stationary_[static_cast<std::size_t>(j)] > 0.0) {
        reversed_(j, i) = stationary_[static_cast<std::size_t>(i)] * transition_(i, j) /
                          stationary_[static_cast<std::size_t>(j)];
      }
    }
  }
}

SampledBase SampledBase::bernoulli(std::vector<double> probabilities, std::uint64_t seed) {
  if (probabilities.size() < 1) throw DomainError("bernoulli: empty alphabet");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0)) throw DomainError("bernoulli: probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw DomainError("bernoulli: probabilities must sum to 1");
  }
  const auto n = static_cast<Eigen::Index>(probabilities.size());
  Matrix transition(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) transition(i, j) = probabilities[static_cast<std::size_t>(j)];
  }
  return SampledBase(Kind::bernoulli_shift, std::move(transition), std::move(probabilities), seed);
}

SampledBase SampledBase::markov(const Matrix& transition, std::uint64_t seed) {
  const auto n = transition.rows();
  if (n < 1 || transition.cols() != n) throw DomainError("markov: transition must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(transition(i, j) >= 0.0)) throw DomainError("markov: negative transition probability");
      row += transition(i, j);
    }
    if (std::abs(row - 1.0) > kWeightTolerance) {
      throw DomainError("markov: transition matrix must be row-stochastic");
    }
  }
  // pi (P - I) = 0 with sum(pi) = 1, solved in the least-squares sense.
  Matrix system(n + 1, n);
  system.topRows(n) = transition.transpose() - Matrix::Identity(n, n);
  system.row(n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  const Vector pi = system.colPivHouseholderQr().solve(rhs);
  std::vector<double> stationary(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    stationary[static_cast<std::size_t>(i)] = std::max(0.0, pi(i));
  }
  const double total = std::accumulate(stationary.begin(), stationary.end(), 0.0);
  for (double& p : stationary) p /= total;
  return SampledBase(Kind::markov_shift, transition, std::move(stationary), seed);
}

SymbolOrbit SampledBase::orbit(std::size_t past, std::size_t future, std::uint64_t stream) const {
  Rng rng = make_rng(seed_, stream);
  const std::size_t n = alphabet_size();
  std::vector<int> symbols(past + future + 1);
  symbols[past] = sample_categorical(rng, stationary_.data(), n);
  std::vector<double> row(n);
  for (std::size_t t = past + 1; t < symbols.size(); ++t) {
    const auto from = static_cast<Eigen::Index>(symbols[t - 1]);
    for (std::size_t j = 0; j < n; ++j) row[j] = transition_(from, static_cast<Eigen::Index>(j));
    symbols[t] = sample_categorical(rng, row.data(), n);
  }
  for (std::size_t t = past; t-- > 0;) {
    const auto from = static_cast<Eigen::Index>(symbols[t + 1]);
    for (std::size_t j = 0; j < n; ++j) row[j] = reversed_(from, static_cast<Eigen::Index>(j));
    symbols[t] = sample_categorical(rng, row.data(), n);
  }
  return SymbolOrbit(std::move(symbols), -static_cast<std::int64_t>(past));
}

SymbolicPoint SampledBase::apply(const SymbolicPoint& x) const {
  if (x.orbit == nullptr || !x.orbit->contains(x.time + 1)) {
    throw DomainError("SampledBase::apply: point leaves the generated window");
  }
  return SymbolicPoint{x.orbit, x.time + 1};
}

SymbolicPoint SampledBase::apply_inverse(const SymbolicPoint& x) const {
  if (x.orbit == nullptr || !x.orbit->contains(x.time - 1)) {
    throw DomainError("SampledBase::apply_inverse: point leaves the generated window");
  }
  return SymbolicPoint{x.orbit, x.time - 1};
}

Estimate SampledBase::integrate(const std::function<double(const SymbolicPoint&)>& f,
                                std::size_t samples, std::size_t lookahead,
                                std::uint64_t stream) const {
  if (samples == 0) throw DomainError("SampledBase::integrate: need at least one sample");
  const SymbolOrbit path = orbit(0, samples + lookahead, stream);
  constexpr std::size_t kBatches = 32;
  const bool batched = samples >= 2 * kBatches;
  const std::size_t batch_size = batched ? samples / kBatches : 1;
  const std::size_t used = batched ? batch_size * kBatches : samples;

  std::vector<double> batch_means;
  double total = 0.0;
  double batch_sum = 0.0;
  for (std::size_t t = 0; t < used; ++t) {
    const double v = f(path.point(static_cast<std::int64_t>(t)));
    if (!std::isfinite(v)) {
      throw IntegrationError("integrand is not finite at sample " + std::to_string(t));
    }
    total += v;
    batch_sum += v;
    if ((t + 1) % batch_size == 0) {
      batch_means.push_back(batch_sum / static_cast<double>(batch_size));
      batch_sum = 0.0;
    }
  }
  Estimate out;
  out.samples = used;
  out.mean = total / static_cast<double>(used);
  if (batch_means.size() > 1) {
    double ss = 0.0;
    for (double m : batch_means) ss += (m - out.mean) * (m - out.mean);
    const auto b = static_cast<double>(batch_means.size());
    out.standard_error = std::sqrt(ss / (b - 1.0) / b);
  }
  return out;
}

}  // namespace cocylab
