#include "cocylab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cocylab/errors.hpp"
#include "cocylab/lyapunov.hpp"
#include "cocylab/semicontinuity.hpp"

namespace cocylab {

std::string to_string(PerturbationFamily family) {
  switch (family) {
    case PerturbationFamily::rotation:
      return "rotation";
    case PerturbationFamily::diagonal:
      return "diagonal";
    case PerturbationFamily::collapse:
      return "collapse";
  }
  return "unknown";
}

PerturbationFamily parse_family(const std::string& name) {
  if (name == "rotation") return PerturbationFamily::rotation;
  if (name == "diagonal") return PerturbationFamily::diagonal;
  if (name == "collapse") return PerturbationFamily::collapse;
  throw DomainError("unknown perturbation family '" + name + "'");
}

std::vector<PerturbationFamily> all_families() {
  return {PerturbationFamily::rotation, PerturbationFamily::diagonal,
          PerturbationFamily::collapse};
}

namespace {

constexpr std::size_t kMaxAtomsPerCurve = 8;

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform(rng, 0.0, static_cast<double>(n))) % n;
}

std::vector<Atom> random_atoms(Rng& rng, std::size_t n) {
  const std::size_t count = 1 + uniform_index(rng, std::min(n, kMaxAtomsPerCurve));
  std::vector<Atom> pool(n);
  for (Atom i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

PerturbationCurve::PerturbationCurve(const Cocycle& a, PerturbationFamily family,
                                     std::vector<Atom> atoms, std::vector<Factor> factors,
                                     double max_magnitude)
    : center_(&a), family_(family), atoms_(std::move(atoms)), factors_(std::move(factors)),
      max_magnitude_(max_magnitude) {
  if (atoms_.size() != factors_.size()) throw DomainError("PerturbationCurve: size mismatch");
}

Cocycle PerturbationCurve::at(double s) const {
  std::vector<Matrix> generators = center_->generators();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    generators[atoms_[i]] = factors_[i](s) * generators[atoms_[i]];
  }
  return Cocycle(center_->shared_base(), std::move(generators));
}

BallSampler::BallSampler(const Cocycle& a, LpExponent p, std::vector<PerturbationFamily> families)
    : a_(&a), p_(p), families_(std::move(families)) {
  if (families_.empty()) throw DomainError("BallSampler: no perturbation family");
  const bool wants_collapse = std::find(families_.begin(), families_.end(),
                                        PerturbationFamily::collapse) != families_.end();
  if (wants_collapse) {
    collapse_rotation_ = collapse_rotation(a, 0);
    collapse_atom_ = a.base().apply_inverse(0);
  }
}

PerturbationCurve BallSampler::draw_curve(PerturbationFamily family, Rng& rng) const {
  const int d = a_->dimension();
  const std::size_t n = a_->base().size();
  switch (family) {
    case PerturbationFamily::rotation: {
      auto atoms = random_atoms(rng, n);
      std::vector<PerturbationCurve::Factor> factors;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const int p = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(d)));
        int q = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(d - 1)));
        if (q >= p) ++q;
        const double angle = uniform(rng, -1.0, 1.0);
        factors.emplace_back([d, p, q, angle](double s) { return plane_rotation(d, p, q, s * angle); });
      }
      return PerturbationCurve(*a_, family, std::move(atoms), std::move(factors),
                               std::numbers::pi / 2.0);
    }
    case PerturbationFamily::diagonal: {
      auto atoms = random_atoms(rng, n);
      std::vector<PerturbationCurve::Factor> factors;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        Vector direction(d);
        for (int j = 0; j < d; ++j) direction(j) = uniform(rng, -1.0, 1.0);
        factors.emplace_back([direction](double s) {
          return Matrix((s * direction).array().exp().matrix().asDiagonal());
        });
      }
      return PerturbationCurve(*a_, family, std::move(atoms), std::move(factors), 5.0);
    }
    case PerturbationFamily::collapse: {
      if (!collapse_rotation_) throw DomainError("BallSampler: collapse family not enabled");
      const Matrix step = *collapse_rotation_ - Matrix::Identity(d, d);
      std::vector<PerturbationCurve::Factor> factors;
      factors.emplace_back([step, d](double t) {
        if (t == 1.0) return Matrix(Matrix::Identity(d, d) + step);
        return Matrix(Matrix::Identity(d, d) + t * step);
      });
      return PerturbationCurve(*a_, family, {collapse_atom_}, std::move(factors), 1.0);
    }
  }
  throw DomainError("BallSampler: unknown family");
}

BallSample BallSampler::evaluate(const PerturbationCurve& curve, double s) const {
  Cocycle b = curve.at(s);
  const MetricValue metric = distance(*a_, b, p_);
  return BallSample{std::move(b), metric, curve.family(), s, metric.tau == 0.0};
}

BallSample BallSampler::sample_inside(double radius, bool strict, std::size_t trial,
                                      Rng& rng) const {
  if (!(radius > 0.0 && radius <= 1.0)) throw DomainError("sample_inside: radius must be in (0, 1]");
  const PerturbationFamily family = families_[trial % families_.size()];
  const PerturbationCurve curve = draw_curve(family, rng);
  const double target_rho = radius * uniform(rng, 1e-3, 1.0);
  const double target_tau = target_rho / (1.0 - target_rho);
  const double tau_limit = radius >= 1.0 ? std::numeric_limits<double>::infinity()
                                         : radius / (1.0 - radius);
  const auto inside = [&](const MetricValue& m) {
    return strict ? m.rho < radius && m.tau < tau_limit : m.rho <= radius;
  };

  // Full collapse when it fits: that is the sample that exhibits the drop.
  if (family == PerturbationFamily::collapse) {
    try {
      BallSample full = evaluate(curve, 1.0);
      if (inside(full.metric) && uniform(rng, 0.0, 1.0) < 0.5) return full;
    } catch (const DomainError&) {
    }
  }

  double s = std::min(1e-3, curve.max_magnitude());
  std::optional<BallSample> best;
  for (int iter = 0; iter < 40; ++iter) {
    BallSample sample = [&]() -> BallSample {
      try {
        return evaluate(curve, s);
      } catch (const DomainError&) {
        return BallSample{*a_, MetricValue{std::numeric_limits<double>::infinity(), 1.0, p_},
                          family, s, false};
      }
    }();
    const double tau = sample.metric.tau;
    if (inside(sample.metric) && !sample.degenerate) best = sample;
    if (std::abs(tau / target_tau - 1.0) < 1e-3) break;
    double next;
    if (tau == 0.0) {
      next = s * 1e3;
    } else if (std::isinf(tau)) {
      next = 0.5 * s;
    } else {
      next = s * std::clamp(target_tau / tau, 0.1, 10.0);
    }
    next = std::min(next, curve.max_magnitude());
    if (next == s) break;
    s = next;
  }
  if (best) return *best;

  // Shrink until inside; below double resolution the sample degenerates to A.
  for (int iter = 0; iter < 200; ++iter) {
    s *= 0.5;
    try {
      BallSample sample = evaluate(curve, s);
      if (sample.degenerate) break;
      if (inside(sample.metric)) return sample;
    } catch (const DomainError&) {
    }
  }
  return BallSample{*a_, MetricValue{0.0, 0.0, p_}, family, 0.0, true};
}

BallSample BallSampler::sample_near_tau(double tau_max, std::size_t trial, Rng& rng) const {
  if (!(tau_max > 0.0)) throw DomainError("sample_near_tau: tau_max must be positive");
  const PerturbationFamily family = families_[trial % families_.size()];
  const PerturbationCurve curve = draw_curve(family, rng);
  const double lower = tau_max * (1.0 - 1e-8);

  const auto tau_at = [&](double s) {
    try {
      return evaluate(curve, s).metric.tau;
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Bracket [lo, hi] with tau(lo) < tau_max <= tau(hi).
  double lo = 0.0;
  double hi = std::min(1e-3, curve.max_magnitude());
  for (int iter = 0; iter < 80 && tau_at(hi) < tau_max; ++iter) {
    lo = hi;
    if (hi == curve.max_magnitude()) break;
    hi = std::min(hi * 4.0, curve.max_magnitude());
  }
  if (tau_at(hi) < tau_max) {
    BallSample out = evaluate(curve, hi);
    return out;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double tau = tau_at(mid);
    if (tau < tau_max) {
      lo = mid;
      if (tau >= lower) break;
    } else {
      hi = mid;
    }
  }
  if (lo == 0.0) return BallSample{*a_, MetricValue{0.0, 0.0, p_}, family, 0.0, true};
  return evaluate(curve, lo);
}

}  // namespace cocylab
