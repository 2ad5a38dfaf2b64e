#include "cocylab/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "cocylab/errors.hpp"

namespace cocylab {

LpExponent LpExponent::finite(double p) {
  if (!(p >= 1.0)) throw DomainError("L^p exponent must satisfy p >= 1");
  return LpExponent(p);
}

LpExponent LpExponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return infinity();
  double p = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, p);
  if (ec != std::errc() || ptr != last) throw DomainError("cannot parse L^p exponent '" + text + "'");
  if (std::isinf(p)) return infinity();
  return finite(p);
}

std::string LpExponent::to_string() const {
  if (is_infinite()) return "inf";
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value_);
  return std::string(buffer, ptr);
}

namespace {

double weighted_p_mean(std::span<const double> weights, std::span<const double> values,
                       LpExponent p) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    if (!(values[i] >= 0.0) && !std::isnan(values[i])) {
      throw DomainError("lp_norm: pointwise values must be non-negative");
    }
    if (!std::isfinite(values[i])) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  if (hi == 0.0) return 0.0;
  if (p.is_infinite()) return hi;

  double sum = 0.0;
  if (p.value() == 1.0) {
    for (std::size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum += weights[i] * std::pow(values[i] / hi, p.value());
    }
    sum = hi * std::pow(sum, 1.0 / p.value());
  }
  // A p-mean of a probability measure lies between the extreme values.
  return std::clamp(sum, lo, hi);
}

void require_compatible(const Cocycle& a, const Cocycle& b) {
  if (a.dimension() != b.dimension()) throw DomainError("metric: cocycle dimensions differ");
  if (!(a.base() == b.base())) throw DomainError("metric: cocycles live over different bases");
}

}  // namespace

double lp_norm(const FiniteBase& base, std::span<const double> pointwise, LpExponent p) {
  if (pointwise.size() != base.size()) throw DomainError("lp_norm: wrong number of values");
  return weighted_p_mean(base.weights(), pointwise, p);
}

double lp_norm(const FiniteBase& base, std::span<const Matrix> a, LpExponent p) {
  if (a.size() != base.size()) throw DomainError("lp_norm: wrong number of matrices");
  std::vector<double> norms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) norms[i] = operator_norm(a[i]);
  return lp_norm(base, norms, p);
}

double rho_from_tau(double tau) {
  if (std::isinf(tau)) return 1.0;
  return tau / (1.0 + tau);
}

PointwiseDistances pointwise_distances(const Cocycle& a, const Cocycle& b) {
  require_compatible(a, b);
  const std::size_t n = a.base().size();
  PointwiseDistances out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (Atom x = 0; x < n; ++x) {
    if (a.at(x) == b.at(x)) continue;
    out.forward[x] = operator_norm(a.at(x) - b.at(x));
    out.inverse[x] = operator_norm(a.inverse_at(x) - b.inverse_at(x));
  }
  return out;
}

double tau_p(const Cocycle& a, const Cocycle& b, LpExponent p) {
  const auto d = pointwise_distances(a, b);
  return lp_norm(a.base(), d.forward, p) + lp_norm(a.base(), d.inverse, p);
}

double rho_p(const Cocycle& a, const Cocycle& b, LpExponent p) {
  return rho_from_tau(tau_p(a, b, p));
}

MetricValue distance(const Cocycle& a, const Cocycle& b, LpExponent p) {
  const double tau = tau_p(a, b, p);
  return MetricValue{tau, rho_from_tau(tau), p};
}

double tau_p(const SymbolicCocycle& a, const SymbolicCocycle& b, LpExponent p) {
  if (a.dimension() != b.dimension()) throw DomainError("metric: cocycle dimensions differ");
  if (&a.base() != &b.base() && (a.base().stationary() != b.base().stationary() ||
                                 a.base().transition() != b.base().transition())) {
    throw DomainError("metric: cocycles live over different bases");
  }
  const auto& pi = a.base().stationary();
  std::vector<double> forward(pi.size());
  std::vector<double> inverse(pi.size());
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const Matrix& ma = a.by_symbol()[s];
    const Matrix& mb = b.by_symbol()[s];
    forward[s] = operator_norm(ma - mb);
    inverse[s] = operator_norm(ma.partialPivLu().inverse() - mb.partialPivLu().inverse());
  }
  return weighted_p_mean(pi, forward, p) + weighted_p_mean(pi, inverse, p);
}

double rho_p(const SymbolicCocycle& a, const SymbolicCocycle& b, LpExponent p) {
  return rho_from_tau(tau_p(a, b, p));
}

}  // namespace cocylab
