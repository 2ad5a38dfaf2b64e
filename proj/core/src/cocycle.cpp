#include "cocylab/cocycle.hpp"

#include <cmath>
#include <string>

#include "cocylab/errors.hpp"

namespace cocylab {

namespace {

int checked_dimension(const std::vector<Matrix>& matrices, std::string_view what) {
  if (matrices.empty()) throw DomainError(std::string(what) + ": no matrices");
  const auto d = matrices.front().rows();
  if (d < 2) throw DomainError(std::string(what) + ": dimension must be >= 2");
  for (const auto& m : matrices) {
    if (m.rows() != d || m.cols() != d) {
      throw DomainError(std::string(what) + ": inconsistent matrix dimensions");
    }
    require_invertible(m, what);
  }
  return static_cast<int>(d);
}

std::vector<Matrix> inverses_of(const std::vector<Matrix>& matrices) {
  std::vector<Matrix> out;
  out.reserve(matrices.size());
  for (const auto& m : matrices) out.push_back(m.partialPivLu().inverse());
  return out;
}

}  // namespace

Cocycle::Cocycle(std::shared_ptr<const FiniteBase> base, std::vector<Matrix> generators)
    : base_(std::move(base)), generators_(std::move(generators)) {
  if (!base_) throw DomainError("Cocycle: missing base");
  if (generators_.size() != base_->size()) {
    throw DomainError("Cocycle: need one matrix per atom (" + std::to_string(base_->size()) +
                      "), got " + std::to_string(generators_.size()));
  }
  dimension_ = checked_dimension(generators_, "Cocycle");
  inverses_ = inverses_of(generators_);
}

Cocycle Cocycle::constant(std::shared_ptr<const FiniteBase> base, const Matrix& m) {
  const std::size_t n = base ? base->size() : 0;
  return Cocycle(std::move(base), std::vector<Matrix>(n, m));
}

Cocycle Cocycle::identity(std::shared_ptr<const FiniteBase> base, int d) {
  return constant(std::move(base), Matrix::Identity(d, d));
}

const Matrix& Cocycle::at(Atom x) const {
  if (x >= generators_.size()) throw DomainError("Cocycle: atom out of range");
  return generators_[x];
}

const Matrix& Cocycle::inverse_at(Atom x) const {
  if (x >= inverses_.size()) throw DomainError("Cocycle: atom out of range");
  return inverses_[x];
}

Matrix Cocycle::product(Atom x, std::size_t n) const {
  Matrix p = Matrix::Identity(dimension_, dimension_);
  Atom y = x;
  for (std::size_t i = 0; i < n; ++i) {
    p = at(y) * p;
    if (!p.allFinite()) {
      throw ProductOverflow("Cocycle::product overflowed after " + std::to_string(i + 1) +
                            " steps; use scaled_product");
    }
    y = base_->apply(y);
  }
  return p;
}

ScaledMatrix Cocycle::scaled_product(Atom x, std::size_t n) const {
  ScaledMatrix p = ScaledMatrix::identity(dimension_);
  Atom y = x;
  for (std::size_t i = 0; i < n; ++i) {
    p.left_multiply(at(y));
    y = base_->apply(y);
  }
  return p;
}

Cocycle inverse_cocycle(const Cocycle& a) {
  const FiniteBase& base = a.base();
  std::vector<Matrix> generators;
  generators.reserve(base.size());
  for (Atom x = 0; x < base.size(); ++x) generators.push_back(a.inverse_at(base.apply_inverse(x)));
  return Cocycle(std::make_shared<const FiniteBase>(base.inverse()), std::move(generators));
}

Cocycle pointwise_inverse(const Cocycle& a) { return Cocycle(a.shared_base(), a.inverses()); }

Cocycle scale(const Cocycle& a, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale: factor must be positive");
  std::vector<Matrix> generators;
  generators.reserve(a.generators().size());
  for (const auto& m : a.generators()) generators.push_back(c * m);
  return Cocycle(a.shared_base(), std::move(generators));
}

IntegrabilityReport integrability(const Cocycle& a) {
  const FiniteBase& base = a.base();
  std::vector<double> plus(base.size());
  std::vector<double> plus_inverse(base.size());
  for (Atom x = 0; x < base.size(); ++x) {
    plus[x] = log_plus(operator_norm(a.at(x)));
    plus_inverse[x] = log_plus(operator_norm(a.inverse_at(x)));
  }
  IntegrabilityReport report;
  report.int_log_plus = base.integrate(plus);
  report.int_log_plus_inverse = base.integrate(plus_inverse);
  report.integrable =
      std::isfinite(report.int_log_plus) && std::isfinite(report.int_log_plus_inverse);
  return report;
}

Cocycle perturb_on_set(const Cocycle& a, const std::map<Atom, Matrix>& rotations) {
  std::vector<Matrix> generators = a.generators();
  for (const auto& [x, r] : rotations) {
    if (x >= generators.size()) throw DomainError("perturb_on_set: atom out of range");
    if (r.rows() != a.dimension() || r.cols() != a.dimension()) {
      throw DomainError("perturb_on_set: perturbation has the wrong dimension");
    }
    require_invertible(r, "perturb_on_set");
    generators[x] = r * generators[x];
  }
  return Cocycle(a.shared_base(), std::move(generators));
}

SymbolicCocycle::SymbolicCocycle(std::shared_ptr<const SampledBase> base,
                                 std::vector<Matrix> by_symbol)
    : base_(std::move(base)), by_symbol_(std::move(by_symbol)) {
  if (!base_) throw DomainError("SymbolicCocycle: missing base");
  if (by_symbol_.size() != base_->alphabet_size()) {
    throw DomainError("SymbolicCocycle: need one matrix per symbol");
  }
  dimension_ = checked_dimension(by_symbol_, "SymbolicCocycle");
  inverses_ = inverses_of(by_symbol_);
}

const Matrix& SymbolicCocycle::at(const SymbolicPoint& x) const {
  return by_symbol_[static_cast<std::size_t>(x.symbol())];
}

const Matrix& SymbolicCocycle::inverse_at(const SymbolicPoint& x) const {
  return inverses_[static_cast<std::size_t>(x.symbol())];
}

Matrix SymbolicCocycle::product(const SymbolicPoint& x, std::size_t n) const {
  Matrix p = Matrix::Identity(dimension_, dimension_);
  for (std::size_t i = 0; i < n; ++i) {
    p = by_symbol_[static_cast<std::size_t>(x.symbol(static_cast<std::int64_t>(i)))] * p;
    if (!p.allFinite()) throw ProductOverflow("SymbolicCocycle::product overflowed");
  }
  return p;
}

IntegrabilityReport integrability(const SymbolicCocycle& a) {
  IntegrabilityReport report;
  const auto& pi = a.base().stationary();
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const Matrix& m = a.by_symbol()[s];
    report.int_log_plus += pi[s] * log_plus(operator_norm(m));
    report.int_log_plus_inverse += pi[s] * log_plus(operator_norm(m.partialPivLu().inverse()));
  }
  report.integrable =
      std::isfinite(report.int_log_plus) && std::isfinite(report.int_log_plus_inverse);
  return report;
}

}  // namespace cocylab
