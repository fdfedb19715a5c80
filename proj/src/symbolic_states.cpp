#include "pettis/symbolic_states.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pettis/channels.hpp"
#include "pettis/error.hpp"
#include "pettis/group_measure.hpp"

namespace pettis::symbolic {
namespace {

const std::vector<double> kVanishingSchedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

void require_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a.get() != b.get()) {
    fail(ErrorCode::kInvalidArgument,
         "state and observable live on different domains (" + a->name() + ", " + b->name() + ")");
  }
}

}  // namespace

Complex VanishingDiagonal::value(Int j) const {
  const double d = static_cast<double>(j > center ? j - center : center - j);
  return coefficient / std::pow(1.0 + d, power);
}

std::vector<Int> VanishingDiagonal::exception_set(double eps) const {
  if (!(power > 0.0)) fail(ErrorCode::kInvalidArgument, "vanishing diagonal needs power > 0");
  const double c = std::abs(coefficient);
  std::vector<Int> out;
  if (c <= eps) return out;
  const double radius = std::pow(c / eps, 1.0 / power);
  if (radius > 1e6) fail(ErrorCode::kTermBudgetExceeded, "vanishing exception set too large");
  const Int r = static_cast<Int>(std::ceil(radius));
  for (Int d = -r; d <= r; ++d) {
    if (std::abs(value(center + d)) > eps) out.push_back(center + d);
  }
  return out;
}

SymbolicObservable::SymbolicObservable(DomainPtr domain, std::optional<FiniteBlock> block,
                                       StepFunction step,
                                       std::optional<VanishingDiagonal> vanishing)
    : domain_(std::move(domain)),
      block_(std::move(block)),
      step_(std::move(step)),
      vanishing_(std::move(vanishing)) {
  require_domain(domain_, step_.domain());
  if (block_) {
    const auto n = static_cast<Index>(block_->indices.size());
    if (n == 0 || block_->matrix.rows() != n || block_->matrix.cols() != n) {
      fail(ErrorCode::kDimensionMismatch, "finite block needs an n x n matrix for n indices");
    }
    if (!is_hermitian(block_->matrix)) fail(ErrorCode::kInvariantViolation, "finite block is not Hermitian");
    std::set<Int> seen(block_->indices.begin(), block_->indices.end());
    if (seen.size() != block_->indices.size()) {
      fail(ErrorCode::kInvalidArgument, "finite block indices repeat");
    }
  }
  if (vanishing_ && !(vanishing_->power > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "vanishing diagonal needs power > 0");
  }
}

SymbolicObservable SymbolicObservable::identity(DomainPtr domain) {
  auto f = StepFunction::constant(domain, 1.0);
  return SymbolicObservable(std::move(domain), std::nullopt, std::move(f));
}

SymbolicObservable SymbolicObservable::zero(DomainPtr domain) {
  auto f = StepFunction::constant(domain, 0.0);
  return SymbolicObservable(std::move(domain), std::nullopt, std::move(f));
}

SymbolicObservable SymbolicObservable::step(StepFunction f) {
  DomainPtr d = f.domain();
  return SymbolicObservable(std::move(d), std::nullopt, std::move(f));
}

SymbolicObservable SymbolicObservable::step_projector(DomainPtr domain, const SetExpr& e) {
  return step(StepFunction::indicator(std::move(domain), e));
}

SymbolicObservable SymbolicObservable::finite_projector(DomainPtr domain, std::vector<Int> indices) {
  const auto n = static_cast<Index>(indices.size());
  return block(std::move(domain), std::move(indices), Matrix::Identity(n, n));
}

SymbolicObservable SymbolicObservable::block(DomainPtr domain, std::vector<Int> indices, Matrix matrix) {
  auto f = StepFunction::constant(domain, 0.0);
  return SymbolicObservable(std::move(domain), FiniteBlock{std::move(indices), std::move(matrix)},
                            std::move(f));
}

SymbolicObservable SymbolicObservable::vanishing(DomainPtr domain, VanishingDiagonal v) {
  auto f = StepFunction::constant(domain, 0.0);
  return SymbolicObservable(std::move(domain), std::nullopt, std::move(f), v);
}

bool SymbolicObservable::is_compact_type() const {
  return std::all_of(step_.values().begin(), step_.values().end(),
                     [](const Complex& v) { return v == Complex(0.0, 0.0); });
}

Complex SymbolicObservable::entry(Int i, Int j) const {
  Complex v = 0.0;
  if (block_) {
    const auto& idx = block_->indices;
    auto a = std::find(idx.begin(), idx.end(), i);
    auto b = std::find(idx.begin(), idx.end(), j);
    if (a != idx.end() && b != idx.end()) v += block_->matrix(a - idx.begin(), b - idx.begin());
  }
  if (i == j) {
    v += step_.value_at(i);
    if (vanishing_) v += vanishing_->value(i);
  }
  return v;
}

Matrix SymbolicObservable::restrict_to(const std::vector<Int>& support) const {
  const auto n = static_cast<Index>(support.size());
  Matrix m(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) m(a, b) = entry(support[a], support[b]);
  }
  return m;
}

SymbolicState::SymbolicState(DomainPtr domain, std::vector<Component> components)
    : domain_(std::move(domain)) {
  double total = 0.0;
  for (auto& c : components) {
    if (!(c.weight >= 0.0)) fail(ErrorCode::kInvariantViolation, "negative component weight");
    if (c.weight == 0.0) continue;
    if (const auto* d = std::get_if<DensityPart>(&c.part)) {
      if (static_cast<Index>(d->support.size()) != d->matrix.dim()) {
        fail(ErrorCode::kDimensionMismatch, "density part support does not match its matrix");
      }
      std::set<Int> seen(d->support.begin(), d->support.end());
      if (seen.size() != d->support.size()) fail(ErrorCode::kInvalidArgument, "support repeats");
    } else {
      const auto& a = std::get<UltralimitAtom>(c.part);
      if (a.oracle.domain().get() != domain_.get()) {
        fail(ErrorCode::kInvalidArgument, "atom oracle lives on another domain");
      }
    }
    total += c.weight;
    components_.push_back(std::move(c));
  }
  if (components_.empty()) fail(ErrorCode::kInvariantViolation, "state without components");
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::kInvariantViolation, "state weights sum to " + std::to_string(total));
  }
}

SymbolicState SymbolicState::vector_state(DomainPtr domain, std::vector<Int> indices,
                                          std::vector<Complex> amplitudes) {
  if (indices.size() != amplitudes.size() || indices.empty()) {
    fail(ErrorCode::kInvalidArgument, "vector state needs one amplitude per index");
  }
  Vector u(static_cast<Index>(amplitudes.size()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) u(static_cast<Index>(i)) = amplitudes[i];
  return density(std::move(domain), std::move(indices), pettis::vector_state(u));
}

SymbolicState SymbolicState::density(DomainPtr domain, std::vector<Int> support, DensityState matrix) {
  return SymbolicState(std::move(domain), {{1.0, DensityPart{std::move(support), std::move(matrix)}}});
}

SymbolicState SymbolicState::atom(UltrafilterOracle oracle, Int offset) {
  DomainPtr d = oracle.domain();
  return SymbolicState(std::move(d), {{1.0, UltralimitAtom{std::move(oracle), offset}}});
}

SymbolicState SymbolicState::mixture(const std::vector<double>& weights,
                                     const std::vector<SymbolicState>& states) {
  if (weights.size() != states.size() || states.empty()) {
    fail(ErrorCode::kInvalidArgument, "mixture needs one weight per state");
  }
  std::vector<Component> comps;
  for (std::size_t i = 0; i < states.size(); ++i) {
    require_domain(states[i].domain(), states.front().domain());
    for (const auto& c : states[i].components()) comps.push_back({weights[i] * c.weight, c.part});
  }
  return SymbolicState(states.front().domain(), std::move(comps));
}

std::string SymbolicState::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    os << (i ? " + " : "") << c.weight << "*";
    if (const auto* d = std::get_if<DensityPart>(&c.part)) {
      os << "rho{";
      for (std::size_t k = 0; k < d->support.size(); ++k) os << (k ? "," : "") << d->support[k];
      os << "}";
    } else {
      const auto& a = std::get<UltralimitAtom>(c.part);
      os << "Atom(" << a.oracle.describe() << "," << a.offset << ")";
    }
  }
  return os.str();
}

ShiftMeasure ShiftMeasure::two_valued(TwoValuedMeasure mu) {
  ShiftMeasure m;
  m.kind_ = Kind::kTwoValued;
  m.parts_.emplace_back(1.0, std::move(mu));
  return m;
}

ShiftMeasure ShiftMeasure::finitely_supported(std::vector<std::pair<Int, double>> points) {
  double total = 0.0;
  for (const auto& [j, w] : points) {
    if (!(w >= 0.0)) fail(ErrorCode::kInvariantViolation, "negative shift weight");
    total += w;
  }
  if (points.empty() || std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::kInvariantViolation, "shift weights sum to " + std::to_string(total));
  }
  ShiftMeasure m;
  m.kind_ = Kind::kFinitelySupported;
  m.points_ = std::move(points);
  return m;
}

ShiftMeasure ShiftMeasure::convex(std::vector<std::pair<double, TwoValuedMeasure>> parts) {
  double total = 0.0;
  for (const auto& [w, mu] : parts) {
    if (!(w >= 0.0)) fail(ErrorCode::kInvariantViolation, "negative convex weight");
    total += w;
  }
  if (parts.empty() || std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::kInvariantViolation, "convex weights sum to " + std::to_string(total));
  }
  ShiftMeasure m;
  m.kind_ = Kind::kConvexOfTwoValued;
  m.parts_ = std::move(parts);
  return m;
}

double ShiftMeasure::measure(const sets::Domain& domain, const SetExpr& e) const {
  double total = 0.0;
  if (kind_ == Kind::kFinitelySupported) {
    for (const auto& [j, w] : points_) {
      if (domain.contains_point(e, j)) total += w;
    }
  } else {
    for (const auto& [w, mu] : parts_) total += w * mu.measure(e);
  }
  return total;
}

Complex evaluate(const Component& component, const SymbolicObservable& obs) {
  if (const auto* d = std::get_if<DensityPart>(&component.part)) {
    return (d->matrix.matrix() * obs.restrict_to(d->support)).trace();
  }
  const auto& atom = std::get<UltralimitAtom>(component.part);
  require_domain(atom.oracle.domain(), obs.domain());
  // lim_{j -> U} (e_{j+k}, A e_{j+k}) is the limit of A's diagonal along U - k.
  const UltrafilterOracle view = atom.oracle.shift_pushforward(-atom.offset);
  if (const auto q = view.principal_point()) return obs.entry(*q, *q);

  Complex value = sets::ultralimit(view, obs.step_diag());
  if (const auto& block = obs.finite_block()) {
    if (view.decide(SetExpr::points(block->indices))) {
      fail(ErrorCode::kInconsistentOracle,
           "non-principal oracle " + view.describe() + " contains the finite block support");
    }
  }
  if (const auto& v = obs.vanishing_diag()) {
    for (double eps : kVanishingSchedule) {
      if (view.decide(SetExpr::points(v->exception_set(eps)))) {
        fail(ErrorCode::kInconsistentOracle, "oracle " + view.describe() +
                                                 " contains the exception set at eps " +
                                                 std::to_string(eps));
      }
    }
  }
  return value;
}

Complex evaluate(const SymbolicState& state, const SymbolicObservable& obs) {
  require_domain(state.domain(), obs.domain());
  Complex total = 0.0;
  for (const auto& c : state.components()) total += c.weight * evaluate(c, obs);
  return total;
}

namespace {

void apply_two_valued(const UltrafilterOracle& u, double scale, const Component& c,
                      std::vector<Component>& out) {
  if (const auto p = u.principal_point()) {
    if (const auto* d = std::get_if<DensityPart>(&c.part)) {
      DensityPart shifted = *d;
      for (auto& x : shifted.support) x += *p;
      out.push_back({scale * c.weight, std::move(shifted)});
    } else {
      UltralimitAtom a = std::get<UltralimitAtom>(c.part);
      a.offset += *p;
      out.push_back({scale * c.weight, std::move(a)});
    }
    return;
  }
  const auto* d = std::get_if<DensityPart>(&c.part);
  if (!d) {
    fail(ErrorCode::kUnsupportedInput,
         "a non-principal two-valued shift measure applied to an ultralimit atom produces an "
         "iterated limit with no representation here");
  }
  for (std::size_t a = 0; a < d->support.size(); ++a) {
    const double w = d->matrix.matrix()(static_cast<Index>(a), static_cast<Index>(a)).real();
    if (w > 1e-15) out.push_back({scale * c.weight * w, UltralimitAtom{u, d->support[a]}});
  }
}

SymbolicState renormalized(const DomainPtr& domain, std::vector<Component> comps) {
  double total = 0.0;
  for (const auto& c : comps) total += c.weight;
  for (auto& c : comps) c.weight /= total;
  return SymbolicState(domain, std::move(comps));
}

}  // namespace

SymbolicState shift_channel_apply(const ShiftMeasure& mu, const SymbolicState& state) {
  std::vector<Component> out;
  switch (mu.kind()) {
    case ShiftMeasure::Kind::kFinitelySupported:
      for (const auto& c : state.components()) {
        for (const auto& [j, w] : mu.points()) {
          if (w == 0.0) continue;
          if (const auto* d = std::get_if<DensityPart>(&c.part)) {
            DensityPart shifted = *d;
            for (auto& x : shifted.support) x += j;
            out.push_back({c.weight * w, std::move(shifted)});
          } else {
            UltralimitAtom a = std::get<UltralimitAtom>(c.part);
            a.offset += j;
            out.push_back({c.weight * w, std::move(a)});
          }
        }
      }
      break;
    case ShiftMeasure::Kind::kTwoValued:
    case ShiftMeasure::Kind::kConvexOfTwoValued:
      for (const auto& [w, m] : mu.parts()) {
        if (m.oracle().domain().get() != state.domain().get()) {
          fail(ErrorCode::kInvalidArgument, "shift measure and state on different domains");
        }
        if (w == 0.0) continue;
        for (const auto& c : state.components()) apply_two_valued(m.oracle(), w, c, out);
      }
      break;
  }
  return renormalized(state.domain(), std::move(out));
}

SingularityVerdict is_singular_on_representables(const SymbolicState& state,
                                                 const std::vector<SymbolicObservable>& witnesses) {
  SingularityVerdict v;
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    if (!witnesses[i].is_compact_type()) {
      fail(ErrorCode::kInvalidArgument, "singularity witness " + std::to_string(i) +
                                            " has a nonzero step diagonal");
    }
    const Complex value = evaluate(state, witnesses[i]);
    if (std::abs(value) > kEvalTol) {
      v.singular = false;
      v.failing_witness = i;
      v.witness_value = value;
      v.reason = "witness " + std::to_string(i) + " evaluates to a nonzero value";
      return v;
    }
  }
  double lambda = 0.0;
  std::vector<Int> support;
  for (const auto& c : state.components()) {
    if (const auto* d = std::get_if<DensityPart>(&c.part)) {
      lambda += c.weight;
      support.insert(support.end(), d->support.begin(), d->support.end());
    } else if (const auto q = std::get<UltralimitAtom>(c.part).oracle.shift_pushforward(
                   -std::get<UltralimitAtom>(c.part).offset).principal_point()) {
      lambda += c.weight;
      support.push_back(*q);
    }
  }
  if (lambda > 0.0) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    v.singular = false;
    v.witness_value = evaluate(state, SymbolicObservable::finite_projector(state.domain(), support));
    v.reason = "state has a normal part of weight " + std::to_string(lambda);
  }
  return v;
}

YosidaHewittSplit yosida_hewitt_split(const SymbolicState& state,
                                      const std::vector<std::vector<Int>>& finite_projectors) {
  YosidaHewittSplit s;
  std::vector<Component> normal, singular;
  std::vector<std::vector<Int>> inventory = finite_projectors;
  std::vector<Int> all_support;
  for (const auto& c : state.components()) {
    Component part = c;
    // A principal atom is the vector state of its point.
    if (const auto* a = std::get_if<UltralimitAtom>(&c.part)) {
      if (const auto q = a->oracle.shift_pushforward(-a->offset).principal_point()) {
        part.part = DensityPart{{*q}, DensityState(Matrix::Identity(1, 1))};
      }
    }
    if (const auto* d = std::get_if<DensityPart>(&part.part)) {
      s.lambda += c.weight;
      inventory.push_back(d->support);
      all_support.insert(all_support.end(), d->support.begin(), d->support.end());
      normal.push_back(std::move(part));
    } else {
      singular.push_back(std::move(part));
    }
  }
  if (!all_support.empty()) {
    std::sort(all_support.begin(), all_support.end());
    all_support.erase(std::unique(all_support.begin(), all_support.end()), all_support.end());
    inventory.push_back(all_support);
  }
  for (auto& idx : inventory) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    if (idx.empty()) continue;
    const Complex v = evaluate(state, SymbolicObservable::finite_projector(state.domain(), idx));
    s.lambda_sup = std::max(s.lambda_sup, v.real());
  }
  if (!normal.empty()) s.normal = renormalized(state.domain(), std::move(normal));
  if (!singular.empty()) s.singular = renormalized(state.domain(), std::move(singular));
  return s;
}

SymbolicState recombine(const YosidaHewittSplit& split) {
  if (split.normal && split.singular) {
    return SymbolicState::mixture({split.lambda, 1.0 - split.lambda}, {*split.normal, *split.singular});
  }
  if (split.normal) return *split.normal;
  if (split.singular) return *split.singular;
  fail(ErrorCode::kInvalidArgument, "empty Yosida-Hewitt split");
}

SigmaVerdict sigma_additivity_check(const SymbolicState& state,
                                    const sets::CountablePartition& partition) {
  const auto& domain = *state.domain();
  SigmaVerdict v;
  v.lhs = evaluate(state, SymbolicObservable::identity(state.domain()));
  std::set<Int> cells;
  for (const auto& c : state.components()) {
    if (const auto* d = std::get_if<DensityPart>(&c.part)) {
      for (Int x : d->support) {
        if (auto n = partition.cell_of_point(x)) {
          cells.insert(*n);
          continue;
        }
        for (Int n = 0; n < static_cast<Int>(partition.cells.size()); ++n) {
          if (domain.contains_point(partition.cell(n), x)) cells.insert(n);
        }
      }
    } else {
      const auto& a = std::get<UltralimitAtom>(c.part);
      const auto view = a.oracle.shift_pushforward(-a.offset);
      if (auto n = view.selected_cell(partition)) cells.insert(*n);
    }
  }
  for (Int n : cells) {
    v.rhs += evaluate(state, SymbolicObservable::step_projector(state.domain(), partition.cell(n)));
    v.cells.push_back(n);
  }
  v.additive = std::abs(v.lhs - v.rhs) <= kEvalTol;
  return v;
}

namespace {

// Element of the representable algebra: finite block plus step diagonal.
struct RepOp {
  DomainPtr domain;
  std::vector<Int> idx;
  Matrix block;
  std::vector<SetExpr> cells;
  std::vector<Complex> values;

  Complex diag_at(Int x) const {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (domain->contains_point(cells[i], x)) return values[i];
    }
    return 0.0;
  }
};

RepOp to_rep(const SymbolicObservable& o) {
  if (o.vanishing_diag()) {
    fail(ErrorCode::kUnsupportedInput, "excision with a vanishing diagonal is not representable");
  }
  RepOp r{o.domain(), {}, Matrix(), o.step_diag().cells(), o.step_diag().values()};
  if (o.finite_block()) {
    r.idx = o.finite_block()->indices;
    r.block = o.finite_block()->matrix;
  } else {
    r.block = Matrix(0, 0);
  }
  return r;
}

Matrix padded(const RepOp& r, const std::vector<Int>& idx) {
  const auto n = static_cast<Index>(idx.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < r.idx.size(); ++a) {
    const auto ia = std::find(idx.begin(), idx.end(), r.idx[a]) - idx.begin();
    for (std::size_t b = 0; b < r.idx.size(); ++b) {
      const auto ib = std::find(idx.begin(), idx.end(), r.idx[b]) - idx.begin();
      m(ia, ib) = r.block(static_cast<Index>(a), static_cast<Index>(b));
    }
  }
  return m;
}

Matrix diag_on(const RepOp& r, const std::vector<Int>& idx) {
  const auto n = static_cast<Index>(idx.size());
  Matrix m = Matrix::Zero(n, n);
  for (Index a = 0; a < n; ++a) m(a, a) = r.diag_at(idx[a]);
  return m;
}

std::vector<Int> merged_indices(const RepOp& x, const RepOp& y) {
  std::vector<Int> idx = x.idx;
  for (Int i : y.idx) {
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  return idx;
}

RepOp combine(const RepOp& x, const RepOp& y, bool multiply, Complex scale_y) {
  RepOp r{x.domain, merged_indices(x, y), Matrix(), {}, {}};
  const Matrix fx = padded(x, r.idx), fy = padded(y, r.idx);
  if (multiply) {
    const Matrix dx = diag_on(x, r.idx), dy = diag_on(y, r.idx);
    r.block = fx * fy + fx * dy + dx * fy;
  } else {
    r.block = fx + scale_y * fy;
  }
  for (std::size_t i = 0; i < x.cells.size(); ++i) {
    for (std::size_t j = 0; j < y.cells.size(); ++j) {
      SetExpr c = x.cells[i] & y.cells[j];
      if (x.domain->is_empty(c)) continue;
      r.cells.push_back(c);
      r.values.push_back(multiply ? x.values[i] * y.values[j] : x.values[i] + scale_y * y.values[j]);
    }
  }
  return r;
}

bool is_zero(const RepOp& r, double tol) {
  const SetExpr outside = ~SetExpr::points(r.idx);
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    if (std::abs(r.values[i]) > tol && !r.domain->is_empty(r.cells[i] & outside)) return false;
  }
  if (r.idx.empty()) return true;
  const Matrix total = r.block + diag_on(r, r.idx);
  return total.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

bool excises(const SymbolicObservable& p, const SymbolicState& state, const SymbolicObservable& a) {
  require_domain(state.domain(), p.domain());
  require_domain(state.domain(), a.domain());
  const Complex in_filter = evaluate(state, p);
  if (std::abs(in_filter - Complex(1.0, 0.0)) > kEvalTol) {
    fail(ErrorCode::kFilterViolation, "<state, P> = " + std::to_string(in_filter.real()) +
                                          ", so P is not in the quantum filter");
  }
  const RepOp rp = to_rep(p), ra = to_rep(a);
  if (!is_zero(combine(combine(rp, rp, true, 1.0), rp, false, -1.0), kEvalTol)) {
    fail(ErrorCode::kInvalidArgument, "excision operand P is not a projector");
  }
  const Complex value = evaluate(state, a);
  const RepOp pap = combine(combine(rp, ra, true, 1.0), rp, true, 1.0);
  return is_zero(combine(pap, rp, false, -value), kEvalTol);
}

namespace {

bool same_component(const Component& x, const Component& y) {
  if (x.part.index() != y.part.index()) return false;
  if (const auto* a = std::get_if<UltralimitAtom>(&x.part)) {
    const auto& b = std::get<UltralimitAtom>(y.part);
    return a->oracle.core_id() == b.oracle.core_id() &&
           a->oracle.offset() - a->offset == b.oracle.offset() - b.offset;
  }
  const auto& a = std::get<DensityPart>(x.part);
  const auto& b = std::get<DensityPart>(y.part);
  return a.support == b.support && (a.matrix.matrix() - b.matrix.matrix()).norm() < kEvalTol;
}

std::vector<Component> merged_components(const SymbolicState& s) {
  std::vector<Component> out;
  for (const auto& c : s.components()) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Component& o) { return same_component(o, c); });
    if (it != out.end()) {
      it->weight += c.weight;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::optional<Complex> try_evaluate(const Component& c, const SymbolicObservable& o) {
  try {
    return evaluate(c, o);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUndecidableInFreeRule) return std::nullopt;
    throw;
  }
}

std::vector<SetExpr> candidate_sets(const SymbolicState& state, const SymbolicObservable* a,
                                    const std::vector<SetExpr>& extra) {
  std::vector<SetExpr> out = extra;
  if (a) {
    for (const auto& c : a->step_diag().cells()) out.push_back(c);
  }
  for (const auto& g : state.domain()->generator_names()) {
    out.push_back(SetExpr::generator(g));
    out.push_back(~SetExpr::generator(g));
  }
  return out;
}

}  // namespace

PurityVerdict purity_check_diagonal(const SymbolicState& state, const SymbolicObservable& a,
                                    const std::vector<double>& eps_schedule,
                                    const std::vector<SetExpr>& candidates) {
  require_domain(state.domain(), a.domain());
  if (a.finite_block() || a.vanishing_diag()) {
    fail(ErrorCode::kInvalidArgument, "purity check needs a step-diagonal observable");
  }
  for (std::size_t i = 1; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] < eps_schedule[i - 1]) || !(eps_schedule[i] > 0.0)) {
      fail(ErrorCode::kInvalidArgument, "eps schedule must be positive and decreasing");
    }
  }
  PurityVerdict verdict;
  verdict.value = evaluate(state, a);
  const auto comps = merged_components(state);
  if (comps.size() == 1) {
    const auto& c = comps.front();
    if (const auto* atom = std::get_if<UltralimitAtom>(&c.part)) {
      const UltrafilterOracle view = atom->oracle.shift_pushforward(-atom->offset);
      const auto& f = a.step_diag();
      for (double eps : eps_schedule) {
        std::optional<SetExpr> near;
        double norm = 0.0;
        for (std::size_t i = 0; i < f.cells().size(); ++i) {
          const double gap = std::abs(f.values()[i] - verdict.value);
          if (gap < eps && !state.domain()->is_empty(f.cells()[i])) {
            near = near ? (*near | f.cells()[i]) : f.cells()[i];
            norm = std::max(norm, gap);
          }
        }
        const SetExpr x_eps = near.value_or(SetExpr::empty());
        if (!view.decide(x_eps)) {
          fail(ErrorCode::kInconsistentOracle, "X_eps at eps " + std::to_string(eps) +
                                                   " is not in " + view.describe());
        }
        const auto p = SymbolicObservable::step_projector(state.domain(), x_eps);
        if (std::abs(evaluate(state, p) - Complex(1.0, 0.0)) > kEvalTol || !(norm < eps)) {
          fail(ErrorCode::kInvariantViolation, "approximate excision fails at eps " + std::to_string(eps));
        }
        verdict.witnesses.push_back({eps, x_eps, norm});
      }
      verdict.pure = true;
      return verdict;
    }
    const auto& d = std::get<DensityPart>(c.part);
    if (d.support.size() == 1) {
      const auto p = SymbolicObservable::finite_projector(state.domain(), d.support);
      if (excises(p, state, a)) {
        for (double eps : eps_schedule) verdict.witnesses.push_back({eps, SetExpr::points(d.support), 0.0});
        verdict.pure = true;
        return verdict;
      }
    }
  }
  const auto sets = candidate_sets(state, &a, candidates);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (i == j) continue;
      for (const auto& s : sets) {
        const auto p = SymbolicObservable::step_projector(state.domain(), s);
        const auto vi = try_evaluate(comps[i], p);
        const auto vj = try_evaluate(comps[j], p);
        if (vi && vj && *vi == Complex(1.0, 0.0) && *vj == Complex(0.0, 0.0)) {
          verdict.pure = false;
          verdict.distinguishing = s;
          verdict.first = i;
          verdict.second = j;
          return verdict;
        }
      }
    }
  }
  fail(ErrorCode::kInconclusiveAlgebra,
       "no excision projector and no distinguishing projector among " + std::to_string(sets.size()) +
           " candidate sets for " + state.describe());
}

NonTwoValuedSplit split_nontwovalued(const ShiftMeasure& mu, const SetExpr& a,
                                     const SymbolicState& vector_state,
                                     const std::vector<SetExpr>& candidates) {
  if (mu.kind() == ShiftMeasure::Kind::kFinitelySupported) {
    fail(ErrorCode::kNotIntermediate, "split needs a convex combination of two-valued measures");
  }
  std::vector<std::pair<double, TwoValuedMeasure>> in_a, in_b;
  double weight_a = 0.0;
  for (const auto& [w, m] : mu.parts()) {
    if (m.measure(a) == 1.0) {
      in_a.emplace_back(w, m);
      weight_a += w;
    } else {
      in_b.emplace_back(w, m);
    }
  }
  if (in_a.empty() || in_b.empty()) {
    fail(ErrorCode::kNotIntermediate, "mu(" + a.to_string() + ") = " + std::to_string(weight_a) +
                                          " is not strictly between 0 and 1");
  }
  auto normalized = [](std::vector<std::pair<double, TwoValuedMeasure>> parts) {
    double total = 0.0;
    for (const auto& p : parts) total += p.first;
    for (auto& p : parts) p.first /= total;
    return ShiftMeasure::convex(std::move(parts));
  };
  const double weight_b = 1.0 - weight_a;
  SymbolicState rho_a = shift_channel_apply(normalized(in_a), vector_state);
  SymbolicState rho_b = shift_channel_apply(normalized(in_b), vector_state);

  std::vector<SetExpr> sets;
  if (vector_state.components().size() == 1) {
    if (const auto* d = std::get_if<DensityPart>(&vector_state.components().front().part)) {
      if (d->support.size() == 1) sets.push_back(SetExpr::shift(d->support.front(), a));
    }
  }
  sets.push_back(a);
  for (const auto& s : candidate_sets(vector_state, nullptr, candidates)) sets.push_back(s);
  for (const auto& s : sets) {
    const auto p = SymbolicObservable::step_projector(vector_state.domain(), s);
    Complex va, vb;
    try {
      va = evaluate(rho_a, p);
      vb = evaluate(rho_b, p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUndecidableInFreeRule) continue;
      throw;
    }
    if (va == Complex(1.0, 0.0) && vb == Complex(0.0, 0.0)) {
      return {std::move(rho_a), std::move(rho_b), weight_a, weight_b, s, va, vb};
    }
  }
  fail(ErrorCode::kInconclusiveAlgebra, "no projector separates the conditional outputs");
}

BarycentricResult barycentric_equivalence_check(
    const ShiftMeasure& mu, int n, const std::vector<std::pair<double, Vector>>& mixture,
    const std::vector<Matrix>& observables) {
  if (mu.kind() != ShiftMeasure::Kind::kFinitelySupported) {
    fail(ErrorCode::kInvalidArgument, "barycentric check needs a finitely supported measure");
  }
  if (mixture.empty()) fail(ErrorCode::kInvalidArgument, "empty mixture");
  auto group = FiniteGroup::cyclic(n);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (const auto& [j, x] : mu.points()) w[static_cast<std::size_t>(((j % n) + n) % n)] += x;
  const QuantumChannel phi =
      group_average_channel(regular_representation(group), GroupMeasure(group, std::move(w)));

  Matrix mixed = Matrix::Zero(n, n);
  Matrix averaged = Matrix::Zero(n, n);
  double total = 0.0;
  for (const auto& [nu, u] : mixture) {
    if (u.size() != n) fail(ErrorCode::kDimensionMismatch, "mixture vector of wrong dimension");
    const DensityState rho = pettis::vector_state(u);
    mixed += nu * rho.matrix();
    averaged += nu * apply(phi, rho).matrix();
    total += nu;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::kInvalidArgument, "mixture weights must sum to 1");
  const Matrix lhs = apply(phi, DensityState(0.5 * (mixed + mixed.adjoint()))).matrix();
  BarycentricResult r;
  r.frobenius = (lhs - averaged).norm();
  for (const auto& a : observables) {
    r.max_deviation = std::max(r.max_deviation, std::abs(((lhs - averaged) * a).trace()));
  }
  return r;
}

std::optional<ConvexDecomposition> find_convex_decomposition(
    const SymbolicState& state, const std::vector<SymbolicState>& inventory,
    const std::vector<SymbolicObservable>& probes) {
  // Probes some inventory member cannot evaluate are dropped for everyone.
  std::vector<bool> usable(probes.size(), true);
  auto values = [&](const SymbolicState& s) {
    std::vector<std::optional<Complex>> v;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      try {
        v.push_back(evaluate(s, probes[k]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndecidableInFreeRule) throw;
        v.push_back(std::nullopt);
        usable[k] = false;
      }
    }
    return v;
  };
  const auto target = values(state);
  std::vector<std::vector<std::optional<Complex>>> inv;
  for (const auto& s : inventory) inv.push_back(values(s));

  auto distance = [&](const auto& x, const auto& y) {
    double d = 0.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      if (usable[k]) d = std::max(d, std::abs(*x[k] - *y[k]));
    }
    return d;
  };
  for (std::size_t i = 0; i < inv.size(); ++i) {
    for (std::size_t j = i + 1; j < inv.size(); ++j) {
      if (distance(inv[i], inv[j]) <= kEvalTol) continue;
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < probes.size(); ++k) {
        if (!usable[k]) continue;
        const Complex ab = *inv[i][k] - *inv[j][k];
        num += std::real(std::conj(ab) * (*target[k] - *inv[j][k]));
        den += std::norm(ab);
      }
      const double t = num / den;
      if (!(t > kEvalTol && t < 1.0 - kEvalTol)) continue;
      double err = 0.0;
      for (std::size_t k = 0; k < probes.size(); ++k) {
        if (usable[k]) {
          err = std::max(err, std::abs(t * *inv[i][k] + (1.0 - t) * *inv[j][k] - *target[k]));
        }
      }
      if (err <= kEvalTol) return ConvexDecomposition{i, j, t};
    }
  }
  return std::nullopt;
}

}  // namespace pettis::symbolic
