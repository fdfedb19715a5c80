#pragma once

// States on l2(domain) built from finite density parts and ultralimit atoms
// lim_{j -> U} rho_{e_{j+k}}, the shift channel they transform under, and the
// checkers for singularity, sigma-additivity, excision and purity.
//
// Observables are restricted to the representable algebra: a finite Hermitian
// block, a step-function diagonal, and optionally a diagonal vanishing at
// infinity. Off-diagonal terms of shifted vector states pair to zero with
// every representable observable along a non-principal ultrafilter, so atoms
// are stored diagonally.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pettis/operator_core.hpp"
#include "pettis/ultrafilter.hpp"

namespace pettis::symbolic {

using sets::DomainPtr;
using sets::Int;
using sets::SetExpr;
using sets::StepFunction;
using sets::TwoValuedMeasure;
using sets::UltrafilterOracle;

// Hermitian matrix on finitely many basis indices, zero elsewhere.
struct FiniteBlock {
  std::vector<Int> indices;
  Matrix matrix;
};

// value(j) = coefficient / (1 + |j - center|)^power, power > 0.
struct VanishingDiagonal {
  Complex coefficient = 1.0;
  double power = 1.0;
  Int center = 0;

  Complex value(Int j) const;
  // {j : |value(j)| > eps}; finite, and growing as eps shrinks.
  std::vector<Int> exception_set(double eps) const;
};

class SymbolicObservable {
 public:
  SymbolicObservable(DomainPtr domain, std::optional<FiniteBlock> block, StepFunction step,
                     std::optional<VanishingDiagonal> vanishing = std::nullopt);

  static SymbolicObservable identity(DomainPtr domain);
  static SymbolicObservable zero(DomainPtr domain);
  static SymbolicObservable step(StepFunction f);
  // Diagonal projector onto a set.
  static SymbolicObservable step_projector(DomainPtr domain, const SetExpr& e);
  // Projector onto the span of finitely many basis vectors.
  static SymbolicObservable finite_projector(DomainPtr domain, std::vector<Int> indices);
  static SymbolicObservable block(DomainPtr domain, std::vector<Int> indices, Matrix matrix);
  static SymbolicObservable vanishing(DomainPtr domain, VanishingDiagonal v);

  const DomainPtr& domain() const { return domain_; }
  const std::optional<FiniteBlock>& finite_block() const { return block_; }
  const StepFunction& step_diag() const { return step_; }
  const std::optional<VanishingDiagonal>& vanishing_diag() const { return vanishing_; }

  // Finite block and vanishing diagonal only; the step part is zero.
  bool is_compact_type() const;
  // (e_i, A e_j).
  Complex entry(Int i, Int j) const;
  Matrix restrict_to(const std::vector<Int>& support) const;

 private:
  DomainPtr domain_;
  std::optional<FiniteBlock> block_;
  StepFunction step_;
  std::optional<VanishingDiagonal> vanishing_;
};

struct DensityPart {
  std::vector<Int> support;
  DensityState matrix;
};

struct UltralimitAtom {
  UltrafilterOracle oracle;
  Int offset = 0;
};

struct Component {
  double weight;
  std::variant<DensityPart, UltralimitAtom> part;
};

class SymbolicState {
 public:
  SymbolicState(DomainPtr domain, std::vector<Component> components);

  // Vector state of sum_i amplitudes[i] e_{indices[i]}; the vector must be a
  // unit vector with distinct indices.
  static SymbolicState vector_state(DomainPtr domain, std::vector<Int> indices,
                                    std::vector<Complex> amplitudes);
  static SymbolicState density(DomainPtr domain, std::vector<Int> support, DensityState matrix);
  static SymbolicState atom(UltrafilterOracle oracle, Int offset = 0);
  static SymbolicState mixture(const std::vector<double>& weights,
                               const std::vector<SymbolicState>& states);

  const DomainPtr& domain() const { return domain_; }
  const std::vector<Component>& components() const { return components_; }
  std::string describe() const;

 private:
  DomainPtr domain_;
  std::vector<Component> components_;
};

class ShiftMeasure {
 public:
  enum class Kind { kTwoValued, kFinitelySupported, kConvexOfTwoValued };

  static ShiftMeasure two_valued(TwoValuedMeasure mu);
  static ShiftMeasure finitely_supported(std::vector<std::pair<Int, double>> points);
  static ShiftMeasure convex(std::vector<std::pair<double, TwoValuedMeasure>> parts);

  Kind kind() const { return kind_; }
  const std::vector<std::pair<Int, double>>& points() const { return points_; }
  const std::vector<std::pair<double, TwoValuedMeasure>>& parts() const { return parts_; }
  // mu(E); finitely supported measures need the domain for point membership.
  double measure(const sets::Domain& domain, const SetExpr& e) const;

 private:
  Kind kind_ = Kind::kFinitelySupported;
  std::vector<std::pair<Int, double>> points_;
  std::vector<std::pair<double, TwoValuedMeasure>> parts_;
};

inline constexpr double kEvalTol = 1e-12;

// The pairing <state, A>. Atoms read the step part through the ultralimit
// along U - k and contribute 0 from the finite block and the vanishing
// diagonal, both checked against the oracle rather than assumed.
Complex evaluate(const SymbolicState& state, const SymbolicObservable& obs);
Complex evaluate(const Component& component, const SymbolicObservable& obs);

// Phi_mu rho = integral of S_j rho S_j^* dmu(j). Two-valued measures map a
// density part to sum_a rho_aa Atom(U, k_a). Errors: kUnsupportedInput for
// atoms under a non-principal two-valued measure, whose iterated limit has no
// representation here.
SymbolicState shift_channel_apply(const ShiftMeasure& mu, const SymbolicState& state);

struct SingularityVerdict {
  bool singular = true;
  std::optional<std::size_t> failing_witness;
  Complex witness_value = 0.0;
  std::string reason;
};

SingularityVerdict is_singular_on_representables(const SymbolicState& state,
                                                 const std::vector<SymbolicObservable>& witnesses);

struct YosidaHewittSplit {
  double lambda = 0.0;
  // Supremum of <state, P> over the finite projectors inventory plus the
  // support projector of every density part.
  double lambda_sup = 0.0;
  std::optional<SymbolicState> normal;
  std::optional<SymbolicState> singular;
};

YosidaHewittSplit yosida_hewitt_split(const SymbolicState& state,
                                      const std::vector<std::vector<Int>>& finite_projectors = {});
SymbolicState recombine(const YosidaHewittSplit& split);

struct SigmaVerdict {
  bool additive = false;
  Complex lhs = 0.0;
  Complex rhs = 0.0;
  std::vector<Int> cells;
};

// Errors: kPartitionNotRegistered.
SigmaVerdict sigma_additivity_check(const SymbolicState& state,
                                    const sets::CountablePartition& partition);

// P A P == <state, A> P in the representable algebra. Errors: kFilterViolation
// when <state, P> != 1; kUnsupportedInput for vanishing diagonals.
bool excises(const SymbolicObservable& p, const SymbolicState& state, const SymbolicObservable& a);

struct ExcisionWitness {
  double eps;
  SetExpr set;
  double norm;
};

struct PurityVerdict {
  bool pure = false;
  Complex value = 0.0;
  std::vector<ExcisionWitness> witnesses;
  // NOT-PURE: a projector one component sees as 1 and another as 0.
  std::optional<SetExpr> distinguishing;
  std::size_t first = 0;
  std::size_t second = 0;
};

// Errors: kInconclusiveAlgebra when neither an excision nor a distinguishing
// projector is found among the candidates.
PurityVerdict purity_check_diagonal(const SymbolicState& state, const SymbolicObservable& a,
                                    const std::vector<double>& eps_schedule,
                                    const std::vector<SetExpr>& candidates = {});

struct NonTwoValuedSplit {
  SymbolicState rho_a;
  SymbolicState rho_b;
  double weight_a;
  double weight_b;
  SetExpr witness;
  Complex value_a;
  Complex value_b;
};

// Errors: kNotIntermediate when mu(A) is 0 or 1.
NonTwoValuedSplit split_nontwovalued(const ShiftMeasure& mu, const SetExpr& a,
                                     const SymbolicState& vector_state,
                                     const std::vector<SetExpr>& candidates = {});

struct BarycentricResult {
  double max_deviation = 0.0;
  double frobenius = 0.0;
};

// Finite model on Z_n: Phi_mu applied to the mixture versus the mixture of
// Phi_mu applied to each vector state.
BarycentricResult barycentric_equivalence_check(
    const ShiftMeasure& mu, int n, const std::vector<std::pair<double, Vector>>& mixture,
    const std::vector<Matrix>& observables);

struct ConvexDecomposition {
  std::size_t first;
  std::size_t second;
  double t;
};

// Searches the inventory for distinct states a, b with t a + (1 - t) b equal
// to the state on every probe.
std::optional<ConvexDecomposition> find_convex_decomposition(
    const SymbolicState& state, const std::vector<SymbolicState>& inventory,
    const std::vector<SymbolicObservable>& probes);

}  // namespace pettis::symbolic
