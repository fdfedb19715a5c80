#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pettis/error.hpp"
#include "pettis/random.hpp"
#include "pettis/symbolic_states.hpp"

using namespace pettis;
using namespace pettis::symbolic;
using sets::CountablePartition;
using sets::IntegerSet;
using sets::IntegersDomain;
using sets::KappaDomain;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

const SetExpr kX = SetExpr::generator("X");

struct Fixture {
  std::shared_ptr<IntegersDomain> z = std::make_shared<IntegersDomain>("Z");
  std::shared_ptr<KappaDomain> k = std::make_shared<KappaDomain>("K");
  CountablePartition singletons{"singletons", CountablePartition::Kind::kBlocks, 1, {}};
  CountablePartition cells{"cells", CountablePartition::Kind::kFamily, 1, {}};
  CountablePartition halves{"halves", CountablePartition::Kind::kExplicit, 1, {kX, ~kX}};
  std::optional<UltrafilterOracle> free_z, free_k, sigma_k;

  Fixture() {
    z->add_generator("X", SetExpr::concrete(IntegerSet::periodic(2, {0})));
    z->add_partition(singletons);
    k->add_generator("X", SetExpr::concrete(IntegerSet::periodic(2, {0})));
    k->add_shift("X", 1, ~kX);
    k->add_shift("X", -1, ~kX);
    k->validate();
    k->add_partition(cells);
    k->add_partition(halves);
    free_z = UltrafilterOracle::free_symbolic("free", z, {{kX, true}});
    free_z->register_countable_partition(singletons, std::nullopt);
    free_k = UltrafilterOracle::free_symbolic("U", k, {{kX, true}});
    sigma_k = UltrafilterOracle::sigma_complete("S", k, {{kX, true}});
    sigma_k->register_countable_partition(cells, 0);
    sigma_k->register_countable_partition(halves, 0);
  }

  ShiftMeasure two_valued(const UltrafilterOracle& u) const { return ShiftMeasure::two_valued(TwoValuedMeasure(u)); }
};

SymbolicState e(const DomainPtr& d, Int i) { return SymbolicState::vector_state(d, {i}, {1.0}); }

SymbolicState plus(const DomainPtr& d) {
  const double r = 1.0 / std::sqrt(2.0);
  return SymbolicState::vector_state(d, {0, 1}, {r, r});
}

double re(Complex z) {
  EXPECT_LT(std::abs(z.imag()), 1e-12);
  return z.real();
}

// Atom weights by offset, for states made of atoms over a single oracle.
std::map<Int, double> atom_weights(const SymbolicState& s) {
  std::map<Int, double> out;
  for (const auto& c : s.components()) {
    const auto* a = std::get_if<UltralimitAtom>(&c.part);
    EXPECT_NE(a, nullptr);
    if (a) out[a->offset] += c.weight;
  }
  return out;
}

}  // namespace

TEST(SymbolicStates, Normalization) {
  Fixture f;
  const std::vector<SymbolicState> states{
      e(f.z, 3), plus(f.k), SymbolicState::atom(*f.free_z), SymbolicState::atom(*f.sigma_k, 4),
      SymbolicState::mixture({0.25, 0.75}, {e(f.z, 0), SymbolicState::atom(*f.free_z, 2)})};
  for (const auto& s : states) {
    EXPECT_NEAR(re(evaluate(s, SymbolicObservable::identity(s.domain()))), 1.0, 1e-12) << s.describe();
  }
}

TEST(SymbolicStates, AtomsVanishOnFiniteProjectors) {
  Fixture f;
  const SymbolicState atom = SymbolicState::atom(*f.free_z);
  EXPECT_EQ(evaluate(atom, SymbolicObservable::finite_projector(f.z, {0})), Complex(0.0));
  EXPECT_EQ(evaluate(atom, SymbolicObservable::finite_projector(f.z, {-3, 0, 5, 1000})), Complex(0.0));
}

TEST(SymbolicStates, ShiftedAtomsSplitAlongX) {
  Fixture f;
  const SymbolicObservable px = SymbolicObservable::step_projector(f.k, kX);
  EXPECT_EQ(evaluate(SymbolicState::atom(*f.free_k, 0), px), Complex(1.0));
  EXPECT_EQ(evaluate(SymbolicState::atom(*f.free_k, 1), px), Complex(0.0));
}

// lim_{j -> U} rho_{e_{j+k}} on P_E is decided by {j : j + k in E} = E - k,
// which is the view with decide'(E) = decide(E - k).
TEST(SymbolicStates, PushforwardCoherence) {
  Fixture f;
  auto z = std::make_shared<IntegersDomain>("Z3");
  z->add_generator("T", SetExpr::concrete(IntegerSet::periodic(3, {0})));
  const auto u = UltrafilterOracle::free_symbolic("u", z, {{SetExpr::generator("T"), true}});
  const std::vector<SymbolicObservable> probes{
      SymbolicObservable::step_projector(z, SetExpr::generator("T")),
      SymbolicObservable::step_projector(z, SetExpr::shift(1, SetExpr::generator("T"))),
      SymbolicObservable::step(StepFunction(z, {SetExpr::generator("T"), ~SetExpr::generator("T")}, {2.0, -1.0})),
      SymbolicObservable::finite_projector(z, {0, 1, 2}),
      SymbolicObservable::identity(z)};
  for (Int k : {-4, -1, 0, 1, 2, 5}) {
    for (const auto& a : probes) {
      EXPECT_EQ(evaluate(SymbolicState::atom(u, k), a), evaluate(SymbolicState::atom(u.shift_pushforward(-k), 0), a));
    }
    // Direct reading: Atom(u, k) sees T exactly when k is a multiple of 3.
    EXPECT_EQ(evaluate(SymbolicState::atom(u, k), probes[0]), Complex(((k % 3) + 3) % 3 == 0 ? 1.0 : 0.0));
  }
  // On the block generator both sign conventions agree, since X - 1 = X + 1.
  for (Int k : {-1, 1, 3}) {
    const SymbolicObservable px = SymbolicObservable::step_projector(f.k, kX);
    EXPECT_EQ(evaluate(SymbolicState::atom(*f.free_k, k), px),
              evaluate(SymbolicState::atom(f.free_k->shift_pushforward(k), 0), px));
  }
}

TEST(SymbolicStates, VanishingDiagonal) {
  Fixture f;
  const VanishingDiagonal v{1.0, 1.0, 0};
  const auto ex = v.exception_set(0.1);
  EXPECT_EQ(ex.size(), 17u);
  EXPECT_EQ(ex.front(), -8);
  EXPECT_EQ(ex.back(), 8);
  const SymbolicObservable obs = SymbolicObservable::vanishing(f.z, v);
  EXPECT_NEAR(re(evaluate(e(f.z, 3), obs)), 0.25, 1e-15);
  EXPECT_EQ(evaluate(SymbolicState::atom(*f.free_z), obs), Complex(0.0));
}

TEST(SymbolicStates, ShiftChannelExamples) {
  Fixture f;
  const SymbolicState s = plus(f.z);
  const SymbolicState same = shift_channel_apply(ShiftMeasure::finitely_supported({{0, 1.0}}), s);
  ASSERT_EQ(same.components().size(), 1u);
  const auto& part = std::get<DensityPart>(same.components()[0].part);
  EXPECT_EQ(part.support, (std::vector<Int>{0, 1}));
  EXPECT_LT(oracle::frobenius(part.matrix.matrix(), Matrix::Constant(2, 2, 0.5)), 1e-12);

  const SymbolicState atom = shift_channel_apply(f.two_valued(*f.free_z), e(f.z, 0));
  EXPECT_EQ(atom_weights(atom), (std::map<Int, double>{{0, 1.0}}));

  const SymbolicState split = shift_channel_apply(f.two_valued(*f.free_k), plus(f.k));
  const auto w = atom_weights(split);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NEAR(w.at(0), 0.5, 1e-12);
  EXPECT_NEAR(w.at(1), 0.5, 1e-12);
}

TEST(SymbolicStates, FinitelySupportedShiftMovesSupports) {
  Fixture f;
  const SymbolicState out =
      shift_channel_apply(ShiftMeasure::finitely_supported({{2, 0.25}, {-1, 0.75}}), e(f.z, 0));
  const SymbolicObservable p2 = SymbolicObservable::finite_projector(f.z, {2});
  const SymbolicObservable pm1 = SymbolicObservable::finite_projector(f.z, {-1});
  EXPECT_NEAR(re(evaluate(out, p2)), 0.25, 1e-12);
  EXPECT_NEAR(re(evaluate(out, pm1)), 0.75, 1e-12);
}

TEST(SymbolicStates, PrincipalTwoValuedIsExactShift) {
  Fixture f;
  const auto p = UltrafilterOracle::principal("p3", f.z, 3);
  const SymbolicState out = shift_channel_apply(f.two_valued(p), e(f.z, 0));
  EXPECT_NEAR(re(evaluate(out, SymbolicObservable::finite_projector(f.z, {3}))), 1.0, 1e-12);
}

TEST(SymbolicStates, AtomsUnderFreeShiftAreUnsupported) {
  Fixture f;
  EXPECT_EQ(code_of([&] { shift_channel_apply(f.two_valued(*f.free_z), SymbolicState::atom(*f.free_z)); }),
            ErrorCode::kUnsupportedInput);
}

TEST(SymbolicStates, SingularityVerdicts) {
  Fixture f;
  std::mt19937_64 rng(3);
  std::vector<SymbolicObservable> witnesses;
  for (int i = 0; i < 50; ++i) {
    std::vector<Int> idx;
    const int n = 1 + i % 4;
    for (int t = 0; t < n; ++t) idx.push_back(std::uniform_int_distribution<Int>(-40, 40)(rng));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    witnesses.push_back(SymbolicObservable::finite_projector(f.z, idx));
  }
  EXPECT_TRUE(is_singular_on_representables(SymbolicState::atom(*f.free_z), witnesses).singular);

  const SingularityVerdict normal =
      is_singular_on_representables(e(f.z, 0), {SymbolicObservable::finite_projector(f.z, {0})});
  EXPECT_FALSE(normal.singular);
  EXPECT_NEAR(re(normal.witness_value), 1.0, 1e-12);

  const SymbolicState mix = SymbolicState::mixture({0.4, 0.6}, {e(f.z, 0), SymbolicState::atom(*f.free_z)});
  const SingularityVerdict mixed = is_singular_on_representables(mix, {SymbolicObservable::finite_projector(f.z, {0})});
  EXPECT_FALSE(mixed.singular);
  EXPECT_NEAR(re(mixed.witness_value), 0.4, 1e-12);

  EXPECT_EQ(code_of([&] { is_singular_on_representables(mix, {SymbolicObservable::identity(f.z)}); }),
            ErrorCode::kInvalidArgument);
}

TEST(SymbolicStates, YosidaHewittSplit) {
  Fixture f;
  const YosidaHewittSplit pure = yosida_hewitt_split(e(f.z, 2));
  EXPECT_NEAR(pure.lambda, 1.0, 1e-15);
  EXPECT_TRUE(pure.normal.has_value());
  EXPECT_FALSE(pure.singular.has_value());

  const YosidaHewittSplit atom = yosida_hewitt_split(SymbolicState::atom(*f.free_z));
  EXPECT_NEAR(atom.lambda, 0.0, 1e-15);
  EXPECT_FALSE(atom.normal.has_value());
  EXPECT_TRUE(atom.singular.has_value());

  const SymbolicState mix = SymbolicState::mixture({0.4, 0.6}, {e(f.z, 0), SymbolicState::atom(*f.free_z)});
  const YosidaHewittSplit s = yosida_hewitt_split(mix, {{0}, {-5, 7}});
  EXPECT_NEAR(s.lambda, 0.4, 1e-15);
  EXPECT_NEAR(s.lambda_sup, 0.4, 1e-12);
  const SymbolicState back = recombine(s);
  for (const auto& a : {SymbolicObservable::finite_projector(f.z, {0}), SymbolicObservable::step_projector(f.z, kX),
                        SymbolicObservable::identity(f.z)}) {
    EXPECT_NEAR(std::abs(evaluate(back, a) - evaluate(mix, a)), 0.0, 1e-12);
  }
}

TEST(SymbolicStates, SigmaAdditivityBoundary) {
  Fixture f;
  const SymbolicState free_atom = SymbolicState::atom(*f.free_z);
  const SigmaVerdict lost = sigma_additivity_check(free_atom, f.singletons);
  EXPECT_FALSE(lost.additive);
  EXPECT_EQ(lost.lhs, Complex(1.0));
  EXPECT_EQ(lost.rhs, Complex(0.0));

  const SigmaVerdict normal = sigma_additivity_check(e(f.z, 0), f.singletons);
  EXPECT_TRUE(normal.additive);
  EXPECT_EQ(normal.lhs, Complex(1.0));
  EXPECT_EQ(normal.rhs, Complex(1.0));

  for (const auto* p : {&f.cells, &f.halves}) {
    const SymbolicState out = shift_channel_apply(f.two_valued(*f.sigma_k), plus(f.k));
    const SigmaVerdict v = sigma_additivity_check(out, *p);
    EXPECT_TRUE(v.additive) << p->id;
    EXPECT_NEAR(re(v.lhs), 1.0, 1e-12);
    EXPECT_NEAR(re(v.rhs), 1.0, 1e-12);
  }
  CountablePartition stray{"stray", CountablePartition::Kind::kBlocks, 3, {}};
  f.z->add_partition(stray);
  EXPECT_EQ(code_of([&] { sigma_additivity_check(free_atom, stray); }), ErrorCode::kPartitionNotRegistered);
}

TEST(SymbolicStates, Excision) {
  Fixture f;
  const SymbolicState atom = SymbolicState::atom(*f.free_k);
  const SymbolicObservable c = SymbolicObservable::step(StepFunction::constant(f.k, 2.5));
  EXPECT_TRUE(excises(SymbolicObservable::identity(f.k), atom, c));
  EXPECT_TRUE(excises(SymbolicObservable::identity(f.k), e(f.k, 4), c));
  const SymbolicObservable a = SymbolicObservable::step(StepFunction(f.k, {kX, ~kX}, {1.0, -1.0}));
  const SymbolicObservable px = SymbolicObservable::step_projector(f.k, kX);
  EXPECT_TRUE(excises(px, atom, a));
  EXPECT_FALSE(excises(SymbolicObservable::identity(f.k), atom, a));
  EXPECT_EQ(code_of([&] { excises(SymbolicObservable::step_projector(f.k, ~kX), atom, a); }),
            ErrorCode::kFilterViolation);
}

TEST(SymbolicStates, PurityOfAtomsAndTheirMixtures) {
  Fixture f;
  const SymbolicObservable a = SymbolicObservable::step(StepFunction(f.k, {kX, ~kX}, {1.0, -1.0}));
  const PurityVerdict pure = purity_check_diagonal(SymbolicState::atom(*f.sigma_k), a, {0.1, 0.01});
  EXPECT_TRUE(pure.pure);
  ASSERT_EQ(pure.witnesses.size(), 2u);
  for (const auto& w : pure.witnesses) {
    EXPECT_LT(w.norm, w.eps);
    EXPECT_TRUE(f.sigma_k->decide(w.set));
  }

  const SymbolicObservable px = SymbolicObservable::step_projector(f.k, kX);
  const SymbolicState half = shift_channel_apply(f.two_valued(*f.free_k), plus(f.k));
  const PurityVerdict mixed = purity_check_diagonal(half, px, {0.1});
  EXPECT_FALSE(mixed.pure);
  ASSERT_TRUE(mixed.distinguishing.has_value());
  EXPECT_TRUE(f.k->equivalent(*mixed.distinguishing, kX) || f.k->equivalent(*mixed.distinguishing, ~kX));

  const PurityVerdict trivial =
      purity_check_diagonal(SymbolicState::atom(*f.free_k), SymbolicObservable::step(StepFunction::constant(f.k, 3.0)), {0.1});
  EXPECT_TRUE(trivial.pure);
}

TEST(SymbolicStates, ConvexDecompositionSearch) {
  Fixture f;
  const SymbolicState a0 = SymbolicState::atom(*f.free_k, 0), a1 = SymbolicState::atom(*f.free_k, 1);
  const SymbolicState half = SymbolicState::mixture({0.5, 0.5}, {a0, a1});
  const std::vector<SymbolicObservable> probes{SymbolicObservable::step_projector(f.k, kX),
                                               SymbolicObservable::identity(f.k)};
  const auto found = find_convex_decomposition(half, {a0, a1}, probes);
  ASSERT_TRUE(found.has_value());
  EXPECT_NEAR(found->t, 0.5, 1e-12);
  EXPECT_FALSE(find_convex_decomposition(a0, {a0, a1, half}, probes).has_value());
}

TEST(SymbolicStates, NonTwoValuedSplit) {
  Fixture f;
  const auto u1 = UltrafilterOracle::free_symbolic("U1", f.k, {{kX, true}});
  const auto u2 = UltrafilterOracle::free_symbolic("U2", f.k, {{kX, false}});
  for (double w : {0.5, 0.3}) {
    const ShiftMeasure mu = ShiftMeasure::convex({{w, TwoValuedMeasure(u1)}, {1.0 - w, TwoValuedMeasure(u2)}});
    const NonTwoValuedSplit s = split_nontwovalued(mu, kX, e(f.k, 0));
    EXPECT_EQ(s.value_a, Complex(1.0));
    EXPECT_EQ(s.value_b, Complex(0.0));
    EXPECT_NEAR(s.weight_a, w, 1e-15);
    EXPECT_NEAR(s.weight_b, 1.0 - w, 1e-15);
  }
  EXPECT_EQ(code_of([&] { split_nontwovalued(f.two_valued(u1), kX, e(f.k, 0)); }), ErrorCode::kNotIntermediate);
}

namespace {

// Phi_mu on Z_n by explicit cyclic shift matrices.
Matrix shift_model(const std::vector<std::pair<Int, double>>& mu, int n, const Matrix& rho) {
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [j, w] : mu) {
    Matrix s = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) s(((i + j) % n + n) % n, i) = 1.0;
    out += w * oracle::multiply(oracle::multiply(s, rho), oracle::dagger(s));
  }
  return out;
}

}  // namespace

TEST(SymbolicStates, BarycentricEquivalence) {
  Rng rng(41);
  const std::vector<std::pair<Int, double>> pts{{0, 1.0 / 3}, {1, 1.0 / 3}, {2, 1.0 / 3}};
  const ShiftMeasure mu = ShiftMeasure::finitely_supported(pts);
  const std::vector<Matrix> obs{random_hermitian(rng, 8), random_hermitian(rng, 8)};
  const Vector u = random_unit_vector(rng, 8);
  EXPECT_LT(barycentric_equivalence_check(mu, 8, {{1.0, u}}, obs).max_deviation, 1e-12);
  const Vector v = random_unit_vector(rng, 8);
  EXPECT_LT(barycentric_equivalence_check(mu, 8, {{0.3, u}, {0.7, v}}, obs).max_deviation, 1e-12);

  for (int t = 0; t < 20; ++t) {
    const auto w = random_simplex(rng, 3);
    std::vector<std::pair<double, Vector>> mix;
    Matrix rho = Matrix::Zero(8, 8);
    for (int i = 0; i < 3; ++i) {
      const Vector x = random_unit_vector(rng, 8);
      mix.push_back({w[static_cast<std::size_t>(i)], x});
      rho += w[static_cast<std::size_t>(i)] * x * x.adjoint();
    }
    EXPECT_LT(barycentric_equivalence_check(mu, 8, mix, obs).max_deviation, 1e-12);
    Matrix lhs = shift_model(pts, 8, rho);
    Matrix rhs = Matrix::Zero(8, 8);
    for (const auto& [wi, x] : mix) rhs += wi * shift_model(pts, 8, x * x.adjoint());
    EXPECT_LT(oracle::frobenius(lhs, rhs), 1e-12);
  }
}

TEST(SymbolicStates, RejectsMalformedStates) {
  Fixture f;
  EXPECT_EQ(code_of([&] { SymbolicState::vector_state(f.z, {0, 1}, {1.0, 1.0}); }), ErrorCode::kNotNormalized);
  EXPECT_THROW(SymbolicState::vector_state(f.z, {0, 0}, {0.6, 0.8}), Error);
  EXPECT_THROW(SymbolicState::mixture({0.5, 0.6}, {e(f.z, 0), e(f.z, 1)}), Error);
}
