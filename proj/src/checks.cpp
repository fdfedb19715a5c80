#include "pettis/checks.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <optional>

namespace pettis::cli {
namespace {

using sets::Int;
using sets::SetExpr;
using symbolic::ShiftMeasure;
using symbolic::SymbolicObservable;
using symbolic::SymbolicState;

// Parameter access for one check; type errors name the check.
struct Params {
  const CheckSpec& spec;

  const YAML::Node& node() const { return spec.params; }
  bool has(const char* key) const { return static_cast<bool>(spec.params[key]); }

  YAML::Node require(const char* key) const {
    YAML::Node v = spec.params[key];
    if (!v) fail(ErrorCode::kParseError, "check '" + spec.id + "' (line " + std::to_string(spec.line) +
                                             "): missing parameter '" + key + "'");
    return v;
  }

  template <class T>
  static T as(const CheckSpec& spec, const YAML::Node& n, const char* key) {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(ErrorCode::kParseError, "check '" + spec.id + "' (line " + std::to_string(spec.line) +
                                       "): parameter '" + key + "' has the wrong type");
    }
  }

  template <class T>
  T get(const char* key, T fallback) const {
    YAML::Node v = spec.params[key];
    return v ? as<T>(spec, v, key) : fallback;
  }

  template <class T>
  T req(const char* key) const {
    return as<T>(spec, require(key), key);
  }

  template <class T>
  std::vector<T> list(const char* key, std::vector<T> fallback = {}) const {
    YAML::Node v = spec.params[key];
    if (!v) return fallback;
    if (v.IsScalar()) return {as<T>(spec, v, key)};
    std::vector<T> out;
    for (const auto& x : v) out.push_back(as<T>(spec, x, key));
    return out;
  }
};

struct Ctx {
  Scenario& s;
  Params p;
  Rng& rng;
  Record& r;
};

Json cjson(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& id, const char* what) {
  auto it = m.find(id);
  if (it == m.end()) fail(ErrorCode::kValidationError, std::string("dangling reference to ") + what + " '" + id + "'");
  return it->second;
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool bitwise_equal(Complex a, Complex b) {
  return std::bit_cast<std::uint64_t>(a.real()) == std::bit_cast<std::uint64_t>(b.real()) &&
         std::bit_cast<std::uint64_t>(a.imag()) == std::bit_cast<std::uint64_t>(b.imag());
}

std::vector<GroupPtr> groups_param(const Ctx& c) {
  std::vector<GroupPtr> out;
  for (const auto& id : c.p.list<std::string>("groups")) out.push_back(lookup(c.s.groups, id, "group"));
  if (out.empty()) {
    out = {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4),
           FiniteGroup::direct_product({2, 2}), FiniteGroup::symmetric(3)};
  }
  return out;
}

// Full dephasing as the average over the diagonal clock unitaries.
QuantumChannel dephasing(Index dim) {
  std::vector<QuantumChannel> parts;
  const double pi = std::acos(-1.0);
  for (Index k = 0; k < dim; ++k) {
    Matrix u = Matrix::Zero(dim, dim);
    for (Index j = 0; j < dim; ++j) {
      u(j, j) = std::polar(1.0, 2.0 * pi * static_cast<double>(j * k) / static_cast<double>(dim));
    }
    parts.push_back(QuantumChannel::unitary(u));
  }
  return mix(std::vector<double>(static_cast<std::size_t>(dim), 1.0 / static_cast<double>(dim)), parts);
}

// ---------------------------------------------------------------------------

Verdict check_vec_non_pure(Ctx& c) {
  auto amps_node = c.p.node()["amplitudes"];
  std::vector<Complex> amps = {1.0, 1.0};
  if (amps_node) {
    amps.clear();
    for (const auto& a : amps_node) {
      if (a.IsSequence()) {
        amps.emplace_back(a[0].as<double>(), a[1].as<double>());
      } else {
        amps.emplace_back(a.as<double>(), 0.0);
      }
    }
  }
  Vector u(static_cast<Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) u(static_cast<Index>(i)) = amps[i];
  u.normalize();
  const auto diag = c.p.list<double>("diagonal", {1.0, 0.0});
  const double expected = c.p.get<double>("expected_value", 0.5);
  const double tol = c.p.get<double>("tolerance", 1e-12);

  const DensityState rho = vector_state(u);
  const HermitianOperator a = HermitianOperator::diagonal(diag);
  const double value = expect(rho, a);
  const bool ex = excises(Projector::identity(rho.dim()), rho, a, tol);
  const DiagonalPurityVerdict purity = diagonal_algebra_purity(rho);

  c.r.values["expectation"] = value;
  c.r.values["excises_identity"] = ex;
  c.r.values["purity"] = purity.pure ? "PURE" : "NOT-PURE";
  c.r.values["filter_size"] = purity.filter.size();
  c.r.witness["projector"] = "identity";
  c.r.witness["observable"] = diag;
  if (purity.witness_basis_index) {
    c.r.witness["basis_observable"] = *purity.witness_basis_index;
    c.r.witness["basis_expectation"] = purity.witness_expectation;
  }
  const bool pass = std::abs(value - expected) <= tol && !ex && !purity.pure;
  return pass ? Verdict::kPass : Verdict::kFail;
}

Verdict check_idempotence(Ctx& c) {
  const double tol = c.p.get<double>("tolerance", 1e-10);
  std::vector<std::pair<std::string, std::string>> cases;
  for (const auto& id : c.p.list<std::string>("representations")) cases.emplace_back(id, "");
  if (auto list = c.p.node()["cases"]) {
    for (const auto& item : list) {
      cases.emplace_back(item["representation"].as<std::string>(),
                         item["measure"] ? item["measure"].as<std::string>() : "");
    }
  }
  if (cases.empty()) fail(ErrorCode::kInvalidArgument, "idempotence needs representations");
  double worst = 0.0;
  std::string worst_id;
  Json per = Json::array();
  for (const auto& [rep_id, mu_id] : cases) {
    const auto& rep = lookup(c.s.representations, rep_id, "representation");
    const GroupMeasure mu = mu_id.empty() ? haar_uniform(rep.group()) : lookup(c.s.measures, mu_id, "measure");
    const QuantumChannel q = group_average_channel(rep, mu);
    const double d = channel_distance(compose(q, q), q);
    per.push_back({{"representation", rep_id},
                   {"group", rep.group()->name()},
                   {"order", rep.group()->order()},
                   {"dim", rep.dim()},
                   {"abelian", rep.group()->is_abelian()},
                   {"distance", d}});
    if (d >= worst) {
      worst = d;
      worst_id = rep_id;
    }
  }
  c.r.values["cases"] = per;
  c.r.values["max_distance"] = worst;
  c.r.witness["representation"] = worst_id;
  return worst < tol ? Verdict::kPass : Verdict::kFail;
}

Verdict check_convolution_power(Ctx& c) {
  const int count = c.p.get<int>("count", 20);
  const int max_n = c.p.get<int>("max_n", 5);
  const int min_dim = c.p.get<int>("min_dim", 2);
  const int max_dim = c.p.get<int>("max_dim", 4);
  const double tol = c.p.get<double>("tolerance", 1e-10);
  const auto groups = groups_param(c);
  double worst = 0.0;
  Json worst_case;
  for (int i = 0; i < count; ++i) {
    const GroupPtr g = groups[static_cast<std::size_t>(i) % groups.size()];
    const int dim = uniform_int(c.rng, min_dim, max_dim);
    const int n = 1 + i % max_n;
    const auto rep = random_representation(c.rng, g, dim);
    const auto mu = random_measure(c.rng, g);
    const double d = channel_distance(channel_power(group_average_channel(rep, mu), n),
                                      group_average_channel(rep, convolution_power(mu, n)));
    if (d >= worst) {
      worst = d;
      worst_case = {{"case", i}, {"group", g->name()}, {"dim", dim}, {"n", n}, {"weights", mu.weights()}};
    }
  }
  c.r.values["cases"] = count;
  c.r.values["max_distance"] = worst;
  c.r.witness["worst_case"] = worst_case;
  return worst < tol ? Verdict::kPass : Verdict::kFail;
}

struct CesaroOutcome {
  Json values;
  double expected_distance = 0.0;
  double idempotence = 0.0;
  std::optional<QuantumChannel> limit;
};

CesaroOutcome cesaro_case(const QuantumChannel& phi, double tol, int max_n,
                          const UnitaryRepresentation* rep) {
  const CesaroResult res = cesaro_limit(phi, tol, max_n);
  const QuantumChannel& lim = res.limit;
  const double d1 = channel_distance(compose(lim, phi), lim);
  const double d2 = channel_distance(compose(phi, lim), lim);
  const double d3 = channel_distance(compose(lim, lim), lim);
  CesaroOutcome out;
  out.idempotence = std::max({d1, d2, d3});
  out.values = {{"n", res.diagnostics.n},
                {"max_n", max_n},
                {"exponent", res.diagnostics.exponent},
                {"steps", res.diagnostics.schedule.size()},
                {"extrapolated", res.diagnostics.extrapolated},
                {"final_plain_residual", res.diagnostics.plain_residuals.back()},
                {"final_residual", res.diagnostics.residuals.back()},
                {"alphabet_size", res.diagnostics.alphabet_size},
                {"limit_after_phi", d1},
                {"phi_after_limit", d2},
                {"limit_squared", d3}};
  if (rep) {
    // Reported only; whether the limit is itself a group average stays open.
    const MeasureFit fit = fit_group_measure(*rep, lim);
    out.values["fit_residual"] = fit.residual;
    out.values["fit_left_invariant"] = fit.left_invariant;
  }
  out.limit = lim;
  return out;
}

Verdict check_cesaro(Ctx& c) {
  const double tol = c.p.get<double>("tol", 1e-8);
  const int max_n = c.p.get<int>("max_n", 5000);
  const double idem_tol = c.p.get<double>("idempotence_tolerance", 1e-7);
  const auto id = c.p.req<std::string>("channel");
  const QuantumChannel& phi = lookup(c.s.channels, id, "channel");
  const UnitaryRepresentation* rep = nullptr;
  if (auto it = c.s.channel_sources.find(id); it != c.s.channel_sources.end()) {
    rep = &lookup(c.s.representations, it->second.first, "representation");
  }
  CesaroOutcome out = cesaro_case(phi, tol, max_n, rep);
  bool pass = out.idempotence <= idem_tol;
  c.r.values = out.values;
  c.r.values["idempotence"] = out.idempotence;
  if (c.p.has("expected")) {
    const auto expected = c.p.req<std::string>("expected");
    if (expected != "dephasing") fail(ErrorCode::kInvalidArgument, "unknown expected limit '" + expected + "'");
    const double d = channel_distance(*out.limit, dephasing(phi.dim()));
    const double etol = c.p.get<double>("expected_tolerance", 1e-6);
    c.r.values["distance_to_expected"] = d;
    pass = pass && d <= etol;
  }
  c.r.witness["channel"] = id;
  return pass ? Verdict::kPass : Verdict::kFail;
}

bool is_scalar(const UnitaryRepresentation& rep) {
  for (const auto& u : rep.images()) {
    const Complex t = u.trace() / static_cast<double>(u.rows());
    if ((u - t * Matrix::Identity(u.rows(), u.cols())).norm() > 1e-9) return false;
  }
  return true;
}

Verdict check_cesaro_random(Ctx& c) {
  const double tol = c.p.get<double>("tol", 1e-8);
  const int max_n = c.p.get<int>("max_n", 5000);
  const double idem_tol = c.p.get<double>("idempotence_tolerance", 1e-7);
  const int count = c.p.get<int>("count", 10);
  const int min_dim = c.p.get<int>("min_dim", 2);
  const int max_dim = c.p.get<int>("max_dim", 4);
  const auto groups = groups_param(c);
  Json per = Json::array();
  double worst = 0.0;
  Json worst_case;
  for (int i = 0; i < count; ++i) {
    const GroupPtr g = groups[static_cast<std::size_t>(i) % groups.size()];
    const int dim = uniform_int(c.rng, min_dim, max_dim);
    // Redraw representations whose images are all scalar: their average is
    // the identity channel and exercises nothing.
    auto rep = random_representation(c.rng, g, dim);
    for (int tries = 0; tries < 32 && is_scalar(rep); ++tries) rep = random_representation(c.rng, g, dim);
    const auto mu = random_measure(c.rng, g);
    CesaroOutcome out = cesaro_case(group_average_channel(rep, mu), tol, max_n, &rep);
    out.values["group"] = g->name();
    out.values["dim"] = dim;
    out.values["idempotence"] = out.idempotence;
    if (out.idempotence >= worst) {
      worst = out.idempotence;
      worst_case = {{"case", i}, {"group", g->name()}, {"dim", dim}, {"weights", mu.weights()}};
    }
    per.push_back(std::move(out.values));
  }
  c.r.values["cases"] = per;
  c.r.values["max_idempotence"] = worst;
  c.r.witness["worst_case"] = worst_case;
  return worst <= idem_tol ? Verdict::kPass : Verdict::kFail;
}

Verdict check_invariance(Ctx& c) {
  const int max_n = c.p.get<int>("max_n", 200);
  const double threshold = c.p.get<double>("threshold", 1e-6);
  const auto list = c.p.require("cases");
  bool pass = true;
  Json per = Json::array();
  for (const auto& item : list) {
    const auto id = item["measure"].as<std::string>();
    const auto expectation = item["expect"].as<std::string>();
    const GroupMeasure& mu = lookup(c.s.measures, id, "measure");
    const auto dn = invariance_diagnostic(regular_representation(mu.group()), mu, max_n);
    Json v = {{"measure", id}, {"group", mu.group()->name()}, {"expect", expectation},
              {"d_1", dn.front()}, {"d_final", dn.back()}};
    bool ok = false;
    if (expectation == "mixing") {
      auto it = std::find_if(dn.begin(), dn.end(), [&](double d) { return d < threshold; });
      v["first_below_threshold"] = it == dn.end() ? Json(nullptr) : Json(1 + (it - dn.begin()));
      ok = dn.back() < threshold;
    } else if (expectation == "stuck") {
      double dev = 0.0;
      for (double d : dn) dev = std::max(dev, std::abs(d - 1.0));
      v["max_deviation_from_one"] = dev;
      ok = dev <= 1e-12;
    } else {
      fail(ErrorCode::kInvalidArgument, "invariance expectation must be mixing or stuck");
    }
    v["ok"] = ok;
    if (!ok && c.r.witness.empty()) c.r.witness["measure"] = id;
    pass = pass && ok;
    per.push_back(std::move(v));
  }
  c.r.values["cases"] = per;
  c.r.values["max_n"] = max_n;
  return pass ? Verdict::kPass : Verdict::kFail;
}

// Random step function whose cells are unions of the Boolean atoms of the
// given generators.
sets::StepFunction random_step_function(Rng& rng, const sets::DomainPtr& domain,
                                        const std::vector<std::string>& gens, int max_cells) {
  std::vector<SetExpr> atoms;
  for (unsigned mask = 0; mask < (1u << gens.size()); ++mask) {
    SetExpr a = SetExpr::full();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const SetExpr g = SetExpr::generator(gens[i]);
      a = a & ((mask >> i) & 1u ? g : ~g);
    }
    if (!domain->is_empty(a)) atoms.push_back(a);
  }
  const int k = std::min<int>(uniform_int(rng, 1, max_cells), static_cast<int>(atoms.size()));
  std::vector<int> owner(atoms.size());
  // The first k atoms seed one cell each so that no cell is empty.
  std::vector<std::size_t> order(atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    owner[order[i]] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : uniform_int(rng, 0, k - 1);
  }
  std::vector<SetExpr> cells(static_cast<std::size_t>(k), SetExpr::empty());
  std::vector<bool> started(static_cast<std::size_t>(k), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto& cell = cells[static_cast<std::size_t>(owner[i])];
    cell = started[static_cast<std::size_t>(owner[i])] ? (cell | atoms[i]) : atoms[i];
    started[static_cast<std::size_t>(owner[i])] = true;
  }
  std::vector<Complex> values;
  for (int i = 0; i < k; ++i) values.emplace_back(uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0));
  return sets::StepFunction(domain, std::move(cells), std::move(values));
}

Verdict check_ultralimit_integral(Ctx& c) {
  const auto domain = c.s.domain(c.p.req<std::string>("domain"));
  const int count = c.p.get<int>("count", 50);
  const int max_cells = c.p.get<int>("max_cells", 6);
  auto gens = c.p.list<std::string>("generators", domain->generator_names());
  if (gens.size() > 8) fail(ErrorCode::kInvalidArgument, "at most 8 generators");
  const auto oracle_ids = c.p.list<std::string>("oracles");
  std::vector<sets::StepFunction> functions;
  for (int i = 0; i < count; ++i) functions.push_back(random_step_function(c.rng, domain, gens, max_cells));
  bool pass = true;
  Json per = Json::array();
  for (const auto& id : oracle_ids) {
    const auto& oracle = lookup(c.s.oracles, id, "oracle");
    const sets::TwoValuedMeasure mu(oracle);
    int mismatches = 0;
    for (int i = 0; i < count; ++i) {
      const Complex a = sets::ultralimit(oracle, functions[static_cast<std::size_t>(i)]);
      const Complex b = sets::integrate_two_valued(mu, functions[static_cast<std::size_t>(i)]);
      if (!bitwise_equal(a, b)) {
        ++mismatches;
        if (c.r.witness.empty()) {
          c.r.witness = {{"oracle", id}, {"function", i}, {"ultralimit", cjson(a)}, {"integral", cjson(b)}};
        }
      }
    }
    per.push_back({{"oracle", id}, {"kind", sets::to_string(oracle.kind())}, {"mismatches", mismatches}});
    pass = pass && mismatches == 0;
  }
  c.r.values["generators"] = gens;
  c.r.values["functions"] = count;
  c.r.values["oracles"] = per;
  return pass && !oracle_ids.empty() ? Verdict::kPass : Verdict::kFail;
}

std::vector<SymbolicObservable> random_compact_witnesses(Rng& rng, const sets::DomainPtr& domain, int count,
                                                         int window) {
  std::vector<SymbolicObservable> out;
  for (int i = 0; i < count; ++i) {
    const int size = uniform_int(rng, 1, 4);
    std::vector<Int> idx;
    while (static_cast<int>(idx.size()) < size) {
      const Int x = uniform_int(rng, -window, window);
      if (std::find(idx.begin(), idx.end(), x) == idx.end()) idx.push_back(x);
    }
    switch (i % 3) {
      case 0: out.push_back(SymbolicObservable::finite_projector(domain, idx)); break;
      case 1: {
        Matrix h = random_hermitian(rng, static_cast<Index>(idx.size()));
        out.push_back(SymbolicObservable::block(domain, idx, h));
        break;
      }
      default:
        out.push_back(SymbolicObservable::vanishing(
            domain, {uniform_real(rng, 0.5, 2.0), static_cast<double>(uniform_int(rng, 2, 3)),
                     static_cast<Int>(uniform_int(rng, -window, window))}));
    }
  }
  return out;
}

std::vector<Int> supports_of(const SymbolicState& s) {
  std::vector<Int> out;
  for (const auto& comp : s.components()) {
    if (const auto* d = std::get_if<symbolic::DensityPart>(&comp.part)) {
      out.insert(out.end(), d->support.begin(), d->support.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Verdict check_singularization(Ctx& c) {
  const int count = c.p.get<int>("witnesses", 50);
  const int window = c.p.get<int>("window", 20);
  const auto measure_ids = c.p.list<std::string>("measures");
  const auto state_ids = c.p.list<std::string>("states");
  if (measure_ids.empty() || state_ids.empty()) fail(ErrorCode::kInvalidArgument, "needs measures and states");
  bool pass = true;
  Json per = Json::array();
  for (const auto& sid : state_ids) {
    const auto& state = lookup(c.s.states, sid, "state");
    auto witnesses = random_compact_witnesses(c.rng, state.domain(), count, window);
    const auto support = supports_of(state);
    if (!support.empty()) witnesses.push_back(SymbolicObservable::finite_projector(state.domain(), support));
    for (const auto& oid : c.p.list<std::string>("observables")) {
      witnesses.push_back(lookup(c.s.observables, oid, "observable"));
    }
    for (const auto& mid : measure_ids) {
      const auto& mu = lookup(c.s.shift_measures, mid, "shift measure");
      const SymbolicState out = symbolic::shift_channel_apply(mu, state);
      const auto verdict = symbolic::is_singular_on_representables(out, witnesses);
      double max_abs = 0.0;
      for (const auto& w : witnesses) max_abs = std::max(max_abs, std::abs(symbolic::evaluate(out, w)));
      const auto split = symbolic::yosida_hewitt_split(out, {support});
      const bool ok = verdict.singular && split.lambda == 0.0 && split.lambda_sup <= symbolic::kEvalTol;
      per.push_back({{"state", sid},
                     {"measure", mid},
                     {"output", out.describe()},
                     {"witnesses", witnesses.size()},
                     {"max_abs_value", max_abs},
                     {"singular", verdict.singular},
                     {"lambda", split.lambda},
                     {"lambda_sup", split.lambda_sup}});
      if (!ok && c.r.witness.empty()) {
        c.r.witness = {{"state", sid}, {"measure", mid}, {"reason", verdict.reason}};
        if (verdict.failing_witness) c.r.witness["witness_index"] = *verdict.failing_witness;
        c.r.witness["witness_value"] = cjson(verdict.witness_value);
      }
      pass = pass && ok;
    }
  }
  c.r.values["cases"] = per;
  return pass ? Verdict::kPass : Verdict::kFail;
}

Verdict check_sigma_additivity(Ctx& c) {
  bool pass = true;
  Json per = Json::array();
  for (const auto& item : c.p.require("cases")) {
    const auto sid = item["state"].as<std::string>();
    const auto& state = lookup(c.s.states, sid, "state");
    const auto expectation = item["expect"].as<std::string>("additive");
    if (expectation != "additive" && expectation != "not_additive") {
      fail(ErrorCode::kInvalidArgument, "sigma expectation must be additive or not_additive");
    }
    std::vector<std::string> partitions;
    const auto pid = item["partition"].as<std::string>("all");
    if (pid == "all") {
      for (const auto& [id, part] : state.domain()->partitions()) partitions.push_back(id);
    } else {
      partitions.push_back(pid);
    }
    for (const auto& id : partitions) {
      const auto verdict = symbolic::sigma_additivity_check(state, c.s.partition(id));
      bool ok = verdict.additive == (expectation == "additive");
      if (item["lhs"]) ok = ok && std::abs(verdict.lhs - Complex(item["lhs"].as<double>(), 0.0)) <= symbolic::kEvalTol;
      if (item["rhs"]) ok = ok && std::abs(verdict.rhs - Complex(item["rhs"].as<double>(), 0.0)) <= symbolic::kEvalTol;
      per.push_back({{"state", sid},
                     {"partition", id},
                     {"expect", expectation},
                     {"lhs", cjson(verdict.lhs)},
                     {"rhs", cjson(verdict.rhs)},
                     {"additive", verdict.additive},
                     {"cells", verdict.cells}});
      if (!ok && c.r.witness.empty()) c.r.witness = {{"state", sid}, {"partition", id}};
      pass = pass && ok;
    }
  }
  c.r.values["cases"] = per;
  return pass ? Verdict::kPass : Verdict::kFail;
}

std::vector<SetExpr> set_list(const Ctx& c, const char* key) {
  std::vector<SetExpr> out;
  for (const auto& text : c.p.list<std::string>(key)) out.push_back(sets::parse_set_expr(text));
  return out;
}

Verdict check_purity(Ctx& c) {
  const auto sid = c.p.req<std::string>("state");
  const auto& state = lookup(c.s.states, sid, "state");
  const auto& a = lookup(c.s.observables, c.p.req<std::string>("observable"), "observable");
  const auto eps = c.p.list<double>("eps", {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
  const auto expectation = c.p.get<std::string>("expect", "pure");
  const auto verdict = symbolic::purity_check_diagonal(state, a, eps, set_list(c, "candidates"));

  c.r.values["purity"] = verdict.pure ? "PURE" : "NOT-PURE";
  c.r.values["value"] = cjson(verdict.value);
  bool pass = verdict.pure == (expectation == "pure");
  if (verdict.pure) {
    Json ws = Json::array();
    for (const auto& w : verdict.witnesses) ws.push_back({{"eps", w.eps}, {"set", w.set.to_string()}, {"norm", w.norm}});
    c.r.witness["excision"] = ws;
    pass = pass && verdict.witnesses.size() == eps.size();
    if (c.p.has("inventory")) {
      std::vector<SymbolicState> inventory;
      for (const auto& id : c.p.list<std::string>("inventory")) inventory.push_back(lookup(c.s.states, id, "state"));
      std::vector<SymbolicObservable> probes = {a, SymbolicObservable::identity(state.domain())};
      for (const auto& g : state.domain()->generator_names()) {
        probes.push_back(SymbolicObservable::step_projector(state.domain(), SetExpr::generator(g)));
      }
      for (const auto& id : c.p.list<std::string>("probes")) probes.push_back(lookup(c.s.observables, id, "observable"));
      const auto decomposition = symbolic::find_convex_decomposition(state, inventory, probes);
      c.r.values["inventory_decomposition"] = decomposition.has_value();
      if (decomposition) {
        c.r.witness["decomposition"] = {{"first", decomposition->first},
                                        {"second", decomposition->second},
                                        {"t", decomposition->t}};
        pass = false;
      }
    }
  } else {
    c.r.witness["projector"] = verdict.distinguishing->to_string();
    c.r.witness["components"] = {verdict.first, verdict.second};
    if (c.p.has("witness")) {
      const SetExpr expected = sets::parse_set_expr(c.p.req<std::string>("witness"));
      const bool same = state.domain()->equivalent(expected, *verdict.distinguishing);
      c.r.values["witness_matches"] = same;
      pass = pass && same;
    }
  }
  return pass ? Verdict::kPass : Verdict::kFail;
}

Verdict check_nontwovalued_split(Ctx& c) {
  const auto& mu = lookup(c.s.shift_measures, c.p.req<std::string>("measure"), "shift measure");
  const auto& state = lookup(c.s.states, c.p.req<std::string>("state"), "state");
  const SetExpr a = sets::parse_set_expr(c.p.req<std::string>("set"));
  const auto expected = c.p.list<double>("expected", {1.0, 0.0});
  if (expected.size() != 2) fail(ErrorCode::kInvalidArgument, "expected must hold two values");
  const auto split = symbolic::split_nontwovalued(mu, a, state, set_list(c, "candidates"));
  c.r.values["weight_a"] = split.weight_a;
  c.r.values["weight_b"] = split.weight_b;
  c.r.values["value_a"] = cjson(split.value_a);
  c.r.values["value_b"] = cjson(split.value_b);
  c.r.values["rho_a"] = split.rho_a.describe();
  c.r.values["rho_b"] = split.rho_b.describe();
  c.r.witness["projector"] = split.witness.to_string();
  const bool pass = split.value_a == Complex(expected[0], 0.0) && split.value_b == Complex(expected[1], 0.0);
  return pass ? Verdict::kPass : Verdict::kFail;
}

Verdict check_barycentric(Ctx& c) {
  const int count = c.p.get<int>("count", 20);
  const int n = c.p.get<int>("dim", 6);
  const int max_points = c.p.get<int>("max_points", 3);
  const int max_vectors = c.p.get<int>("max_vectors", 4);
  const double tol = c.p.get<double>("tolerance", 1e-12);
  double worst = 0.0;
  Json worst_case;
  for (int i = 0; i < count; ++i) {
    const int points = uniform_int(c.rng, 1, max_points);
    const auto w = random_simplex(c.rng, static_cast<std::size_t>(points));
    std::vector<std::pair<Int, double>> pts;
    for (int k = 0; k < points; ++k) pts.emplace_back(uniform_int(c.rng, -n, n), w[static_cast<std::size_t>(k)]);
    const auto mu = ShiftMeasure::finitely_supported(pts);
    const int vectors = uniform_int(c.rng, 1, max_vectors);
    const auto nu = random_simplex(c.rng, static_cast<std::size_t>(vectors));
    std::vector<std::pair<double, Vector>> mixture;
    for (int k = 0; k < vectors; ++k) mixture.emplace_back(nu[static_cast<std::size_t>(k)], random_unit_vector(c.rng, n));
    std::vector<Matrix> observables;
    for (int k = 0; k < 3; ++k) observables.push_back(random_hermitian(c.rng, n));
    const auto res = symbolic::barycentric_equivalence_check(mu, n, mixture, observables);
    const double dev = std::max(res.max_deviation, res.frobenius);
    if (dev >= worst) {
      worst = dev;
      worst_case = {{"case", i}, {"points", points}, {"vectors", vectors}};
    }
  }
  c.r.values["finite_cases"] = count;
  c.r.values["finite_max_deviation"] = worst;

  // The same identity for a declared shift measure acting on symbolic vector
  // states, compared on the declared probes.
  double symbolic_worst = 0.0;
  if (c.p.has("measure")) {
    const auto& mu = lookup(c.s.shift_measures, c.p.req<std::string>("measure"), "shift measure");
    const auto domain = c.s.domain(c.p.req<std::string>("domain"));
    std::vector<SymbolicObservable> probes = {SymbolicObservable::identity(domain)};
    for (const auto& id : c.p.list<std::string>("observables")) probes.push_back(lookup(c.s.observables, id, "observable"));
    for (int i = 0; i < count; ++i) {
      const int vectors = uniform_int(c.rng, 1, max_vectors);
      const auto nu = random_simplex(c.rng, static_cast<std::size_t>(vectors));
      std::vector<SymbolicState> parts;
      for (int k = 0; k < vectors; ++k) {
        const int size = uniform_int(c.rng, 1, 3);
        std::vector<Int> idx;
        while (static_cast<int>(idx.size()) < size) {
          const Int x = uniform_int(c.rng, -n, n);
          if (std::find(idx.begin(), idx.end(), x) == idx.end()) idx.push_back(x);
        }
        const Vector u = random_unit_vector(c.rng, size);
        parts.push_back(SymbolicState::vector_state(domain, idx, std::vector<Complex>(u.data(), u.data() + size)));
      }
      const SymbolicState lhs = symbolic::shift_channel_apply(mu, SymbolicState::mixture(nu, parts));
      for (const auto& probe : probes) {
        Complex rhs = 0.0;
        for (int k = 0; k < vectors; ++k) {
          rhs += nu[static_cast<std::size_t>(k)] *
                 symbolic::evaluate(symbolic::shift_channel_apply(mu, parts[static_cast<std::size_t>(k)]), probe);
        }
        const double dev = std::abs(symbolic::evaluate(lhs, probe) - rhs);
        if (dev >= symbolic_worst) {
          symbolic_worst = dev;
          if (dev > tol) worst_case = {{"symbolic_case", i}, {"state", lhs.describe()}};
        }
      }
    }
    c.r.values["symbolic_cases"] = count;
    c.r.values["symbolic_max_deviation"] = symbolic_worst;
  }
  c.r.values["max_deviation"] = std::max(worst, symbolic_worst);
  c.r.witness["worst_case"] = worst_case;
  return std::max(worst, symbolic_worst) < tol ? Verdict::kPass : Verdict::kFail;
}

SetExpr random_set(Rng& rng, const std::vector<std::string>& gens, int depth) {
  const int pick = uniform_int(rng, 0, depth > 0 ? 4 : 1);
  switch (pick) {
    case 0: return SetExpr::generator(gens[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(gens.size()) - 1))]);
    case 1: return SetExpr::points({static_cast<Int>(uniform_int(rng, -5, 5))});
    case 2: return ~random_set(rng, gens, depth - 1);
    case 3: return random_set(rng, gens, depth - 1) | random_set(rng, gens, depth - 1);
    default: return random_set(rng, gens, depth - 1) & random_set(rng, gens, depth - 1);
  }
}

Verdict check_structural(Ctx& c) {
  const int trials = c.p.get<int>("trials", 20);
  const auto groups = groups_param(c);
  bool pass = true;
  auto note = [&](const std::string& name, double worst, double tol, Json where) {
    const bool ok = worst <= tol;
    c.r.values[name] = {{"max_error", worst}, {"tolerance", tol}, {"ok", ok}};
    if (!ok && c.r.witness.empty()) c.r.witness = {{"invariant", name}, {"case", std::move(where)}};
    pass = pass && ok;
  };

  {
    double trace_err = 0.0, psd_err = 0.0, choi_err = 0.0;
    Json where;
    for (int i = 0; i < trials; ++i) {
      const GroupPtr g = groups[static_cast<std::size_t>(i) % groups.size()];
      const int dim = uniform_int(c.rng, 2, 4);
      const auto rep = random_representation(c.rng, g, dim);
      const auto q = group_average_channel(rep, random_measure(c.rng, g));
      const Matrix out = q.apply_matrix(random_density(c.rng, dim).matrix());
      const double te = std::abs(out.trace() - Complex(1.0, 0.0));
      const double pe = std::max(0.0, -hermitian_eigenvalues(0.5 * (out + out.adjoint())).minCoeff());
      const double ce = std::max(0.0, -hermitian_eigenvalues(choi(q).matrix()).minCoeff());
      if (te > trace_err || pe > psd_err || ce > choi_err) where = {{"trial", i}, {"group", g->name()}, {"dim", dim}};
      trace_err = std::max(trace_err, te);
      psd_err = std::max(psd_err, pe);
      choi_err = std::max(choi_err, ce);
    }
    note("trace_preservation", trace_err, 1e-12, where);
    note("output_positivity", psd_err, 1e-10, where);
    note("choi_psd", choi_err, 1e-10, where);
  }
  {
    double worst = 0.0;
    Json where;
    for (int i = 0; i < trials; ++i) {
      const GroupPtr g = groups[static_cast<std::size_t>(i) % groups.size()];
      const auto a = random_measure(c.rng, g), b = random_measure(c.rng, g), d = random_measure(c.rng, g);
      const double tv = total_variation(convolve(convolve(a, b), d), convolve(a, convolve(b, d)));
      if (tv >= worst) {
        worst = tv;
        where = {{"trial", i}, {"group", g->name()}};
      }
    }
    note("convolution_associativity", worst, 1e-12, where);
  }
  const auto oracle_ids = c.p.list<std::string>("oracles");
  if (!oracle_ids.empty()) {
    double violations = 0.0;
    Json where;
    for (const auto& id : oracle_ids) {
      const auto& oracle = lookup(c.s.oracles, id, "oracle");
      const auto& gens = oracle.domain()->generator_names();
      if (gens.empty()) fail(ErrorCode::kInvalidArgument, "oracle " + id + " lives on a domain without generators");
      for (int i = 0; i < trials; ++i) {
        const SetExpr e = random_set(c.rng, gens, 3), f = random_set(c.rng, gens, 3);
        const bool de = oracle.decide(e), dne = oracle.decide(~e), df = oracle.decide(f);
        const bool ok = (de != dne) && oracle.decide(e & f) == (de && df) && oracle.decide(e | f) == (de || df);
        if (!ok) {
          violations += 1.0;
          if (where.is_null()) where = {{"oracle", id}, {"set", e.to_string()}, {"other", f.to_string()}};
        }
      }
    }
    note("fip_dichotomy", violations, 0.0, where);

    double worst = 0.0;
    Json where_yh;
    for (int i = 0; i < trials; ++i) {
      const auto& oracle = lookup(c.s.oracles, oracle_ids[static_cast<std::size_t>(i) % oracle_ids.size()], "oracle");
      const auto domain = oracle.domain();
      const int size = uniform_int(c.rng, 1, 3);
      std::vector<Int> idx;
      while (static_cast<int>(idx.size()) < size) {
        const Int x = uniform_int(c.rng, -6, 6);
        if (std::find(idx.begin(), idx.end(), x) == idx.end()) idx.push_back(x);
      }
      const SymbolicState normal = SymbolicState::density(domain, idx, random_density(c.rng, size));
      const SymbolicState atom = SymbolicState::atom(oracle, uniform_int(c.rng, -3, 3));
      const double lambda = uniform_real(c.rng, 0.05, 0.95);
      const SymbolicState state = SymbolicState::mixture({lambda, 1.0 - lambda}, {normal, atom});
      const auto split = symbolic::yosida_hewitt_split(state);
      const SymbolicState back = symbolic::recombine(split);
      std::vector<SymbolicObservable> probes = {SymbolicObservable::identity(domain),
                                                SymbolicObservable::finite_projector(domain, idx),
                                                SymbolicObservable::block(domain, idx, random_hermitian(c.rng, size))};
      for (const auto& g : domain->generator_names()) {
        probes.push_back(SymbolicObservable::step_projector(domain, SetExpr::generator(g)));
      }
      const double expected_lambda = oracle.principal_point() ? 1.0 : lambda;
      double err = std::abs(split.lambda - expected_lambda);
      for (const auto& p : probes) err = std::max(err, std::abs(symbolic::evaluate(state, p) - symbolic::evaluate(back, p)));
      if (err >= worst) {
        worst = err;
        where_yh = {{"trial", i}, {"state", state.describe()}};
      }
    }
    note("yosida_hewitt_recombination", worst, 1e-12, where_yh);
  }
  c.r.values["trials"] = trials;
  return pass ? Verdict::kPass : Verdict::kFail;
}

using Runner = Verdict (*)(Ctx&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"vec_non_pure", check_vec_non_pure},
      {"idempotence", check_idempotence},
      {"convolution_power", check_convolution_power},
      {"cesaro", check_cesaro},
      {"cesaro_random", check_cesaro_random},
      {"invariance", check_invariance},
      {"ultralimit_integral", check_ultralimit_integral},
      {"singularization", check_singularization},
      {"sigma_additivity", check_sigma_additivity},
      {"purity", check_purity},
      {"nontwovalued_split", check_nontwovalued_split},
      {"barycentric", check_barycentric},
      {"structural", check_structural},
  };
  return table;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "FAIL";
}

Rng check_rng(std::uint64_t seed, const std::string& check_id) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : check_id) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return Rng(seed ^ h);
}

Record run_check(Scenario& scenario, const CheckSpec& spec, const RunOptions& options) {
  Record r;
  r.id = spec.id;
  r.type = spec.type;
  Rng rng = check_rng(options.seed, spec.id);
  const auto start = std::chrono::steady_clock::now();
  try {
    auto it = runners().find(spec.type);
    if (it == runners().end()) fail(ErrorCode::kValidationError, "unknown check type '" + spec.type + "'");
    Ctx ctx{scenario, Params{spec}, rng, r};
    r.verdict = it->second(ctx);
  } catch (const Error& e) {
    r.verdict = e.code() == ErrorCode::kInconclusiveAlgebra ? Verdict::kInconclusive : Verdict::kFail;
    r.witness["error"] = e.what();
  } catch (const std::exception& e) {
    r.verdict = Verdict::kFail;
    r.witness["error"] = e.what();
  }
  if (r.verdict == Verdict::kFail && r.witness.empty()) r.witness["check"] = spec.id;
  const auto stop = std::chrono::steady_clock::now();
  r.ms = options.fixed_clock ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
  return r;
}

Report run_scenario(Scenario& scenario, const RunOptions& options) {
  Report report;
  report.scenario = scenario.name;
  const auto start = std::chrono::steady_clock::now();
  if (scenario.checks.empty()) report.warnings.push_back("scenario " + scenario.name + " declares no checks");
  for (const auto& spec : scenario.checks) {
    report.records.push_back(run_check(scenario, spec, options));
    if (report.records.back().verdict != Verdict::kPass) report.pass = false;
  }
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace pettis::cli
