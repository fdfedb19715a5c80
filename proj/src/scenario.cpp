#include "pettis/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace pettis::cli {
namespace {

using sets::Int;
using sets::SetExpr;

struct Loader {
  std::string origin;

  std::string where(const YAML::Node& n) const {
    const auto m = n.Mark();
    if (m.is_null()) return origin;
    return origin + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
  }

  [[noreturn]] void parse_error(const YAML::Node& n, const std::string& msg) const {
    fail(ErrorCode::kParseError, where(n) + ": " + msg);
  }
  [[noreturn]] void invalid(const YAML::Node& n, const std::string& msg) const {
    fail(ErrorCode::kValidationError, where(n) + ": " + msg);
  }

  YAML::Node require(const YAML::Node& n, const char* key) const {
    if (!n.IsMap()) parse_error(n, "expected a mapping");
    YAML::Node v = n[key];
    if (!v) parse_error(n, std::string("missing key '") + key + "'");
    return v;
  }

  template <class T>
  T as(const YAML::Node& n) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      parse_error(n, "value '" + (n.IsScalar() ? n.Scalar() : std::string("<node>")) +
                         "' has the wrong type");
    }
  }

  template <class T>
  T get(const YAML::Node& n, const char* key, T fallback) const {
    if (!n.IsMap() || !n[key]) return fallback;
    return as<T>(n[key]);
  }

  Complex complex(const YAML::Node& n) const {
    if (n.IsSequence()) {
      if (n.size() != 2) parse_error(n, "complex entries are [re, im]");
      return {as<double>(n[0]), as<double>(n[1])};
    }
    return {as<double>(n), 0.0};
  }

  std::vector<Complex> complex_list(const YAML::Node& n) const {
    if (!n.IsSequence()) parse_error(n, "expected a list");
    std::vector<Complex> out;
    for (const auto& x : n) out.push_back(complex(x));
    return out;
  }

  template <class T>
  std::vector<T> list(const YAML::Node& n) const {
    if (!n.IsSequence()) parse_error(n, "expected a list");
    std::vector<T> out;
    for (const auto& x : n) out.push_back(as<T>(x));
    return out;
  }

  Matrix matrix(const YAML::Node& n) const {
    if (n.IsMap() && n["diag"]) {
      const auto d = complex_list(n["diag"]);
      Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
      for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
      return m;
    }
    if (!n.IsSequence() || n.size() == 0) parse_error(n, "matrix must be a list of rows or {diag: [...]}");
    const auto rows = static_cast<Index>(n.size());
    Matrix m(rows, rows);
    for (Index r = 0; r < rows; ++r) {
      const auto row = complex_list(n[static_cast<std::size_t>(r)]);
      if (static_cast<Index>(row.size()) != rows) parse_error(n, "matrix must be square");
      for (Index c = 0; c < rows; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
  }

  SetExpr set(const YAML::Node& n) const {
    const auto text = as<std::string>(n);
    try {
      return sets::parse_set_expr(text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParseError) throw;
      parse_error(n, "in set expression '" + text + "': " + e.what());
    }
  }

  template <class Map>
  const typename Map::mapped_type& ref(const Map& m, const YAML::Node& n, const char* what) const {
    const auto id = as<std::string>(n);
    auto it = m.find(id);
    if (it == m.end()) invalid(n, std::string("dangling reference to ") + what + " '" + id + "'");
    return it->second;
  }

  // Library errors raised while assembling declared objects become
  // validation errors that carry the position.
  template <class F>
  auto guarded(const YAML::Node& n, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError || e.code() == ErrorCode::kValidationError) {
        const std::string msg = e.what();
        if (msg.find(origin) != std::string::npos) throw;
      }
      // Keep the library's code name: the wrapper reports ValidationError.
      std::string msg = e.what();
      if (e.code() == ErrorCode::kValidationError) msg = msg.substr(to_string(e.code()).size() + 2);
      invalid(n, msg);
    }
  }
};

GroupPtr load_group(const Loader& ld, const YAML::Node& n) {
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  if (kind == "cyclic") return FiniteGroup::cyclic(ld.as<int>(ld.require(n, "n")));
  if (kind == "product") return FiniteGroup::direct_product(ld.list<int>(ld.require(n, "factors")));
  if (kind == "symmetric") return FiniteGroup::symmetric(ld.as<int>(ld.require(n, "n")));
  if (kind == "table") {
    std::vector<std::vector<int>> t;
    for (const auto& row : ld.require(n, "table")) t.push_back(ld.list<int>(row));
    return FiniteGroup::from_table(ld.get<std::string>(n, "name", "table"), std::move(t));
  }
  ld.parse_error(n, "unknown group kind '" + kind + "'");
}

UnitaryRepresentation load_representation(const Loader& ld, const Scenario& s, const YAML::Node& n) {
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  if (kind == "sum") {
    const auto parts = ld.require(n, "parts");
    if (!parts.IsSequence() || parts.size() < 2) ld.parse_error(parts, "sum needs two or more parts");
    UnitaryRepresentation acc = ld.ref(s.representations, parts[0], "representation");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      acc = direct_sum(acc, ld.ref(s.representations, parts[i], "representation"));
    }
    return acc;
  }
  if (kind == "matrix_closure") {
    std::vector<Matrix> gens;
    for (const auto& g : ld.require(n, "generators")) gens.push_back(ld.matrix(g));
    return matrix_group_closure(ld.get<std::string>(n, "name", "closure"), gens);
  }
  const GroupPtr g = ld.ref(s.groups, ld.require(n, "group"), "group");
  UnitaryRepresentation rep = [&]() -> UnitaryRepresentation {
    if (kind == "regular") return regular_representation(g);
    if (kind == "trivial") return trivial_representation(g, ld.get<int>(n, "dim", 1));
    if (kind == "characters") {
      std::vector<std::vector<int>> chars;
      for (const auto& c : ld.require(n, "characters")) {
        chars.push_back(c.IsSequence() ? ld.list<int>(c) : std::vector<int>{ld.as<int>(c)});
      }
      return character_representation(g, chars);
    }
    if (kind == "natural") return symmetric_natural(g);
    if (kind == "sign") return symmetric_sign(g);
    if (kind == "standard") return symmetric_standard(g);
    ld.parse_error(n, "unknown representation kind '" + kind + "'");
  }();
  if (n["conjugate"]) rep = conjugated(rep, ld.matrix(n["conjugate"]));
  return rep;
}

GroupMeasure load_measure(const Loader& ld, const Scenario& s, const YAML::Node& n) {
  const GroupPtr g = ld.ref(s.groups, ld.require(n, "group"), "group");
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  if (kind == "haar") return haar_uniform(g);
  if (kind == "point") return GroupMeasure::point_mass(g, ld.as<int>(ld.require(n, "element")));
  if (kind == "weights") return GroupMeasure(g, ld.list<double>(ld.require(n, "weights")));
  ld.parse_error(n, "unknown measure kind '" + kind + "'");
}

QuantumChannel load_channel(const Loader& ld, Scenario& s, const std::string& id, const YAML::Node& n) {
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  if (kind == "unitary") return QuantumChannel::unitary(ld.matrix(ld.require(n, "matrix")));
  if (kind == "group_average") {
    const auto& rep = ld.ref(s.representations, ld.require(n, "representation"), "representation");
    const auto& mu = ld.ref(s.measures, ld.require(n, "measure"), "measure");
    s.channel_sources[id] = {ld.as<std::string>(n["representation"]), ld.as<std::string>(n["measure"])};
    return group_average_channel(rep, mu);
  }
  if (kind == "mixture") {
    std::vector<QuantumChannel> parts;
    for (const auto& u : ld.require(n, "unitaries")) parts.push_back(QuantumChannel::unitary(ld.matrix(u)));
    return mix(ld.list<double>(ld.require(n, "weights")), parts);
  }
  ld.parse_error(n, "unknown channel kind '" + kind + "'");
}

std::shared_ptr<sets::Domain> load_domain(const Loader& ld, const std::string& id, const YAML::Node& n) {
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  if (kind == "integers") {
    auto d = std::make_shared<sets::IntegersDomain>(id);
    if (n["generators"]) {
      for (const auto& g : n["generators"]) {
        ld.guarded(g.second, [&] {
          d->add_generator(ld.as<std::string>(g.first), ld.set(g.second));
          return 0;
        });
      }
    }
    return d;
  }
  if (kind == "kappa") {
    auto d = std::make_shared<sets::KappaDomain>(id);
    if (n["generators"]) {
      for (const auto& g : n["generators"]) {
        ld.guarded(g.second, [&] {
          d->add_generator(ld.as<std::string>(g.first), ld.set(g.second));
          return 0;
        });
      }
    }
    if (n["shifts"]) {
      for (const auto& sh : n["shifts"]) {
        ld.guarded(sh, [&] {
          d->add_shift(ld.as<std::string>(ld.require(sh, "generator")), ld.as<Int>(ld.require(sh, "k")),
                       ld.set(ld.require(sh, "image")));
          return 0;
        });
      }
    }
    if (n["constraints"]) {
      for (const auto& c : n["constraints"]) d->add_constraint(ld.set(c));
    }
    ld.guarded(n, [&] {
      d->validate();
      return 0;
    });
    return d;
  }
  ld.parse_error(n, "unknown domain kind '" + kind + "'");
}

void load_partition(const Loader& ld, Scenario& s, const std::string& id, const YAML::Node& n) {
  auto& domain = ld.ref(s.domains, ld.require(n, "domain"), "domain");
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  sets::CountablePartition p;
  p.id = id;
  p.width = ld.get<Int>(n, "width", 1);
  if (kind == "blocks") {
    p.kind = sets::CountablePartition::Kind::kBlocks;
  } else if (kind == "family") {
    p.kind = sets::CountablePartition::Kind::kFamily;
  } else if (kind == "explicit") {
    p.kind = sets::CountablePartition::Kind::kExplicit;
    for (const auto& c : ld.require(n, "cells")) p.cells.push_back(ld.set(c));
  } else {
    ld.parse_error(n, "unknown partition kind '" + kind + "'");
  }
  for (const auto& [other, d] : s.domains) {
    if (d->has_partition(id)) ld.invalid(n, "partition '" + id + "' declared twice");
  }
  ld.guarded(n, [&] {
    domain->add_partition(std::move(p));
    return 0;
  });
}

sets::UltrafilterOracle load_oracle(const Loader& ld, const Scenario& s, const std::string& id,
                                    const YAML::Node& n) {
  const sets::DomainPtr domain = ld.ref(s.domains, ld.require(n, "domain"), "domain");
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  std::vector<sets::Registration> regs;
  if (n["registrations"]) {
    for (const auto& r : n["registrations"]) {
      regs.push_back({ld.set(ld.require(r, "set")), ld.get<bool>(r, "in", true)});
    }
  }
  auto oracle = ld.guarded(n, [&] {
    if (kind == "principal") {
      if (!regs.empty()) ld.parse_error(n, "principal oracles take no registrations");
      return sets::UltrafilterOracle::principal(id, domain, ld.as<Int>(ld.require(n, "point")));
    }
    if (kind == "free") return sets::UltrafilterOracle::free_symbolic(id, domain, regs);
    if (kind == "sigma_complete") return sets::UltrafilterOracle::sigma_complete(id, domain, regs);
    ld.parse_error(n, "unknown oracle kind '" + kind + "'");
  });
  if (n["partitions"]) {
    for (const auto& p : n["partitions"]) {
      const YAML::Node pid = p.IsMap() ? ld.require(p, "partition") : YAML::Node(p);
      const auto& part = s.partition(ld.as<std::string>(pid));
      std::optional<Int> selected;
      if (p.IsMap() && p["selected"] && !p["selected"].IsNull()) selected = ld.as<Int>(p["selected"]);
      ld.guarded(p, [&] {
        oracle.register_countable_partition(part, selected);
        return 0;
      });
    }
  }
  return oracle;
}

symbolic::SymbolicObservable load_observable(const Loader& ld, const Scenario& s, const YAML::Node& n) {
  using symbolic::SymbolicObservable;
  const sets::DomainPtr domain = ld.ref(s.domains, ld.require(n, "domain"), "domain");
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  return ld.guarded(n, [&]() -> SymbolicObservable {
    if (kind == "identity") return SymbolicObservable::identity(domain);
    if (kind == "step_projector") return SymbolicObservable::step_projector(domain, ld.set(ld.require(n, "set")));
    if (kind == "finite_projector") {
      return SymbolicObservable::finite_projector(domain, ld.list<Int>(ld.require(n, "indices")));
    }
    if (kind == "block") {
      return SymbolicObservable::block(domain, ld.list<Int>(ld.require(n, "indices")),
                                       ld.matrix(ld.require(n, "matrix")));
    }
    if (kind == "step") {
      std::vector<SetExpr> cells;
      for (const auto& c : ld.require(n, "cells")) cells.push_back(ld.set(c));
      return SymbolicObservable::step(
          sets::StepFunction(domain, std::move(cells), ld.complex_list(ld.require(n, "values"))));
    }
    if (kind == "vanishing") {
      return SymbolicObservable::vanishing(
          domain, {ld.complex(ld.require(n, "coefficient")), ld.get<double>(n, "power", 1.0),
                   ld.get<Int>(n, "center", 0)});
    }
    ld.parse_error(n, "unknown observable kind '" + kind + "'");
  });
}

symbolic::ShiftMeasure load_shift_measure(const Loader& ld, const Scenario& s, const YAML::Node& n) {
  using symbolic::ShiftMeasure;
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  return ld.guarded(n, [&]() -> ShiftMeasure {
    if (kind == "two_valued") {
      return ShiftMeasure::two_valued(sets::TwoValuedMeasure(ld.ref(s.oracles, ld.require(n, "oracle"), "oracle")));
    }
    if (kind == "points") {
      std::vector<std::pair<Int, double>> pts;
      for (const auto& p : ld.require(n, "points")) {
        pts.emplace_back(ld.as<Int>(ld.require(p, "at")), ld.as<double>(ld.require(p, "weight")));
      }
      return ShiftMeasure::finitely_supported(std::move(pts));
    }
    if (kind == "convex") {
      std::vector<std::pair<double, sets::TwoValuedMeasure>> parts;
      for (const auto& p : ld.require(n, "parts")) {
        parts.emplace_back(ld.as<double>(ld.require(p, "weight")),
                           sets::TwoValuedMeasure(ld.ref(s.oracles, ld.require(p, "oracle"), "oracle")));
      }
      return ShiftMeasure::convex(std::move(parts));
    }
    ld.parse_error(n, "unknown shift measure kind '" + kind + "'");
  });
}

symbolic::SymbolicState load_state(const Loader& ld, const Scenario& s, const YAML::Node& n) {
  using symbolic::SymbolicState;
  const auto kind = ld.as<std::string>(ld.require(n, "kind"));
  return ld.guarded(n, [&]() -> SymbolicState {
    if (kind == "vector") {
      const sets::DomainPtr domain = ld.ref(s.domains, ld.require(n, "domain"), "domain");
      auto amps = ld.complex_list(ld.require(n, "amplitudes"));
      if (ld.get<bool>(n, "normalize", false)) {
        double norm = 0.0;
        for (const auto& a : amps) norm += std::norm(a);
        for (auto& a : amps) a /= std::sqrt(norm);
      }
      return SymbolicState::vector_state(domain, ld.list<Int>(ld.require(n, "indices")), std::move(amps));
    }
    if (kind == "density") {
      const sets::DomainPtr domain = ld.ref(s.domains, ld.require(n, "domain"), "domain");
      return SymbolicState::density(domain, ld.list<Int>(ld.require(n, "support")),
                                    DensityState(ld.matrix(ld.require(n, "matrix"))));
    }
    if (kind == "atom") {
      return SymbolicState::atom(ld.ref(s.oracles, ld.require(n, "oracle"), "oracle"), ld.get<Int>(n, "offset", 0));
    }
    if (kind == "mixture") {
      std::vector<SymbolicState> parts;
      for (const auto& p : ld.require(n, "states")) parts.push_back(ld.ref(s.states, p, "state"));
      return SymbolicState::mixture(ld.list<double>(ld.require(n, "weights")), parts);
    }
    if (kind == "shift_apply") {
      return symbolic::shift_channel_apply(ld.ref(s.shift_measures, ld.require(n, "measure"), "shift measure"),
                                           ld.ref(s.states, ld.require(n, "state"), "state"));
    }
    ld.parse_error(n, "unknown state kind '" + kind + "'");
  });
}

// Parameter keys of checks that name declared objects.
void validate_references(const Loader& ld, const Scenario& s, const YAML::Node& n) {
  if (n.IsSequence()) {
    for (const auto& x : n) validate_references(ld, s, x);
    return;
  }
  if (!n.IsMap()) return;
  auto check = [&](const YAML::Node& v, auto& map, const char* what) {
    if (v.IsScalar()) {
      ld.ref(map, v, what);
    } else if (v.IsSequence()) {
      for (const auto& x : v) {
        if (x.IsScalar()) ld.ref(map, x, what);
      }
    }
  };
  for (const auto& kv : n) {
    const auto key = ld.as<std::string>(kv.first);
    const auto& v = kv.second;
    if (key == "group" || key == "groups") check(v, s.groups, "group");
    else if (key == "representation" || key == "representations") check(v, s.representations, "representation");
    else if (key == "measure" || key == "measures") {
      // Group measures and shift measures share the key; either may resolve.
      auto resolves = [&](const YAML::Node& x) {
        const auto id = ld.as<std::string>(x);
        return s.measures.count(id) || s.shift_measures.count(id);
      };
      if (v.IsScalar() && !resolves(v)) ld.invalid(v, "dangling reference to measure '" + v.Scalar() + "'");
      if (v.IsSequence()) {
        for (const auto& x : v) {
          if (x.IsScalar() && !resolves(x)) ld.invalid(x, "dangling reference to measure '" + x.Scalar() + "'");
        }
      }
    } else if (key == "channel" || key == "channels") check(v, s.channels, "channel");
    else if (key == "domain") check(v, s.domains, "domain");
    else if (key == "oracle" || key == "oracles") check(v, s.oracles, "oracle");
    else if (key == "observable" || key == "observables") check(v, s.observables, "observable");
    else if (key == "state" || key == "states" || key == "inventory") check(v, s.states, "state");
    else if (key == "partition") {
      if (v.IsScalar() && v.Scalar() != "all") {
        (void)s.partition(ld.as<std::string>(v));
      }
    } else if (!v.IsScalar()) {
      validate_references(ld, s, v);
    }
  }
}

template <class F>
void each_entry(const Loader& ld, const YAML::Node& root, const char* section, F&& f) {
  const YAML::Node n = root[section];
  if (!n) return;
  if (!n.IsMap()) ld.parse_error(n, std::string("section '") + section + "' must be a mapping of id to entry");
  for (const auto& kv : n) f(ld.as<std::string>(kv.first), kv.second);
}

}  // namespace

sets::DomainPtr Scenario::domain(const std::string& id) const {
  auto it = domains.find(id);
  if (it == domains.end()) fail(ErrorCode::kValidationError, "dangling reference to domain '" + id + "'");
  return it->second;
}

const sets::CountablePartition& Scenario::partition(const std::string& id) const {
  for (const auto& [name, d] : domains) {
    if (d->has_partition(id)) return d->partition(id);
  }
  fail(ErrorCode::kValidationError, "dangling reference to partition '" + id + "'");
}

const std::vector<std::string>& check_types() {
  static const std::vector<std::string> types = {
      "vec_non_pure",     "idempotence",    "convolution_power", "cesaro",
      "cesaro_random",    "invariance",     "ultralimit_integral", "singularization",
      "sigma_additivity", "purity",         "nontwovalued_split", "barycentric",
      "structural",
  };
  return types;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Loader ld{origin};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorCode::kParseError, origin + ":" + std::to_string(e.mark.line + 1) + ":" +
                                     std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) ld.parse_error(root, "scenario file must be a mapping");

  Scenario s;
  s.origin = origin;
  s.name = ld.as<std::string>(ld.require(root, "scenario"));
  s.description = ld.get<std::string>(root, "description", "");
  s.criterion = ld.get<int>(root, "criterion", 0);

  auto uniq = [&](const auto& map, const std::string& id, const YAML::Node& n) {
    if (map.count(id)) ld.invalid(n, "id '" + id + "' declared twice");
  };
  each_entry(ld, root, "groups", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.groups, id, n);
    s.groups.emplace(id, ld.guarded(n, [&] { return load_group(ld, n); }));
  });
  each_entry(ld, root, "representations", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.representations, id, n);
    s.representations.emplace(id, ld.guarded(n, [&] { return load_representation(ld, s, n); }));
  });
  each_entry(ld, root, "measures", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.measures, id, n);
    s.measures.emplace(id, ld.guarded(n, [&] { return load_measure(ld, s, n); }));
  });
  each_entry(ld, root, "channels", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.channels, id, n);
    s.channels.emplace(id, ld.guarded(n, [&] { return load_channel(ld, s, id, n); }));
  });
  each_entry(ld, root, "domains", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.domains, id, n);
    s.domains.emplace(id, load_domain(ld, id, n));
  });
  each_entry(ld, root, "partitions", [&](const std::string& id, const YAML::Node& n) {
    load_partition(ld, s, id, n);
  });
  each_entry(ld, root, "oracles", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.oracles, id, n);
    s.oracles.emplace(id, load_oracle(ld, s, id, n));
  });
  each_entry(ld, root, "observables", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.observables, id, n);
    s.observables.emplace(id, load_observable(ld, s, n));
  });
  each_entry(ld, root, "shift_measures", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.shift_measures, id, n);
    s.shift_measures.emplace(id, load_shift_measure(ld, s, n));
  });
  each_entry(ld, root, "states", [&](const std::string& id, const YAML::Node& n) {
    uniq(s.states, id, n);
    s.states.emplace(id, load_state(ld, s, n));
  });

  if (const YAML::Node checks = root["checks"]) {
    if (!checks.IsSequence() && !checks.IsNull()) ld.parse_error(checks, "checks must be a list");
    std::set<std::string> ids;
    for (const auto& c : checks) {
      CheckSpec spec;
      spec.id = ld.as<std::string>(ld.require(c, "id"));
      spec.type = ld.as<std::string>(ld.require(c, "type"));
      spec.params = YAML::Node(c);
      spec.line = c.Mark().is_null() ? 0 : c.Mark().line + 1;
      if (!ids.insert(spec.id).second) ld.invalid(c, "check id '" + spec.id + "' repeats");
      const auto& types = check_types();
      if (std::find(types.begin(), types.end(), spec.type) == types.end()) {
        ld.invalid(c["type"], "unknown check type '" + spec.type + "'");
      }
      validate_references(ld, s, c);
      s.checks.push_back(std::move(spec));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kParseError, path + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::vector<ScenarioListing> list_scenarios(const std::string& directory) {
  namespace fs = std::filesystem;
  std::vector<ScenarioListing> out;
  if (!fs::is_directory(directory)) {
    fail(ErrorCode::kInvalidArgument, "scenario directory " + directory + " does not exist");
  }
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.path().extension() != ".yaml") continue;
    try {
      const YAML::Node root = YAML::LoadFile(entry.path().string());
      out.push_back({root["scenario"].as<std::string>(), root["description"].as<std::string>(""),
                     root["criterion"].as<int>(0), entry.path().string()});
    } catch (const YAML::Exception& e) {
      fail(ErrorCode::kParseError, entry.path().string() + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::string default_scenario_dir() {
  if (const char* env = std::getenv("PETTIS_SCENARIOS")) return env;
  return PETTIS_SCENARIO_DIR;
}

}  // namespace pettis::cli
