// Acceptance run: one PASS/FAIL line per criterion. Each criterion loads its
// bundled scenarios, runs them with seed 0 and re-checks the measured values
// against thresholds fixed here, independently of the tolerances written in
// the scenario files. Exit status is nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pettis/channels.hpp"
#include "pettis/checks.hpp"
#include "pettis/scenario.hpp"

using namespace pettis;
using namespace pettis::cli;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  std::vector<std::string> problems;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

struct Loaded {
  Scenario scenario;
  Report report;
};

Loaded run_bundled(const std::string& id) {
  Loaded l{load_scenario(default_scenario_dir() + "/" + id + ".yaml"), {}};
  l.report = run_scenario(l.scenario, RunOptions{0, false});
  return l;
}

const Record* find_record(const Report& r, const std::string& id) {
  for (const auto& rec : r.records) {
    if (rec.id == id) return &rec;
  }
  return nullptr;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

void require_all_pass(Outcome& o, const Report& r) {
  for (const auto& rec : r.records) {
    o.require(rec.verdict == Verdict::kPass, r.scenario + "/" + rec.id + " is " + std::string(to_string(rec.verdict)));
  }
  o.require(!r.records.empty(), r.scenario + " has no records");
}

// 1. Qubit excision failure.
void check_vec_non_pure(Outcome& o) {
  const Loaded l = run_bundled("example-vec-non-pure");
  require_all_pass(o, l.report);
  o.require(l.report.records.size() == 1, "expected exactly one record");
  for (const auto& rec : l.report.records) {
    const double v = rec.values.at("expectation").get<double>();
    o.require(std::abs(v - 0.5) <= 1e-12, "<rho_u, diag(1,0)> = " + num(v));
    o.require(!rec.values.at("excises_identity").get<bool>(), "identity excises diag(1,0)");
    o.require(rec.values.at("purity") == "NOT-PURE", "purity verdict is not NOT-PURE");
    o.summary = "<rho_u, diag(1,0)> = " + num(v) + ", excises(I) = false, NOT-PURE";
  }
  o.require(l.report.elapsed_ms < 1000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
}

// 2. Haar idempotence.
void check_idempotence(Outcome& o) {
  const Loaded l = run_bundled("idempotence-haar");
  require_all_pass(o, l.report);
  std::set<std::string> groups;
  bool nonabelian6 = false;
  double worst = 0.0;
  for (const auto& rec : l.report.records) {
    for (const auto& c : rec.values.at("cases")) {
      const double d = c.at("distance").get<double>();
      const int dim = c.at("dim").get<int>();
      worst = std::max(worst, d);
      o.require(d < 1e-10, c.at("representation").get<std::string>() + " distance " + num(d));
      o.require(dim >= 2 && dim <= 4, "representation dimension " + std::to_string(dim));
      groups.insert(c.at("group").get<std::string>());
      if (c.at("order").get<int>() == 6 && !c.at("abelian").get<bool>()) nonabelian6 = true;
    }
  }
  for (const char* g : {"Z2", "Z3", "Z4", "Z2xZ2"}) o.require(groups.count(g) == 1, std::string("no case on ") + g);
  o.require(nonabelian6, "no non-abelian group of order 6");
  o.require(l.report.elapsed_ms < 5000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
  o.summary = std::to_string(groups.size()) + " groups, max ||Q^2 - Q|| = " + num(worst);
}

// 3. Powers against convolution powers.
void check_convolution_power(Outcome& o) {
  const Loaded l = run_bundled("convolution-power-channels");
  require_all_pass(o, l.report);
  for (const auto& rec : l.report.records) {
    const int cases = rec.values.at("cases").get<int>();
    const double d = rec.values.at("max_distance").get<double>();
    o.require(cases >= 20, std::to_string(cases) + " random measures");
    o.require(d < 1e-10, "max distance " + num(d));
    o.summary = std::to_string(cases) + " random mu, max distance " + num(d);
  }
  for (const auto& spec : l.scenario.checks) {
    o.require(spec.params["max_n"].as<int>() <= 5, "powers beyond n = 5");
  }
  o.require(l.report.elapsed_ms < 10000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
}

void check_limit(Outcome& o, const Json& c, const std::string& label) {
  const auto n = c.at("n").get<std::uint64_t>();
  const double idem = std::max({c.at("limit_after_phi").get<double>(), c.at("phi_after_limit").get<double>(),
                                c.at("limit_squared").get<double>()});
  const double res = std::min(c.at("final_residual").get<double>(), c.at("final_plain_residual").get<double>());
  o.require(n <= 5000, label + " needed n = " + std::to_string(n));
  o.require(res < 1e-8, label + " residual " + num(res));
  o.require(idem <= 1e-7, label + " idempotence " + num(idem));
}

// 4. Cesaro limits.
void check_cesaro(Outcome& o) {
  const auto start = Clock::now();
  const Loaded a = run_bundled("cesaro-dephasing");
  const Loaded b = run_bundled("cesaro-random-channels");
  require_all_pass(o, a.report);
  require_all_pass(o, b.report);
  double worst_dephasing = 0.0;
  for (const auto& rec : a.report.records) {
    check_limit(o, rec.values, rec.id);
    const double d = rec.values.at("distance_to_expected").get<double>();
    worst_dephasing = std::max(worst_dephasing, d);
    o.require(d < 1e-6, rec.id + " distance to dephasing " + num(d));
  }
  // The literal conjugation by diag(1, i), against a loop-built dephasing Choi.
  Matrix u = Matrix::Identity(2, 2);
  u(1, 1) = Complex(0.0, 1.0);
  const CesaroResult lim = cesaro_limit(QuantumChannel::unitary(u), 1e-8, 5000);
  const Matrix deph = oracle::choi(
      [](const Matrix& m) {
        Matrix d = Matrix::Zero(2, 2);
        d(0, 0) = m(0, 0);
        d(1, 1) = m(1, 1);
        return d;
      },
      2);
  const double direct = oracle::frobenius(choi(lim.limit).matrix(), deph);
  o.require(direct < 1e-6, "diag(1,i) limit differs from dephasing by " + num(direct));

  std::size_t cases = 0;
  std::uint64_t max_n = 0;
  for (const auto& rec : b.report.records) {
    for (const auto& c : rec.values.at("cases")) {
      check_limit(o, c, c.at("group").get<std::string>() + " dim " + std::to_string(c.at("dim").get<int>()));
      o.require(c.at("dim").get<int>() <= 4, "dimension above 4");
      max_n = std::max(max_n, c.at("n").get<std::uint64_t>());
      ++cases;
    }
  }
  o.require(cases >= 10, std::to_string(cases) + " random channels");
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  o.require(ms < 60000.0, "runtime " + num(ms) + " ms");
  o.summary = "diag(1,i) -> dephasing within " + num(std::max(worst_dephasing, direct)) + "; " +
              std::to_string(cases) + " random channels, largest n = " + std::to_string(max_n);
}

// 5. Asymptotic left invariance.
void check_invariance(Outcome& o) {
  const Loaded l = run_bundled("left-invariance-diagnostic");
  require_all_pass(o, l.report);
  std::set<std::string> mixing, stuck;
  for (const auto& rec : l.report.records) {
    for (const auto& c : rec.values.at("cases")) {
      const std::string id = c.at("measure").get<std::string>();
      const GroupMeasure& mu = l.scenario.measures.at(id);
      const GroupPtr& g = mu.group();
      // Independent Markov iteration of d_n for n <= 200.
      std::vector<double> p = mu.weights();
      double d_last = 0.0, worst_one = 0.0;
      for (int n = 1; n <= 200; ++n) {
        double d = 0.0;
        for (int h = 0; h < g->order(); ++h) {
          std::vector<double> shifted(p.size());
          for (int x = 0; x < g->order(); ++x) shifted[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(g->mul(h, x))];
          d = std::max(d, oracle::total_variation(p, shifted));
        }
        d_last = d;
        worst_one = std::max(worst_one, std::abs(d - 1.0));
        p = oracle::convolve(p, mu.weights(), [&](int a, int b) { return g->mul(a, b); });
      }
      const bool full = std::all_of(mu.weights().begin(), mu.weights().end(), [](double w) { return w > 0.0; });
      if (c.at("expect") == "mixing") {
        o.require(full, id + " is not full-support");
        o.require(c.at("d_final").get<double>() < 1e-6, id + " d_200 = " + num(c.at("d_final").get<double>()));
        o.require(d_last < 1e-6, id + " recomputed d_200 = " + num(d_last));
        mixing.insert(g->name());
      } else {
        o.require(c.at("max_deviation_from_one").get<double>() <= 1e-12, id + " d_n departs from 1");
        o.require(worst_one <= 1e-12, id + " recomputed d_n departs from 1");
        const bool point = std::count_if(mu.weights().begin(), mu.weights().end(), [](double w) { return w > 0.0; }) == 1;
        o.require(point && mu.weight(g->identity()) == 0.0, id + " is not a point mass off the identity");
        stuck.insert(g->name());
      }
    }
  }
  o.require(mixing.count("Z3") && mixing.count("Z5"), "mixing cases must cover Z3 and Z5");
  o.require(stuck.count("Z4") == 1, "no point mass on Z4");
  o.require(l.report.elapsed_ms < 5000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
  o.summary = "d_200 < 1e-6 on Z3, Z5; d_n = 1 for delta_g on Z4";
}

// 6. Integral equals ultralimit.
void check_ultralimit(Outcome& o) {
  const Loaded l = run_bundled("ultralimit-integral");
  require_all_pass(o, l.report);
  std::set<std::string> kinds;
  for (const auto& rec : l.report.records) {
    o.require(rec.values.at("functions").get<int>() >= 50, "fewer than 50 step functions");
    o.require(rec.values.at("generators").size() == 4, "algebra is not 4-generated");
    for (const auto& c : rec.values.at("oracles")) {
      o.require(c.at("mismatches").get<int>() == 0, c.at("oracle").get<std::string>() + " has bitwise mismatches");
      kinds.insert(c.at("kind").get<std::string>());
    }
  }
  o.require(kinds.count("principal") && kinds.count("free"), "needs principal and free oracles");
  o.require(l.report.elapsed_ms < 1000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
  o.summary = "50 step functions, bitwise equal for principal and free oracles";
}

bool is_vector_state(const symbolic::SymbolicState& s) {
  return s.components().size() == 1 && std::holds_alternative<symbolic::DensityPart>(s.components()[0].part);
}

// 7. Singular outputs.
void check_singular(Outcome& o) {
  const Loaded l = run_bundled("singular-outputs");
  require_all_pass(o, l.report);
  std::set<std::string> seen;
  for (const auto& rec : l.report.records) {
    for (const auto& c : rec.values.at("cases")) {
      const std::string state = c.at("state").get<std::string>();
      seen.insert(state);
      o.require(c.at("singular").get<bool>(), state + " output is not singular");
      o.require(c.at("witnesses").get<int>() >= 50, state + " checked on fewer than 50 witnesses");
      o.require(c.at("lambda").get<double>() == 0.0, state + " lambda " + num(c.at("lambda").get<double>()));
    }
  }
  for (const auto& [id, s] : l.scenario.states) {
    if (is_vector_state(s)) o.require(seen.count(id) == 1, "vector state " + id + " is not pushed through a channel");
  }
  for (const auto& [id, mu] : l.scenario.shift_measures) {
    o.require(mu.kind() == symbolic::ShiftMeasure::Kind::kTwoValued, id + " is not two-valued");
  }
  std::set<sets::OracleKind> oracle_kinds;
  for (const auto& [id, u] : l.scenario.oracles) oracle_kinds.insert(u.kind());
  o.require(oracle_kinds.count(sets::OracleKind::kFreeSymbolic) && oracle_kinds.count(sets::OracleKind::kSigmaCompleteSymbolic),
            "needs free and sigma-complete oracles");
  o.require(l.report.elapsed_ms < 2000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
  o.summary = std::to_string(seen.size()) + " vector states, all outputs singular with lambda = 0";
}

// 8. Sigma-additivity and its boundary.
void check_sigma(Outcome& o) {
  const Loaded l = run_bundled("sigma-additivity-boundary");
  require_all_pass(o, l.report);
  bool additive = false, boundary = false;
  std::set<std::string> covered;
  for (const auto& rec : l.report.records) {
    for (const auto& c : rec.values.at("cases")) {
      const auto& st = l.scenario.states.at(c.at("state").get<std::string>());
      const auto& atom = std::get<symbolic::UltralimitAtom>(st.components().front().part);
      const double lhs = c.at("lhs").get<double>(), rhs = c.at("rhs").get<double>();
      if (atom.oracle.kind() == sets::OracleKind::kSigmaCompleteSymbolic) {
        o.require(c.at("additive").get<bool>() && lhs == 1.0 && rhs == 1.0,
                  "sigma-complete output fails on " + c.at("partition").get<std::string>());
        covered.insert(atom.oracle.name() + "/" + c.at("partition").get<std::string>());
        additive = true;
      } else {
        const bool singletons = c.at("partition") == "singletons";
        if (singletons && atom.oracle.kind() == sets::OracleKind::kFreeSymbolic && !c.at("additive").get<bool>() &&
            lhs == 1.0 && rhs == 0.0)
          boundary = true;
      }
    }
  }
  for (const auto& [id, u] : l.scenario.oracles) {
    if (u.kind() != sets::OracleKind::kSigmaCompleteSymbolic) continue;
    for (const auto& [pid, p] : u.domain()->partitions()) {
      if (u.has_partition(pid)) o.require(covered.count(id + "/" + pid) == 1, "registered partition " + pid + " unchecked");
    }
  }
  o.require(additive, "no sigma-complete additive verdict");
  o.require(boundary, "no free-oracle singleton failure with lhs 1, rhs 0");
  o.require(l.report.elapsed_ms < 1000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
  o.summary = std::to_string(covered.size()) + " sigma-complete partitions additive; free singletons lhs 1, rhs 0";
}

// 9. Purity of atoms from basis vectors and the block example.
void check_purity(Outcome& o) {
  const Loaded l = run_bundled("example-purity");
  require_all_pass(o, l.report);
  const Record* pure = find_record(l.report, "atom-e0-pure");
  const Record* mixed = find_record(l.report, "atom-plus-not-pure");
  o.require(pure && mixed, "records missing");
  if (pure) {
    o.require(pure->values.at("purity") == "PURE", "atom from e0 is not PURE");
    double smallest = 1.0;
    for (const auto& w : pure->witness.at("excision")) {
      o.require(w.at("norm").get<double>() < w.at("eps").get<double>(), "witness norm not below eps");
      smallest = std::min(smallest, w.at("eps").get<double>());
    }
    o.require(smallest <= 1e-6, "eps schedule stops at " + num(smallest));
  }
  if (mixed) {
    o.require(mixed->values.at("purity") == "NOT-PURE", "(e0+e1)/sqrt2 image is not NOT-PURE");
    const auto& st = l.scenario.states.at("atom-plus");
    const auto& dom = *st.domain();
    const auto w = sets::parse_set_expr(mixed->witness.at("projector").get<std::string>());
    const auto x = sets::SetExpr::generator("X");
    o.require(dom.equivalent(w, x) || dom.equivalent(w, ~x), "witness is not P_X");
    o.require(dom.equivalent(sets::SetExpr::shift(1, x), ~x), "shift_1(X) is not the complement of X");
  }
  o.require(l.report.elapsed_ms < 1000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
  o.summary = "PURE with witnesses down to eps 1e-6; NOT-PURE with witness P_X";
}

// 10. Split under a convex combination of ultrafilters.
void check_split(Outcome& o) {
  const Loaded l = run_bundled("nontwovalued-split");
  require_all_pass(o, l.report);
  for (const auto& rec : l.report.records) {
    const double a = rec.values.at("value_a").get<double>(), b = rec.values.at("value_b").get<double>();
    o.require(a == 1.0 && b == 0.0, "witness values (" + num(a) + ", " + num(b) + ")");
    o.require(rec.values.at("weight_a").get<double>() == 0.3 && rec.values.at("weight_b").get<double>() == 0.7,
              "weights are not (0.3, 0.7)");
    o.summary = "witness values (1, 0), weights (0.3, 0.7)";
  }
  o.require(l.report.elapsed_ms < 1000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
}

// 11. Barycentric lemma.
void check_barycentric(Outcome& o) {
  const Loaded l = run_bundled("barycentric-mixtures");
  require_all_pass(o, l.report);
  for (const auto& rec : l.report.records) {
    const double d = rec.values.at("max_deviation").get<double>();
    o.require(rec.values.at("finite_cases").get<int>() >= 20, "fewer than 20 random mixtures");
    o.require(d < 1e-12, "deviation " + num(d));
    o.summary = std::to_string(rec.values.at("finite_cases").get<int>()) + " mixtures, max deviation " + num(d);
  }
  o.require(l.report.elapsed_ms < 2000.0, "runtime " + num(l.report.elapsed_ms) + " ms");
}

int run_verify_all() {
  const std::string cmd = std::string(PETTIS_CLI_PATH) + " verify-all --seed 0 > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// 12. Structural suite and the full bundled run.
void check_structural(Outcome& o) {
  const Loaded l = run_bundled("structural-suite");
  require_all_pass(o, l.report);
  for (const auto& rec : l.report.records) {
    for (const char* key : {"trace_preservation", "output_positivity", "choi_psd", "convolution_associativity",
                            "fip_dichotomy", "yosida_hewitt_recombination"}) {
      o.require(rec.values.contains(key) && rec.values.at(key).at("ok").get<bool>(), std::string(key) + " failed");
    }
  }
  const auto start = Clock::now();
  const int status = run_verify_all();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  o.require(status == 0, "verify-all exited " + std::to_string(status));
  o.require(secs < 180.0, "verify-all took " + num(secs) + " s");
  o.summary = "6 invariant families hold at seed 0; verify-all exit 0 in " + num(secs) + " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, check_vec_non_pure}, {2, check_idempotence}, {3, check_convolution_power}, {4, check_cesaro},
      {5, check_invariance},   {6, check_ultralimit},  {7, check_singular},          {8, check_sigma},
      {9, check_purity},       {10, check_split},      {11, check_barycentric},      {12, check_structural}};
  int failed = 0;
  for (const auto& [n, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.problems.push_back(std::string("exception: ") + e.what());
    }
    if (o.problems.empty()) {
      std::cout << "PASS criterion " << n << ": " << o.summary << "\n";
    } else {
      ++failed;
      std::cout << "FAIL criterion " << n << ":";
      for (const auto& p : o.problems) std::cout << " [" << p << "]";
      std::cout << "\n";
    }
  }
  std::cout << (failed ? "ACCEPTANCE FAILED: " + std::to_string(failed) + " of 12" : std::string("ACCEPTANCE PASSED: 12 of 12"))
            << std::endl;
  return failed ? 1 : 0;
}
