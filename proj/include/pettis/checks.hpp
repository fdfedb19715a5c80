#pragma once

// Check runners. Each scenario check yields exactly one record whose
// verdict is PASS, FAIL or INCONCLUSIVE; FAIL records carry a witness.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pettis/random.hpp"
#include "pettis/scenario.hpp"

namespace pettis::cli {

enum class Verdict { kPass, kFail, kInconclusive };

std::string_view to_string(Verdict v);

using Json = nlohmann::ordered_json;

struct Record {
  std::string id;
  std::string type;
  Verdict verdict = Verdict::kFail;
  Json values = Json::object();
  Json witness = Json::object();
  double ms = 0.0;
};

struct RunOptions {
  std::uint64_t seed = 0;
  // Report runtimes as 0 so that repeated runs are byte-identical.
  bool fixed_clock = false;
};

struct Report {
  std::string scenario;
  std::vector<Record> records;
  std::vector<std::string> warnings;
  bool pass = true;
  // Wall time of the whole run, regardless of fixed_clock.
  double elapsed_ms = 0.0;
};

// Per-check generator: the scenario seed mixed with a hash of the check id.
Rng check_rng(std::uint64_t seed, const std::string& check_id);

Record run_check(Scenario& scenario, const CheckSpec& spec, const RunOptions& options);
Report run_scenario(Scenario& scenario, const RunOptions& options);

}  // namespace pettis::cli
