#pragma once

// Declarative scenario files: named groups, representations, measures,
// channels, index domains, oracles, observables and states, followed by a
// list of checks to run against them.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pettis/channels.hpp"
#include "pettis/domain.hpp"
#include "pettis/error.hpp"
#include "pettis/group_measure.hpp"
#include "pettis/symbolic_states.hpp"
#include "pettis/ultrafilter.hpp"

namespace pettis::cli {

struct CheckSpec {
  std::string id;
  std::string type;
  YAML::Node params;
  int line = 0;
};

struct Scenario {
  std::string name;
  std::string description;
  int criterion = 0;
  std::string origin;

  std::map<std::string, GroupPtr> groups;
  std::map<std::string, UnitaryRepresentation> representations;
  std::map<std::string, GroupMeasure> measures;
  std::map<std::string, QuantumChannel> channels;
  std::map<std::string, std::shared_ptr<sets::Domain>> domains;
  std::map<std::string, sets::UltrafilterOracle> oracles;
  std::map<std::string, symbolic::SymbolicObservable> observables;
  std::map<std::string, symbolic::ShiftMeasure> shift_measures;
  std::map<std::string, symbolic::SymbolicState> states;
  std::vector<CheckSpec> checks;

  sets::DomainPtr domain(const std::string& id) const;
  const sets::CountablePartition& partition(const std::string& id) const;
  // The representation behind a group-average channel, when it was declared so.
  std::map<std::string, std::pair<std::string, std::string>> channel_sources;
};

// Errors: kParseError (with line and column), kValidationError.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

// Known check types, in the order the docs list them.
const std::vector<std::string>& check_types();

// Bundled scenario files, sorted by scenario id.
struct ScenarioListing {
  std::string id;
  std::string description;
  int criterion = 0;
  std::string path;
};
std::vector<ScenarioListing> list_scenarios(const std::string& directory);
std::string default_scenario_dir();

}  // namespace pettis::cli
