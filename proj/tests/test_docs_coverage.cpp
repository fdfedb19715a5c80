// Cross-checks the scenario table in the README against the bundled suite:
// every scenario id must appear in exactly one table row, and that row must
// name the criterion the scenario file declares.

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <regex>
#include <string>

#include "pettis/scenario.hpp"

using namespace pettis::cli;

TEST(DocsCoverage, EachScenarioIdAppearsInExactlyOneTableRow) {
  std::ifstream in(PETTIS_README);
  ASSERT_TRUE(in) << PETTIS_README;
  // | `scenario-id` | 7 | ...
  const std::regex row(R"(^\|\s*`([a-z0-9-]+)`\s*\|\s*(\d+)\s*\|)");
  std::multimap<std::string, int> rows;
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (std::regex_search(line, m, row)) rows.emplace(m[1], std::stoi(m[2]));
  }
  const auto listing = list_scenarios(default_scenario_dir());
  ASSERT_FALSE(listing.empty());
  for (const auto& s : listing) {
    EXPECT_EQ(rows.count(s.id), 1u) << s.id;
    const auto it = rows.find(s.id);
    if (it != rows.end()) {
      EXPECT_EQ(it->second, s.criterion) << s.id;
    }
  }
  EXPECT_EQ(rows.size(), listing.size()) << "table lists ids that are not bundled";
}
