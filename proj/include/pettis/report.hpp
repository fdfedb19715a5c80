#pragma once

#include <string>

#include "pettis/checks.hpp"

namespace pettis::cli {

enum class ReportFormat { kJson, kCsv };

// {scenario, records: [{id, verdict, values, witness, ms}], pass}
std::string to_json(const Report& report);
// One row per record: id, verdict, ms, then the flattened value keys.
std::string to_csv(const Report& report);

std::string render(const Report& report, ReportFormat format);
// Writes <dir>/<scenario>.<ext> and returns the path.
std::string write_report(const Report& report, const std::string& dir, ReportFormat format);

}  // namespace pettis::cli
