#include "pettis/report.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pettis::cli {
namespace {

void flatten(const Json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) flatten(v, prefix + "." + std::to_string(i++), out);
  } else if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else {
    out[prefix] = j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string to_json(const Report& report) {
  Json records = Json::array();
  for (const auto& r : report.records) {
    records.push_back({{"id", r.id},
                       {"verdict", std::string(to_string(r.verdict))},
                       {"values", r.values},
                       {"witness", r.witness},
                       {"ms", r.ms}});
  }
  Json j = {{"scenario", report.scenario}, {"records", records}, {"pass", report.pass}};
  return j.dump(2) + "\n";
}

std::string to_csv(const Report& report) {
  std::vector<std::map<std::string, std::string>> rows;
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const auto& r : report.records) {
    std::map<std::string, std::string> flat;
    flatten(r.values, "", flat);
    for (const auto& [k, v] : flat) {
      if (seen.insert(k).second) keys.push_back(k);
    }
    rows.push_back(std::move(flat));
  }
  std::ostringstream os;
  os << "id,verdict,ms";
  for (const auto& k : keys) os << "," << csv_field(k);
  os << "\n";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    os << csv_field(r.id) << "," << to_string(r.verdict) << "," << Json(r.ms).dump();
    for (const auto& k : keys) {
      auto it = rows[i].find(k);
      os << "," << (it == rows[i].end() ? "" : csv_field(it->second));
    }
    os << "\n";
  }
  return os.str();
}

std::string render(const Report& report, ReportFormat format) {
  return format == ReportFormat::kJson ? to_json(report) : to_csv(report);
}

std::string write_report(const Report& report, const std::string& dir, ReportFormat format) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / (report.scenario + (format == ReportFormat::kJson ? ".json" : ".csv"));
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kInvalidArgument, "cannot write report " + path.string());
  out << render(report, format);
  return path.string();
}

}  // namespace pettis::cli
