// pettis: runs declarative scenario files and emits JSON or CSV reports.
//
//   pettis run <file> [--seed N] [--report-dir DIR] [--format json|csv] [--fixed-clock]
//   pettis list [--machine]
//   pettis verify-all [--seed N] [--report-dir DIR] [--format json|csv] [--fixed-clock]
//
// Exit status: 0 all checks pass, 1 a check did not pass, 2 input error.

#include <chrono>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pettis/checks.hpp"
#include "pettis/report.hpp"
#include "pettis/scenario.hpp"

namespace {

using namespace pettis::cli;

struct Options {
  std::uint64_t seed = 0;
  std::string report_dir;
  std::string format = "json";
  bool fixed_clock = false;
  std::string scenario_dir = default_scenario_dir();
};

ReportFormat parse_format(const std::string& f) { return f == "csv" ? ReportFormat::kCsv : ReportFormat::kJson; }

void print_summary(const Report& report, std::ostream& os) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& r : report.records) {
    os << "  " << to_string(r.verdict) << "  " << r.id;
    if (r.verdict != Verdict::kPass) os << "  witness=" << r.witness.dump();
    os << "\n";
  }
}

// Loads and runs one file; returns the exit status for it.
int run_one(const std::string& path, const Options& opt, bool stdout_report) {
  Scenario scenario;
  try {
    scenario = load_scenario(path);
  } catch (const pettis::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const Report report = run_scenario(scenario, {opt.seed, opt.fixed_clock});
  const auto format = parse_format(opt.format);
  if (!opt.report_dir.empty()) {
    const auto written = write_report(report, opt.report_dir, format);
    std::cout << (report.pass ? "PASS " : "FAIL ") << report.scenario << " -> " << written << "\n";
    print_summary(report, std::cout);
  } else if (stdout_report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << render(report, format);
  } else {
    std::cout << (report.pass ? "PASS " : "FAIL ") << report.scenario << " ("
              << static_cast<long>(report.elapsed_ms) << " ms)\n";
    print_summary(report, std::cout);
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario runner for averaged quantum channels and ultralimit states"};
  app.require_subcommand(1);
  Options opt;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Seed for randomized checks")->default_val(0);
    cmd->add_option("--report-dir", opt.report_dir, "Directory for report files");
    cmd->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->default_val("json");
    cmd->add_flag("--fixed-clock", opt.fixed_clock, "Report runtimes as 0 for byte-identical output");
  };

  std::string file;
  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("file", file, "Scenario file")->required();
  add_run_flags(run);

  bool machine = false;
  auto* list = app.add_subcommand("list", "List bundled scenarios");
  list->add_flag("--machine", machine, "Print sorted identifiers only");
  list->add_option("--scenario-dir", opt.scenario_dir, "Directory of bundled scenarios");

  auto* verify = app.add_subcommand("verify-all", "Run every bundled scenario");
  add_run_flags(verify);
  verify->add_option("--scenario-dir", opt.scenario_dir, "Directory of bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_one(file, opt, true);

    const auto listing = list_scenarios(opt.scenario_dir);
    if (*list) {
      for (const auto& s : listing) {
        if (machine) {
          std::cout << s.id << "\n";
        } else {
          std::cout << s.id << "  [criterion " << s.criterion << "]  " << s.description << "\n";
        }
      }
      return 0;
    }

    const auto start = std::chrono::steady_clock::now();
    int status = 0;
    for (const auto& s : listing) status = std::max(status, run_one(s.path, opt, false));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (status == 0 ? "ALL PASS" : "NOT ALL PASS") << ": " << listing.size() << " scenarios in " << secs
              << " s\n";
    return status;
  } catch (const pettis::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
