/*
Copyright 2026 The CrowdCharge Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Command-line front end: generate scenarios, run one policy, sweep ratios, render tables.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crowdcharge/report.hpp"
#include "crowdcharge/scenario.hpp"
#include "crowdcharge/sim.hpp"
#include "crowdcharge/sweep.hpp"

namespace fs = std::filesystem;
using namespace crowdcharge;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;

// Usage problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Policy> parse_policies(const std::vector<std::string>& names) {
  std::vector<Policy> out;
  for (const auto& group : names) {
    std::stringstream in(group);
    for (std::string name; std::getline(in, name, ',');) {
      try {
        out.push_back(policy_from_string(name));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  if (out.empty()) throw UsageError("no policies given");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::vector<TableRow> read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  auto rows = read_table_csv(in, path.string());
  if (rows.empty()) throw UsageError("table " + path.string() + " has no rows");
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowdsourced wireless energy sharing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 1;

  auto* generate = app.add_subcommand("generate", "Generate a synthetic scenario");
  double ratio = -1.0;
  generate->add_option("--config", config_path, "Scenario config JSON (defaults when omitted)")->check(CLI::ExistingFile);
  generate->add_option("--seed", seed, "Generator seed")->required();
  generate->add_option("--ratio", ratio, "Override the supply/demand ratio");
  generate->add_option("--out", out_path, "Scenario file to write")->required();

  auto* run_cmd = app.add_subcommand("run", "Run one policy over a scenario");
  std::string scenario_path;
  std::string policy_name;
  std::string ledger_path;
  bool timing = false;
  run_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--policy", policy_name, "reactive | proactive | bruteforce")
      ->required()
      ->check(CLI::IsMember({"reactive", "proactive", "bruteforce"}));
  run_cmd->add_option("--seed", seed, "Simulation seed")->required();
  run_cmd->add_option("--out", out_path, "Per-request report CSV")->required();
  run_cmd->add_option("--ledger", ledger_path, "Transfer ledger CSV");
  run_cmd->add_flag("--timing", timing, "Record wall-clock runtime (output no longer reproducible)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run policies across ratios and seeds");
  std::string ratios_text;
  std::vector<std::string> policy_names{"reactive,proactive,bruteforce"};
  int seeds = 1;
  unsigned threads = 0;
  bool plot = false;
  sweep_cmd->add_option("--config", config_path, "Scenario config JSON (defaults when omitted)")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--ratios", ratios_text, "a:b[:step] or a comma-separated list")->required();
  sweep_cmd->add_option("--policies", policy_names, "Policies, comma or space separated");
  sweep_cmd->add_option("--seeds", seeds, "Seeds per ratio")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads, "Worker threads (default CROWDCHARGE_THREADS or all cores)");
  sweep_cmd->add_option("--out", out_path, "Output directory")->required();
  sweep_cmd->add_flag("--timing", timing, "Record wall-clock runtime (output no longer reproducible)");
  sweep_cmd->add_flag("--plot", plot, "Also write SVG plots");

  auto* report_cmd = app.add_subcommand("report", "Render a sweep table");
  std::string in_path;
  std::string format = "csv";
  report_cmd->add_option("--in", in_path, "Sweep directory or results CSV")->required()->check(CLI::ExistingPath);
  report_cmd->add_option("--format", format, "csv | md")->check(CLI::IsMember({"csv", "md"}));
  report_cmd->add_option("--out", out_path, "Output file (stdout when omitted)");
  report_cmd->add_flag("--plot", plot, "Write SVG plots next to the input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) {
      ScenarioConfig config = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
      config.seed = seed;
      if (ratio >= 0.0) config.supply_demand_ratio = ratio;
      const auto scenario = generate_scenario(config);
      fs::path out(out_path);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      save_scenario(scenario, out);
    } else if (*run_cmd) {
      const auto scenario = load_scenario(scenario_path);
      RunOptions options;
      options.measure_runtime = timing;
      const auto prepared = prepare(scenario, options);
      const auto start = std::chrono::steady_clock::now();
      auto trace = simulate(prepared, policy_from_string(policy_name), seed, options);
      if (timing) {
        trace.report.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
      std::ostringstream csv;
      write_report_csv(trace.report, csv);
      write_text(out_path, csv.str());
      if (!ledger_path.empty()) {
        std::ostringstream ledger;
        write_ledger_csv(trace.ledger, ledger);
        write_text(ledger_path, ledger.str());
      }
      std::cout << to_string(trace.report.policy) << ": " << trace.report.fulfilled() << "/"
                << trace.report.requests() << " fulfilled, " << format_fixed(trace.report.total_delivered_wh)
                << " Wh delivered\n";
    } else if (*sweep_cmd) {
      SweepSpec spec;
      spec.config = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
      try {
        spec.ratios = parse_ratios(ratios_text);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      spec.policies = parse_policies(policy_names);
      spec.seeds = seeds;
      spec.threads = threads;
      spec.options.measure_runtime = timing;
      const auto rows = sweep(spec);
      const fs::path dir(out_path);
      fs::create_directories(dir);
      std::ostringstream csv, md;
      write_table_csv(rows, csv);
      write_table_markdown(rows, md);
      write_text(dir / "results.csv", csv.str());
      write_text(dir / "results.md", md.str());
      if (plot) write_plots(rows, dir);
      std::size_t violations = 0;
      for (const auto& r : rows) violations += r.audit_violations;
      std::cout << rows.size() << " runs written to " << dir.string() << "\n";
      if (violations > 0) {
        std::cerr << "ledger audit: " << violations << " violations\n";
        return kData;
      }
    } else if (*report_cmd) {
      fs::path in(in_path);
      const fs::path table = fs::is_directory(in) ? in / "results.csv" : in;
      const auto rows = read_table(table);
      std::ostringstream text;
      if (format == "md") {
        write_table_markdown(rows, text);
      } else {
        write_table_csv(rows, text);
      }
      if (out_path.empty()) {
        std::cout << text.str();
      } else {
        write_text(out_path, text.str());
      }
      if (plot) {
        for (const auto& p : write_plots(rows, table.has_parent_path() ? table.parent_path() : fs::path("."))) {
          std::cerr << "wrote " << p.string() << "\n";
        }
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
