#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lendsim/engine.hpp"
#include "lendsim/feasibility.hpp"
#include "lendsim/scenario.hpp"

namespace {

using lendsim::ErrorCode;
using lendsim::SimError;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitNondeterministic = 3;

json load_doc_with_overrides(const std::string& path,
                             const std::vector<std::string>& overrides) {
  json doc = lendsim::read_json_file(path);
  for (const std::string& expr : overrides) {
    lendsim::apply_override_expr(doc, expr);
  }
  return doc;
}

std::filesystem::path resolve_outdir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LENDSIM_OUT")) return env;
  return "out";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw SimError(ErrorCode::ConfigError, "cannot write " + path.string());
  }
  out << content;
}

// values come either as a JSON array ("[0, 60, 600]") or as a comma list
// ("0,60,600"); bare tokens that do not parse as JSON are taken as strings
std::vector<json> parse_values(const std::string& text) {
  std::vector<json> values;
  try {
    json parsed = json::parse(text);
    if (parsed.is_array()) {
      for (auto& v : parsed) values.push_back(std::move(v));
      return values;
    }
    values.push_back(std::move(parsed));
    return values;
  } catch (const json::exception&) {
  }
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    try {
      values.push_back(json::parse(token));
    } catch (const json::exception&) {
      values.push_back(token);
    }
  }
  return values;
}

int run_command(const std::string& scenario_path,
                const std::vector<std::string>& overrides,
                const std::string& outdir_flag) {
  const json doc = load_doc_with_overrides(scenario_path, overrides);
  const lendsim::Scenario scenario = lendsim::parse_scenario(doc);
  const lendsim::RunResult result = lendsim::run_scenario(scenario);

  const std::filesystem::path outdir = resolve_outdir(outdir_flag);
  std::filesystem::create_directories(outdir);
  const std::string stem =
      scenario.name + "-" + lendsim::hash_hex(lendsim::scenario_hash(doc));
  const auto metrics_path = outdir / (stem + ".metrics.csv");
  const auto summary_path = outdir / (stem + ".summary.json");
  write_file(metrics_path, result.metrics_csv);
  write_file(summary_path, result.summary.dump(2) + "\n");

  std::cout << "scenario " << scenario.name << " (" << scenario.horizon_ticks
            << " ticks)\n"
            << "  peak bad debt  " << result.summary["peak_bad_debt"]["value"]
            << " at tick " << result.summary["peak_bad_debt"]["tick"] << "\n"
            << "  final bad debt " << result.summary["final_bad_debt"] << "\n"
            << "  liquidations   " << result.summary["liquidations"]["count"]
            << "\n"
            << "  metrics  " << metrics_path.string() << "\n"
            << "  summary  " << summary_path.string() << "\n";
  return kExitOk;
}

int validate_command(const std::string& scenario_path,
                     const std::vector<std::string>& overrides) {
  const json doc = load_doc_with_overrides(scenario_path, overrides);
  const lendsim::Scenario scenario = lendsim::parse_scenario(doc);
  lendsim::World world(scenario);  // builds reserves, feeds, seeds, agents
  std::cout << "ok " << scenario.name << " "
            << lendsim::hash_hex(lendsim::scenario_hash(doc)) << " ("
            << scenario.assets.size() << " assets, " << scenario.agents.size()
            << " agents, horizon " << scenario.horizon_ticks << ")\n";
  return kExitOk;
}

int sweep_command(const std::string& scenario_path,
                  const std::vector<std::string>& overrides,
                  const std::string& path, const std::string& values_text,
                  bool parallel, const std::string& outdir_flag) {
  const json doc = load_doc_with_overrides(scenario_path, overrides);
  const std::vector<json> values = parse_values(values_text);
  const auto entries = lendsim::sweep(doc, path, values, parallel);

  json out = json::object();
  out["scenario"] = doc.value("name", "");
  out["path"] = path;
  json rows = json::array();
  for (const auto& entry : entries) {
    rows.push_back({{"value", entry.value}, {"summary", entry.summary}});
  }
  out["runs"] = std::move(rows);

  const std::filesystem::path outdir = resolve_outdir(outdir_flag);
  std::filesystem::create_directories(outdir);
  const std::string stem = doc.value("name", "sweep") + "-sweep-" +
                           lendsim::hash_hex(lendsim::scenario_hash(doc));
  const auto sweep_path = outdir / (stem + ".json");
  write_file(sweep_path, out.dump(2) + "\n");

  std::cout << "sweep over " << path << ":\n";
  for (const auto& entry : entries) {
    std::cout << "  " << entry.value.dump() << " -> peak bad debt "
              << entry.summary["peak_bad_debt"]["value"] << ", final "
              << entry.summary["final_bad_debt"] << "\n";
  }
  std::cout << "  written  " << sweep_path.string() << "\n";
  return kExitOk;
}

int analyze_command(const std::string& snapshot_path,
                    const std::string& available_threshold,
                    const std::string& deposit_threshold) {
  lendsim::FeasibilityThresholds thresholds;
  thresholds.available_ratio = lendsim::fd(available_threshold);
  thresholds.deposit_ratio = lendsim::fd(deposit_threshold);
  const auto snapshots = lendsim::read_snapshot_file(snapshot_path);
  const auto rows = lendsim::rank(snapshots, thresholds);
  std::cout << lendsim::render_feasibility_table(rows);
  return kExitOk;
}

int replay_command(const std::string& scenario_path,
                   const std::vector<std::string>& overrides) {
  const json doc = load_doc_with_overrides(scenario_path, overrides);
  const lendsim::Scenario scenario = lendsim::parse_scenario(doc);
  const lendsim::ReplayReport report = lendsim::replay_check(scenario);
  if (report.deterministic) {
    std::cout << "deterministic: two runs of " << scenario.name
              << " are byte-identical\n";
    return kExitOk;
  }
  std::cerr << "NON-DETERMINISTIC: first divergence at tick "
            << report.first_divergent_tick << "\n  " << report.detail << "\n";
  return kExitNondeterministic;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic lending-market simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string outdir;
  std::vector<std::string> overrides;
  std::string sweep_path_arg;
  std::string sweep_values;
  bool parallel = false;
  std::string snapshot_path;
  std::string available_threshold = "0.15";
  std::string deposit_threshold = "0.30";

  auto add_scenario_options = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    cmd->add_option("--override", overrides,
                    "document override, path=value (repeatable)");
  };

  CLI::App* validate = app.add_subcommand("validate", "parse and build a scenario");
  add_scenario_options(validate);

  CLI::App* run = app.add_subcommand("run", "run a scenario, write metrics + summary");
  add_scenario_options(run);
  run->add_option("-o,--out", outdir, "output directory (default $LENDSIM_OUT or ./out)");

  CLI::App* sweep = app.add_subcommand("sweep", "re-run a scenario over a value list");
  add_scenario_options(sweep);
  sweep->add_option("--path", sweep_path_arg, "document path to override")->required();
  sweep->add_option("--values", sweep_values, "JSON array or comma list")->required();
  sweep->add_flag("--parallel", parallel, "run sweep entries on worker threads");
  sweep->add_option("-o,--out", outdir, "output directory (default $LENDSIM_OUT or ./out)");

  CLI::App* analyze = app.add_subcommand("analyze", "rank a market snapshot CSV");
  analyze->add_option("snapshot", snapshot_path, "snapshot CSV file")->required();
  analyze->add_option("--available-threshold", available_threshold,
                      "available/market-cap ratio that flags a squeeze target");
  analyze->add_option("--deposit-threshold", deposit_threshold,
                      "deposited/market-cap ratio that flags depth risk");

  CLI::App* replay = app.add_subcommand("replay-check", "run twice and compare");
  add_scenario_options(replay);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return validate_command(scenario_path, overrides);
    if (run->parsed()) return run_command(scenario_path, overrides, outdir);
    if (sweep->parsed()) {
      return sweep_command(scenario_path, overrides, sweep_path_arg, sweep_values,
                           parallel, outdir);
    }
    if (analyze->parsed()) {
      return analyze_command(snapshot_path, available_threshold, deposit_threshold);
    }
    if (replay->parsed()) return replay_command(scenario_path, overrides);
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    // bad input (malformed document or unreadable file) is exit 1,
    // failures inside a well-formed simulation are exit 2
    const bool input_error =
        e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::NotFound;
    return input_error ? kExitConfig : kExitRuntime;
  } catch (const json::exception& e) {
    std::cerr << "error: invalid JSON: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
