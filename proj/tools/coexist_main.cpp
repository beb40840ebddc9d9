#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coexist/errors.hpp"
#include "coexist/profiles.hpp"
#include "coexist/scenario_io.hpp"
#include "coexist/sweep.hpp"

namespace {

enum Exit { ok = 0, input_error = 1, numerical_error = 2 };

void emit_table(const coexist::Table& t, const std::string& out_path, bool json) {
  std::ostringstream buf;
  if (json) {
    coexist::write_json(t, buf);
  } else {
    coexist::write_csv(t, buf);
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << buf.str();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw coexist::InputError(out_path + ": cannot open for writing");
  out << buf.str();
  if (!out) throw coexist::InputError(out_path + ": write failed");
}

coexist::Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw coexist::InputError(path + ": cannot open table");
  return coexist::read_csv(in, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coexistence KPIs of grant-free IoT technologies sharing a band"};
  app.set_version_flag("--version", std::string(coexist::library_version()) + " (" +
                                        coexist::library_git_describe() + ")");
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Evaluate KPIs over a sweep");
  std::string scenario_path;
  std::string sweep_text = "distance:10:500:50";
  std::string mode_text = "analytic";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 42;
  std::string mrc_text;
  std::string out_path;
  bool json = false;
  double distance = 50.0;
  unsigned threads = 0;
  bool antithetic = false;
  bool frozen = false;
  std::string overlap_text = "actual";
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--sweep", sweep_text, "VAR:MIN:MAX:STEPS[:log]; VAR is distance, device_density, "
                                         "sinr_threshold (dB) or ap_count")
      ->capture_default_str();
  run->add_option("--mode", mode_text, "analytic, mc or both")->capture_default_str();
  auto* trials_opt = run->add_option("--trials", trials, "Monte Carlo trials per point")->capture_default_str();
  run->add_option("--seed", seed, "Master seed")->capture_default_str();
  run->add_option("--mrc", mrc_text, "Joint reception APs \"d1,d2,d3;p1,p2,p3\" (m; availabilities)");
  run->add_option("--out", out_path, "Output file (default stdout)");
  run->add_flag("--json", json, "Write JSON instead of CSV");
  run->add_option("--distance", distance, "Serving-AP distance (m) for non-distance sweeps")->capture_default_str();
  run->add_option("--threads", threads, "Worker threads, 0 = all cores; results do not depend on it")
      ->capture_default_str();
  run->add_flag("--antithetic", antithetic, "Antithetic trial pairs");
  run->add_flag("--frozen-topology", frozen, "Keep one interferer layout per retransmission session");
  run->add_option("--overlap", overlap_text, "Interferer overlap in simulation: actual or expected")
      ->capture_default_str();

  // degrade
  auto* degrade = app.add_subcommand("degrade", "Percent degradation between a single- and a multi-technology run");
  std::string single_path;
  std::string compare_path;
  degrade->add_option("--single", single_path, "Table of the single-technology run")->required();
  degrade->add_option("--compare", compare_path, "Table of the multi-technology run")->required();
  degrade->add_option("--out", out_path, "Output file (default stdout)");
  degrade->add_flag("--json", json, "Write JSON instead of CSV");

  // reference
  auto* reference = app.add_subcommand("reference", "Write the built-in reference scenario");
  bool single_tech = false;
  reference->add_flag("--single", single_tech, "Drop the interfering technology");
  reference->add_option("--out", out_path, "Output file (default stdout)");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }

  try {
    if (*run) {
      const auto scenario = coexist::load_scenario(scenario_path);
      coexist::RunOptions options;
      options.mode = coexist::parse_mode(mode_text);
      options.sim.trials = trials;
      options.sim.seed = seed;
      options.sim.threads = threads;
      options.sim.antithetic = antithetic;
      options.sim.frozen_topology = frozen;
      if (overlap_text == "actual") {
        options.sim.overlap = coexist::OverlapSampling::actual;
      } else if (overlap_text == "expected") {
        options.sim.overlap = coexist::OverlapSampling::expected;
      } else {
        throw coexist::InputError("--overlap: expected actual or expected");
      }
      if (!mrc_text.empty()) options.mrc = coexist::parse_mrc(mrc_text);
      options.distance = distance;
      options.scenario_label = scenario_path;
      options.trials_given = trials_opt->count() > 0;
      if (trials == 0) throw coexist::InputError("--trials: must be at least 1");
      const auto sweep = coexist::parse_sweep(sweep_text);
      const auto result = coexist::run_sweep(scenario, sweep, options);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      emit_table(result.table, out_path, json);
    } else if (*degrade) {
      const auto report = coexist::degradation_report(load_table(single_path), load_table(compare_path));
      emit_table(report, out_path, json);
    } else if (*reference) {
      const auto s = single_tech ? coexist::single_technology_scenario() : coexist::reference_scenario();
      const auto notes = coexist::reference_scenario_notes();
      if (out_path.empty() || out_path == "-") {
        std::cout << coexist::emit_scenario(s, notes);
      } else {
        coexist::save_scenario(s, out_path, notes);
      }
    } else if (*validate) {
      coexist::load_scenario(scenario_path);
      std::cout << scenario_path << ": ok\n";
    }
  } catch (const coexist::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const coexist::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return numerical_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  }
  return ok;
}
