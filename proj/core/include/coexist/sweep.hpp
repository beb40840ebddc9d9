#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coexist/joint_reception.hpp"
#include "coexist/model.hpp"
#include "coexist/monte_carlo.hpp"

namespace coexist {

const char* library_version();
const char* library_git_describe();

enum class SweepVariable { distance, device_density, sinr_threshold, ap_count };
enum class SweepScale { linear, log };

/// One x-axis. sinr_threshold values are in dB; ap_count values are rounded
/// to integers.
struct SweepSpec {
  SweepVariable variable = SweepVariable::distance;
  double min = 10.0;
  double max = 500.0;
  std::size_t steps = 50;
  SweepScale scale = SweepScale::linear;

  std::vector<double> values() const;
};

const char* to_string(SweepVariable v);
/// Column header of the sweep value, with its unit.
const char* sweep_column(SweepVariable v);

/// "VAR:MIN:MAX:STEPS[:log]", e.g. "distance:10:500:50".
SweepSpec parse_sweep(std::string_view text);

/// "d1,d2,d3;p1,p2,p3" (distances in m, availabilities); availabilities
/// may be omitted and default to 1.
JointReceptionConfig parse_mrc(std::string_view text);

enum class RunMode { analytic, mc, both };
const char* to_string(RunMode m);
RunMode parse_mode(std::string_view text);

struct RunOptions {
  RunMode mode = RunMode::analytic;
  SimConfig sim;
  /// Joint reception APs. In a distance sweep the list is rescaled so the
  /// first AP sits at the swept distance.
  std::optional<JointReceptionConfig> mrc;
  /// Serving-AP distance (m) when the sweep variable is not distance.
  double distance = 50.0;
  /// Shown in the metadata header.
  std::string scenario_label;
  /// The caller set a trial count explicitly (warned about in analytic mode).
  bool trials_given = false;
};

/// Numeric table with a '#'-prefixed key/value metadata block.
struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  ///< throws InputError if absent
  bool has_column(std::string_view name) const;
};

void write_csv(const Table& t, std::ostream& out);
void write_json(const Table& t, std::ostream& out);
Table read_csv(std::istream& in, const std::string& label);

struct RunResult {
  Table table;
  std::vector<std::string> warnings;
};

/**
 * Evaluates the KPIs at every sweep point. Columns: sweep value,
 * p_sc_analytic, p_sc_mc, mc_ci (95% half-width), n_tx_mean, delay_s,
 * energy_J, lifetime_s and, with joint reception, p_sc_mrc (plus
 * p_sc_mrc_mc in both mode). Quantities a mode does not compute are nan.
 * In mc mode the KPI columns come from session simulation: n_tx_mean over
 * all sessions, delay_s over successful sessions.
 */
RunResult run_sweep(const Scenario& s, const SweepSpec& sweep, const RunOptions& options);

/// Per-point 100 * (1 - multi / single) for success probability and
/// lifetime; the argmax rows go to the metadata block.
Table degradation_report(const Table& single, const Table& multi);

}  // namespace coexist
