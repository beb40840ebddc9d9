#include "coexist/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "coexist/analytic.hpp"
#include "coexist/errors.hpp"
#include "coexist/parallel.hpp"
#include "coexist/profiles.hpp"
#include "coexist/units.hpp"

#ifndef COEXIST_VERSION
#define COEXIST_VERSION "0.0.0"
#endif
#ifndef COEXIST_GIT_DESCRIBE
#define COEXIST_GIT_DESCRIBE "unknown"
#endif

namespace coexist {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_number(std::string_view s, const std::string& what) {
  s = trim(s);
  if (s == "nan") return kNaN;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw InputError(what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Rows {
  std::vector<std::vector<double>> rows;
  void merge(Rows& o) {
    for (auto& r : o.rows) rows.push_back(std::move(r));
  }
};

}  // namespace

const char* library_version() { return COEXIST_VERSION; }
const char* library_git_describe() { return COEXIST_GIT_DESCRIBE; }

std::vector<double> SweepSpec::values() const {
  if (!(min < max)) throw InputError("sweep: min must be below max");
  if (steps < 2) throw InputError("sweep: at least 2 steps are required");
  if (scale == SweepScale::log && !(min > 0.0)) throw InputError("sweep: log scale needs a positive min");
  std::vector<double> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
    out[k] = scale == SweepScale::linear ? min + t * (max - min) : min * std::pow(max / min, t);
  }
  out.back() = max;
  if (variable == SweepVariable::ap_count) {
    for (auto& v : out) v = std::round(v);
  }
  return out;
}

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::distance: return "distance";
    case SweepVariable::device_density: return "device_density";
    case SweepVariable::sinr_threshold: return "sinr_threshold";
    case SweepVariable::ap_count: return "ap_count";
  }
  return "?";
}

const char* sweep_column(SweepVariable v) {
  switch (v) {
    case SweepVariable::distance: return "distance_m";
    case SweepVariable::device_density: return "device_density_per_m2";
    case SweepVariable::sinr_threshold: return "sinr_threshold_db";
    case SweepVariable::ap_count: return "ap_count";
  }
  return "?";
}

SweepSpec parse_sweep(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4 && parts.size() != 5) {
    throw InputError("--sweep: expected VAR:MIN:MAX:STEPS[:log], got '" + std::string(text) + "'");
  }
  SweepSpec s;
  const auto var = trim(parts[0]);
  if (var == "distance") {
    s.variable = SweepVariable::distance;
  } else if (var == "device_density") {
    s.variable = SweepVariable::device_density;
  } else if (var == "sinr_threshold") {
    s.variable = SweepVariable::sinr_threshold;
  } else if (var == "ap_count") {
    s.variable = SweepVariable::ap_count;
  } else {
    throw InputError("--sweep: unknown variable '" + std::string(var) +
                     "' (distance, device_density, sinr_threshold, ap_count)");
  }
  s.min = to_number(parts[1], "--sweep min");
  s.max = to_number(parts[2], "--sweep max");
  const double steps = to_number(parts[3], "--sweep steps");
  if (!(steps >= 2.0) || steps != std::floor(steps)) throw InputError("--sweep: STEPS must be an integer >= 2");
  s.steps = static_cast<std::size_t>(steps);
  if (parts.size() == 5) {
    const auto sc = trim(parts[4]);
    if (sc == "log") {
      s.scale = SweepScale::log;
    } else if (sc == "linear") {
      s.scale = SweepScale::linear;
    } else {
      throw InputError("--sweep: unknown scale '" + std::string(sc) + "' (linear, log)");
    }
  }
  if (!(s.min < s.max)) throw InputError("--sweep: MIN must be below MAX");
  if (s.variable == SweepVariable::distance && s.min < 0.0) throw InputError("--sweep: distances must be >= 0");
  if (s.variable == SweepVariable::device_density && s.min < 0.0) throw InputError("--sweep: densities must be >= 0");
  if (s.variable == SweepVariable::ap_count && s.min < 1.0) throw InputError("--sweep: ap_count must be >= 1");
  if (s.scale == SweepScale::log && !(s.min > 0.0)) throw InputError("--sweep: log scale needs MIN > 0");
  return s;
}

JointReceptionConfig parse_mrc(std::string_view text) {
  const auto halves = split(text, ';');
  if (halves.size() > 2) throw InputError("--mrc: expected \"d1,d2,...;p1,p2,...\"");
  JointReceptionConfig jr;
  for (auto d : split(halves[0], ',')) jr.ap_distances.push_back(to_number(d, "--mrc distance"));
  if (halves.size() == 2) {
    for (auto p : split(halves[1], ',')) jr.availabilities.push_back(to_number(p, "--mrc availability"));
  } else {
    jr.availabilities.assign(jr.ap_distances.size(), 1.0);
  }
  if (auto v = validate_joint_reception(jr); !v.empty()) {
    throw InputError("--mrc: " + v.front().path + ": " + v.front().message);
  }
  return jr;
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::analytic: return "analytic";
    case RunMode::mc: return "mc";
    case RunMode::both: return "both";
  }
  return "?";
}

RunMode parse_mode(std::string_view text) {
  if (text == "analytic") return RunMode::analytic;
  if (text == "mc") return RunMode::mc;
  if (text == "both") return RunMode::both;
  throw InputError("--mode: unknown mode '" + std::string(text) + "' (analytic, mc, both)");
}

bool Table::has_column(std::string_view name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InputError("table has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

void write_csv(const Table& t, std::ostream& out) {
  for (const auto& [k, v] : t.metadata) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_json(const Table& t, std::ostream& out) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.metadata) meta[k] = v;
  doc["metadata"] = meta;
  doc["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      r[t.columns[c]] = std::isnan(row[c]) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(row[c]);
    }
    rows.push_back(r);
  }
  doc["rows"] = rows;
  out << doc.dump(2) << '\n';
}

Table read_csv(std::istream& in, const std::string& label) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = trim(std::string_view(line).substr(1));
      const auto colon = body.find(':');
      if (colon != std::string_view::npos) {
        t.metadata.emplace_back(std::string(trim(body.substr(0, colon))), std::string(trim(body.substr(colon + 1))));
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (t.columns.empty()) {
      for (auto c : cells) t.columns.emplace_back(trim(c));
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw InputError(label + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                       " cells");
    }
    std::vector<double> row;
    for (auto c : cells) row.push_back(to_number(c, label + ":" + std::to_string(line_no)));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw InputError(label + ": no header row");
  return t;
}

RunResult run_sweep(const Scenario& s, const SweepSpec& sweep, const RunOptions& options) {
  require_valid(s);
  const auto values = sweep.values();
  const std::size_t j = s.reference_class;
  const bool analytic = options.mode != RunMode::mc;
  const bool mc = options.mode != RunMode::analytic;
  const bool with_mrc = options.mrc.has_value() || sweep.variable == SweepVariable::ap_count;
  if (options.mrc) {
    if (auto v = validate_joint_reception(*options.mrc); !v.empty()) {
      throw InputError("--mrc: " + v.front().path + ": " + v.front().message);
    }
    if (sweep.variable == SweepVariable::distance && !(options.mrc->ap_distances.front() > 0.0)) {
      throw InputError("--mrc: the first AP distance must be positive in a distance sweep");
    }
  }
  if (sweep.variable == SweepVariable::ap_count && options.mrc && sweep.max > options.mrc->ap_distances.size()) {
    throw InputError("--sweep: ap_count exceeds the number of --mrc APs");
  }

  RunResult result;
  if (!mc && options.trials_given) result.warnings.push_back("trials ignored in analytic mode");

  auto& t = result.table;
  t.metadata = {{"tool", "coexist"},
                {"version", library_version()},
                {"git_describe", library_git_describe()},
                {"scenario", options.scenario_label.empty() ? "-" : options.scenario_label},
                {"mode", to_string(options.mode)},
                {"sweep", std::string(to_string(sweep.variable)) + ":" + format_number(sweep.min) + ":" +
                              format_number(sweep.max) + ":" + std::to_string(sweep.steps) +
                              (sweep.scale == SweepScale::log ? ":log" : "")},
                {"seed", mc ? std::to_string(options.sim.seed) : "-"},
                {"trials", mc ? std::to_string(options.sim.trials) : "-"},
                {"truncation_mode", to_string(s.retransmission.truncation_mode)}};
  if (sweep.variable != SweepVariable::distance) t.metadata.emplace_back("distance_m", format_number(options.distance));
  t.columns = {sweep_column(sweep.variable), "p_sc_analytic", "p_sc_mc", "mc_ci", "n_tx_mean", "delay_s",
               "energy_J", "lifetime_s"};
  if (with_mrc) t.columns.push_back("p_sc_mrc");
  if (with_mrc && options.mode == RunMode::both) t.columns.push_back("p_sc_mrc_mc");

  auto point = [&](double x) {
    Scenario sc = s;
    double d = options.distance;
    std::optional<JointReceptionConfig> jr = options.mrc;
    switch (sweep.variable) {
      case SweepVariable::distance:
        d = x;
        if (jr) {
          const double scale = x / jr->ap_distances.front();
          for (auto& dm : jr->ap_distances) dm *= scale;
        }
        break;
      case SweepVariable::device_density:
        if (sc.classes.size() == 1) {
          sc.classes[0].device_density = x;
        } else {
          for (std::size_t i = 0; i < sc.classes.size(); ++i) {
            if (i != j) sc.classes[i].device_density = x;
          }
        }
        break;
      case SweepVariable::sinr_threshold:
        sc.sinr_threshold = db_to_linear(x);
        break;
      case SweepVariable::ap_count: {
        const auto count = static_cast<std::size_t>(x);
        if (jr) {
          jr->ap_distances.resize(count);
          jr->availabilities.resize(count);
        } else {
          jr = JointReceptionConfig{};
          jr->ap_distances = nearest_ap_distances(d, count);
          jr->availabilities.assign(count, 1.0);
        }
        break;
      }
    }

    std::vector<double> row(t.columns.size(), kNaN);
    row[0] = x;
    const double gamma = sc.sinr_threshold;
    if (analytic) {
      const auto k = analytic_kpis(j, d, sc);
      row[1] = k.success_probability;
      row[4] = k.mean_transmissions;
      row[5] = k.expected_delay;
      row[6] = k.energy_per_report;
      row[7] = k.battery_lifetime;
      if (jr) row[8] = mrc_success_probability(*jr, j, gamma, sc);
    }
    if (mc) {
      const auto e = snapshot_success(j, d, gamma, sc, options.sim);
      row[2] = e.mean;
      row[3] = 1.96 * e.std_error;
      if (!analytic) {
        const auto sess = simulate_session(j, d, sc, options.sim);
        row[4] = sess.transmissions_all.mean;
        row[5] = sess.delay_success.trials_used ? sess.delay_success.mean : kNaN;
        row[6] = sess.energy_per_report.mean;
        row[7] = sess.battery_lifetime.mean;
      }
      if (jr) {
        const double m = snapshot_mrc_success(*jr, j, gamma, sc, options.sim).mean;
        row[analytic ? 9 : 8] = m;
      }
    }
    return row;
  };

  // Analytic points are cheap and run in parallel; Monte Carlo points run
  // one after another with the trials spread over the workers.
  const unsigned outer = mc ? 1u : options.sim.threads;
  auto rows = deterministic_reduce<Rows>(values.size(), 1, outer, [&](std::uint64_t b, std::uint64_t e) {
    Rows r;
    for (auto k = b; k < e; ++k) r.rows.push_back(point(values[k]));
    return r;
  });
  t.rows = std::move(rows.rows);
  return result;
}

Table degradation_report(const Table& single, const Table& multi) {
  if (single.columns.empty() || multi.columns.empty() || single.columns[0] != multi.columns[0]) {
    throw InputError("degradation: tables sweep different variables");
  }
  if (single.rows.size() != multi.rows.size()) throw InputError("degradation: tables have different sweep grids");
  auto success_column = [](const Table& t) {
    const std::size_t a = t.column("p_sc_analytic");
    for (const auto& r : t.rows) {
      if (!std::isnan(r[a])) return a;
    }
    return t.column("p_sc_mc");
  };
  const std::size_t ps = success_column(single);
  const std::size_t pm = success_column(multi);
  const std::size_t ls = single.column("lifetime_s");
  const std::size_t lm = multi.column("lifetime_s");

  Table out;
  out.metadata = {{"tool", "coexist"}, {"version", library_version()}, {"git_describe", library_git_describe()},
                  {"report", "degradation = 100 * (1 - multi / single)"}};
  out.columns = {single.columns[0],    "p_sc_single", "p_sc_multi", "p_sc_degradation_pct",
                 "lifetime_single_s", "lifetime_multi_s", "lifetime_degradation_pct"};
  auto pct = [](double a, double b) { return a > 0.0 ? 100.0 * (1.0 - b / a) : kNaN; };
  std::size_t best_p = 0, best_l = 0;
  double peak_p = -std::numeric_limits<double>::infinity(), peak_l = peak_p;
  for (std::size_t k = 0; k < single.rows.size(); ++k) {
    const auto& a = single.rows[k];
    const auto& b = multi.rows[k];
    const double x = a[0];
    if (std::abs(x - b[0]) > 1e-9 * std::max(1.0, std::abs(x))) {
      throw InputError("degradation: sweep grids differ at row " + std::to_string(k + 1));
    }
    const double dp = pct(a[ps], b[pm]);
    const double dl = pct(a[ls], b[lm]);
    out.rows.push_back({x, a[ps], b[pm], dp, a[ls], b[lm], dl});
    if (!std::isnan(dp) && dp > peak_p) peak_p = dp, best_p = k;
    if (!std::isnan(dl) && dl > peak_l) peak_l = dl, best_l = k;
  }
  if (!out.rows.empty()) {
    out.metadata.emplace_back("peak_p_sc_degradation",
                              format_number(out.rows[best_p][3]) + "% at " + out.columns[0] + "=" +
                                  format_number(out.rows[best_p][0]));
    out.metadata.emplace_back("peak_lifetime_degradation",
                              format_number(out.rows[best_l][6]) + "% at " + out.columns[0] + "=" +
                                  format_number(out.rows[best_l][0]));
  }
  return out;
}

}  // namespace coexist
