#include "coexist/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coexist/errors.hpp"
#include "coexist/units.hpp"

namespace coexist {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw InputError(path + ": " + message);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// A JSON object together with its key path. Tracks which keys were read so
// that unknown keys can be rejected.
class Node {
 public:
  Node(const json& v, std::string path) : v_(v), path_(std::move(path)) {
    if (!v_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return v_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!v_.contains(key)) fail(join(path_, key), "missing required key");
    return v_.at(key);
  }

  double number(const std::string& key) {
    const auto& x = raw(key);
    if (!x.is_number()) fail(join(path_, key), "expected a number");
    return x.get<double>();
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const auto& x = raw(key);
    if (!x.is_number_integer()) fail(join(path_, key), "expected an integer");
    return x.get<long long>();
  }

  std::string string(const std::string& key) {
    const auto& x = raw(key);
    if (!x.is_string()) fail(join(path_, key), "expected a string");
    return x.get<std::string>();
  }

  Node object(const std::string& key) { return Node(raw(key), join(path_, key)); }

  // Reads a quantity given under one of several unit-suffixed keys and
  // converts it to SI.
  double quantity(const std::string& stem,
                  std::initializer_list<std::pair<const char*, double (*)(double)>> variants) {
    const std::pair<const char*, double (*)(double)>* found = nullptr;
    std::string found_key;
    for (const auto& v : variants) {
      const std::string key = stem + v.first;
      if (has(key)) {
        if (found) fail(join(path_, key), "conflicts with " + join(path_, found_key));
        found = &v;
        found_key = key;
      }
    }
    if (!found) {
      std::string names;
      for (const auto& v : variants) names += (names.empty() ? "" : " or ") + stem + v.first;
      fail(join(path_, names), "missing required key");
    }
    return found->second(number(found_key));
  }

  void reject_unknown(std::initializer_list<const char*> also_allowed = {}) const {
    std::set<std::string> ok(used_.begin(), used_.end());
    for (const char* k : also_allowed) ok.insert(k);
    for (auto it = v_.begin(); it != v_.end(); ++it) {
      if (!ok.count(it.key())) fail(join(path_, it.key()), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& v_;
  std::string path_;
  std::set<std::string> used_;
};

double identity(double x) { return x; }
double from_mhz(double x) { return mhz_to_hz(x); }
double from_khz(double x) { return x * 1e3; }

double power(Node& n, const std::string& stem) { return n.quantity(stem, {{"_dbm", &dbm_to_watts}, {"_w", &identity}}); }
double frequency(Node& n, const std::string& stem) {
  return n.quantity(stem, {{"_hz", &identity}, {"_khz", &from_khz}, {"_mhz", &from_mhz}});
}
double seconds(Node& n, const std::string& stem) { return n.quantity(stem, {{"_s", &identity}}); }
double density(Node& n, const std::string& stem) { return n.quantity(stem, {{"_per_m2", &identity}}); }

CarrierDistribution parse_carrier(Node n) {
  const std::string kind = n.string("kind");
  CarrierDistribution c;
  if (kind == "point-mass") {
    c = CarrierDistribution::point_mass(frequency(n, "frequency"));
  } else if (kind == "uniform") {
    c = CarrierDistribution::uniform(frequency(n, "f_min"), frequency(n, "f_max"));
  } else if (kind == "tabulated-cdf") {
    const std::string key = n.has("table_mhz") ? "table_mhz" : "table_hz";
    const double scale = key == "table_mhz" ? 1e6 : 1.0;
    const auto& t = n.raw(key);
    const std::string path = join(n.path(), key);
    if (!t.is_array()) fail(path, "expected an array of [frequency, cdf] pairs");
    std::vector<CarrierDistribution::Node> table;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& row = t[k];
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
        fail(path + "[" + std::to_string(k) + "]", "expected [frequency, cdf]");
      }
      table.push_back({row[0].get<double>() * scale, row[1].get<double>()});
    }
    c.kind = CarrierDistribution::Kind::tabulated_cdf;
    c.table = std::move(table);
    if (!c.table.empty()) {
      c.f_min = c.table.front().frequency;
      c.f_max = c.table.back().frequency;
    }
  } else {
    fail(join(n.path(), "kind"), "unknown carrier kind '" + kind + "' (uniform, point-mass, tabulated-cdf)");
  }
  n.reject_unknown();
  return c;
}

TechnologyClass parse_class(Node n) {
  TechnologyClass c;
  c.name = n.string("name");
  c.technology_id = n.has("technology_id") ? n.string("technology_id") : c.name;
  c.tx_power = power(n, "tx_power");
  c.bandwidth = frequency(n, "bandwidth");
  c.carrier = parse_carrier(n.object("carrier"));
  c.packet_time = seconds(n, "packet_time");
  c.mean_inter_packet_time = seconds(n, "mean_inter_packet_time");
  c.device_density = density(n, "device_density");
  c.ap_density = density(n, "ap_density");
  c.orthogonal_channels = n.has("orthogonal_channels") ? static_cast<int>(n.integer("orthogonal_channels")) : 1;
  c.orthogonal_codes = n.has("orthogonal_codes") ? static_cast<int>(n.integer("orthogonal_codes")) : 1;
  n.reject_unknown();
  return c;
}

ChannelModel parse_channel(Node n) {
  ChannelModel ch;
  ch.pathloss_exponent = n.number("pathloss_exponent");
  Node f = n.object("fading");
  const std::string kind = f.string("kind");
  if (kind == "rayleigh-unit-mean") {
    ch.fading.kind = Fading::Kind::rayleigh_unit_mean;
  } else if (kind == "general") {
    ch.fading.kind = Fading::Kind::general;
    ch.fading.fractional_moment = f.number("fractional_moment");
  } else {
    fail(join(f.path(), "kind"), "unknown fading kind '" + kind + "' (rayleigh-unit-mean, general)");
  }
  f.reject_unknown();
  ch.noise_density = n.quantity("noise_density", {{"_dbm_per_hz", &dbm_to_watts}, {"_w_per_hz", &identity}});
  n.reject_unknown();
  return ch;
}

EnergyModel parse_energy(Node n) {
  EnergyModel e;
  e.circuit_power = power(n, "circuit_power");
  e.inv_pa_efficiency = n.number("inv_pa_efficiency");
  e.rx_power = power(n, "rx_power");
  e.active_time = seconds(n, "active_time");
  e.ack_time = seconds(n, "ack_time");
  e.wait_time = seconds(n, "wait_time");
  e.battery_capacity = n.quantity("battery_capacity", {{"_j", &identity}});
  n.reject_unknown();
  return e;
}

TruncationMode parse_truncation(const std::string& s, const std::string& path) {
  for (auto m : {TruncationMode::paper_literal, TruncationMode::normalized_conditional,
                 TruncationMode::with_failure_tail}) {
    if (s == to_string(m)) return m;
  }
  fail(path, "unknown truncation mode '" + s + "' (paper-literal, normalized-conditional, with-failure-tail)");
}

RetransmissionPolicy parse_retransmission(Node n) {
  RetransmissionPolicy r;
  r.max_transmissions = static_cast<int>(n.integer("max_transmissions"));
  r.retry_wait = seconds(n, "retry_wait");
  if (n.has("truncation_mode")) {
    r.truncation_mode = parse_truncation(n.string("truncation_mode"), join(n.path(), "truncation_mode"));
  }
  n.reject_unknown();
  return r;
}

AckModel parse_ack(Node n) {
  AckModel a;
  const std::string kind = n.string("kind");
  if (kind == "ideal") {
    a.kind = AckModel::Kind::ideal;
  } else if (kind == "fixed-probability") {
    a.kind = AckModel::Kind::fixed_probability;
    a.probability = n.number("probability");
    if (!(a.probability >= 0.0 && a.probability <= 1.0)) {
      fail(join(n.path(), "probability"), "must lie in [0, 1]");
    }
  } else if (kind == "computed-from-ap-density") {
    a.kind = AckModel::Kind::computed_from_ap_density;
    a.ap_tx_power = power(n, "ap_tx_power");
    a.ap_activity = n.number("ap_activity");
  } else {
    fail(join(n.path(), "kind"),
         "unknown ack model '" + kind + "' (ideal, fixed-probability, computed-from-ap-density)");
  }
  n.reject_unknown();
  return a;
}

json emit_carrier(const CarrierDistribution& c) {
  json j;
  j["kind"] = to_string(c.kind);
  switch (c.kind) {
    case CarrierDistribution::Kind::point_mass:
      j["frequency_hz"] = c.f_min;
      break;
    case CarrierDistribution::Kind::uniform:
      j["f_min_hz"] = c.f_min;
      j["f_max_hz"] = c.f_max;
      break;
    case CarrierDistribution::Kind::tabulated_cdf: {
      json t = json::array();
      for (const auto& n : c.table) t.push_back({n.frequency, n.cdf});
      j["table_hz"] = t;
      break;
    }
  }
  return j;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("<document>: malformed JSON: ") + e.what());
  }
  Node root(doc, "");
  Scenario s;
  const auto& classes = root.raw("classes");
  if (!classes.is_array()) fail("classes", "expected an array");
  for (std::size_t k = 0; k < classes.size(); ++k) {
    s.classes.push_back(parse_class(Node(classes[k], "classes[" + std::to_string(k) + "]")));
  }
  if (root.has("reference_class")) {
    const auto r = root.integer("reference_class");
    if (r < 0) fail("reference_class", "must be non-negative");
    s.reference_class = static_cast<std::size_t>(r);
  }
  s.channel = parse_channel(root.object("channel"));
  s.energy = parse_energy(root.object("energy"));
  s.retransmission = parse_retransmission(root.object("retransmission"));
  s.sinr_threshold = db_to_linear(root.number("sinr_threshold_db"));
  s.ack_model = root.has("ack_model") ? parse_ack(root.object("ack_model")) : AckModel{};
  root.reject_unknown({"notes"});

  if (auto v = validate_scenario(s); !v.empty()) {
    std::ostringstream msg;
    for (std::size_t k = 0; k < v.size(); ++k) msg << (k ? "; " : "") << v[k].path << ": " << v[k].message;
    throw InputError(msg.str());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& s, const std::vector<std::string>& notes) {
  json doc;
  if (!notes.empty()) doc["notes"] = notes;
  json classes = json::array();
  for (const auto& c : s.classes) {
    json j;
    j["name"] = c.name;
    j["technology_id"] = c.technology_id;
    j["tx_power_dbm"] = watts_to_dbm(c.tx_power);
    j["bandwidth_hz"] = c.bandwidth;
    j["carrier"] = emit_carrier(c.carrier);
    j["packet_time_s"] = c.packet_time;
    j["mean_inter_packet_time_s"] = c.mean_inter_packet_time;
    j["device_density_per_m2"] = c.device_density;
    j["ap_density_per_m2"] = c.ap_density;
    j["orthogonal_channels"] = c.orthogonal_channels;
    j["orthogonal_codes"] = c.orthogonal_codes;
    classes.push_back(j);
  }
  doc["classes"] = classes;
  doc["reference_class"] = s.reference_class;

  json fading;
  if (s.channel.fading.kind == Fading::Kind::rayleigh_unit_mean) {
    fading["kind"] = "rayleigh-unit-mean";
  } else {
    fading["kind"] = "general";
    fading["fractional_moment"] = s.channel.fading.fractional_moment;
  }
  doc["channel"] = {{"pathloss_exponent", s.channel.pathloss_exponent},
                    {"fading", fading},
                    {"noise_density_dbm_per_hz", watts_to_dbm(s.channel.noise_density)}};
  doc["energy"] = {{"circuit_power_w", s.energy.circuit_power},     {"inv_pa_efficiency", s.energy.inv_pa_efficiency},
                   {"rx_power_w", s.energy.rx_power},               {"active_time_s", s.energy.active_time},
                   {"ack_time_s", s.energy.ack_time},               {"wait_time_s", s.energy.wait_time},
                   {"battery_capacity_j", s.energy.battery_capacity}};
  doc["retransmission"] = {{"max_transmissions", s.retransmission.max_transmissions},
                           {"retry_wait_s", s.retransmission.retry_wait},
                           {"truncation_mode", to_string(s.retransmission.truncation_mode)}};
  doc["sinr_threshold_db"] = linear_to_db(s.sinr_threshold);

  json ack;
  ack["kind"] = to_string(s.ack_model.kind);
  if (s.ack_model.kind == AckModel::Kind::fixed_probability) ack["probability"] = s.ack_model.probability;
  if (s.ack_model.kind == AckModel::Kind::computed_from_ap_density) {
    ack["ap_tx_power_dbm"] = watts_to_dbm(s.ack_model.ap_tx_power);
    ack["ap_activity"] = s.ack_model.ap_activity;
  }
  doc["ack_model"] = ack;
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path, const std::vector<std::string>& notes) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot open for writing");
  out << emit_scenario(s, notes);
  if (!out) throw InputError(path + ": write failed");
}

}  // namespace coexist
