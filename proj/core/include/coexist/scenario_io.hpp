#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coexist/model.hpp"

namespace coexist {

/**
 * Scenario document (JSON). Quantities carry their unit in the key name:
 * _dbm / _w for powers, _hz / _mhz for frequencies, _s for times,
 * _per_m2 for densities, _db for the SINR threshold, _dbm_per_hz or
 * _w_per_hz for the noise density. Exactly one unit variant per field.
 *
 * Parse errors are InputError whose message starts with the key path,
 * e.g. "classes[1].tx_power_dbm: expected a number". The parsed scenario
 * is validated; violations are reported the same way.
 */
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);

/// Pretty-printed document; parse_scenario(emit_scenario(s)) reproduces s
/// to within 1e-12 relative per field. `notes` go to a free-text "notes"
/// array that the parser ignores.
std::string emit_scenario(const Scenario& s, const std::vector<std::string>& notes = {});
void save_scenario(const Scenario& s, const std::string& path, const std::vector<std::string>& notes = {});

}  // namespace coexist
