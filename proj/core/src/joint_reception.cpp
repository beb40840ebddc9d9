#include "coexist/joint_reception.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coexist/analytic.hpp"
#include "coexist/errors.hpp"

namespace coexist {

namespace {

constexpr double kAutoTailTarget = 1e-6;
constexpr double kMaxTruncatedMass = 1e-4;
// Only [0, threshold] needs resolving; everything above lands in the
// overflow bucket. Long SINR tails would otherwise leave the threshold
// inside the first few cells.
constexpr double kMinNodesBelowThreshold = 2048.0;

struct ApLaw {
  double distance;
  double availability;
};

// CCDF of availability * SINR at one AP.
double scaled_ccdf(const SuccessExponents& e, const ApLaw& ap, double x) {
  if (x <= 0.0) return 1.0;
  if (ap.availability <= 0.0) return 0.0;
  return e.probability(ap.distance, x / ap.availability);
}

}  // namespace

std::vector<Violation> validate_joint_reception(const JointReceptionConfig& cfg) {
  std::vector<Violation> out;
  if (cfg.ap_distances.empty()) out.push_back({"ap_distances", "at least one AP is required"});
  if (cfg.ap_distances.size() != cfg.availabilities.size()) {
    out.push_back({"availabilities", "one availability per AP distance is required"});
  }
  for (std::size_t m = 0; m < cfg.ap_distances.size(); ++m) {
    if (!(cfg.ap_distances[m] >= 0.0) || !std::isfinite(cfg.ap_distances[m])) {
      out.push_back({"ap_distances[" + std::to_string(m) + "]", "distance must be finite and non-negative"});
    }
  }
  for (std::size_t m = 0; m < cfg.availabilities.size(); ++m) {
    if (!(cfg.availabilities[m] >= 0.0 && cfg.availabilities[m] <= 1.0)) {
      out.push_back({"availabilities[" + std::to_string(m) + "]", "availability must lie in [0, 1]"});
    }
  }
  if (cfg.grid_points < (std::size_t{1} << 10)) out.push_back({"grid_points", "grid_points must be at least 1024"});
  if (cfg.grid_max < 0.0) out.push_back({"grid_max", "grid_max must be non-negative (0 = automatic)"});
  return out;
}

double per_ap_sinr_ccdf(std::size_t j, double d_m, double p_av, double x, double f_j, const Scenario& s) {
  if (x < 0.0) throw InputError("per_ap_sinr_ccdf: x must be non-negative");
  if (p_av < 0.0 || p_av > 1.0) throw InputError("per_ap_sinr_ccdf: availability outside [0, 1]");
  const auto e = success_exponents(j, f_j, s, default_formula(s));
  return scaled_ccdf(e, {d_m, p_av}, x);
}

MrcEvaluation mrc_success_at_carrier(const JointReceptionConfig& cfg, std::size_t j, double threshold, double f_j,
                                     const Scenario& s) {
  if (auto v = validate_joint_reception(cfg); !v.empty()) {
    throw InputError("invalid joint reception config: " + v.front().path + ": " + v.front().message);
  }
  if (!(threshold > 0.0)) throw InputError("mrc: threshold must be positive");

  const auto e = success_exponents(j, f_j, s, default_formula(s));
  std::vector<ApLaw> aps;
  for (std::size_t m = 0; m < cfg.ap_distances.size(); ++m) {
    // Unavailable APs are a point mass at zero and drop out of the sum.
    if (cfg.availabilities[m] > 0.0) aps.push_back({cfg.ap_distances[m], cfg.availabilities[m]});
  }
  MrcEvaluation out;
  if (aps.empty()) return out;

  double grid_max = cfg.grid_max;
  auto worst_tail = [&](double x) {
    double t = 0.0;
    for (const auto& ap : aps) t = std::max(t, scaled_ccdf(e, ap, x));
    return t;
  };
  if (grid_max == 0.0) {
    grid_max = 2.0 * threshold;
    for (int guard = 0; worst_tail(grid_max) >= kAutoTailTarget; ++guard) {
      if (guard > 200) throw NumericalError("mrc: automatic grid_max search did not terminate");
      grid_max *= 2.0;
    }
  } else {
    if (!(grid_max > threshold)) {
      throw NumericalError("mrc: grid_max must exceed the SINR threshold; use a larger grid");
    }
    if (worst_tail(grid_max) > kMaxTruncatedMass) {
      std::ostringstream msg;
      msg << "mrc: grid_max " << grid_max << " truncates " << worst_tail(grid_max)
          << " of a per-AP SINR law (limit 1e-4); use a larger grid";
      throw NumericalError(msg.str());
    }
  }

  const std::size_t n = cfg.grid_points;
  const double h = std::min(grid_max / static_cast<double>(n - 1), threshold / kMinNodesBelowThreshold);
  out.grid_max = grid_max;
  out.grid_step = h;
  out.max_truncated_mass = worst_tail(grid_max);

  // Node k carries P(X in [x_k - h/2, x_k + h/2)); the last node also
  // carries everything beyond the grid. Nodes above `last` are certain
  // successes because every further summand is non-negative.
  const std::size_t last = static_cast<std::size_t>(std::ceil(threshold / h)) + 1;

  // tail[t] = P(X >= x_t - h/2), so node masses are differences of tails.
  auto tails = [&](const ApLaw& ap) {
    std::vector<double> t(last + 2);
    for (std::size_t k = 0; k < t.size(); ++k) {
      t[k] = k == 0 ? 1.0 : scaled_ccdf(e, ap, (static_cast<double>(k) - 0.5) * h);
    }
    return t;
  };

  auto first = tails(aps.front());
  std::vector<double> acc(last + 1);
  for (std::size_t k = 0; k <= last; ++k) acc[k] = first[k] - first[k + 1];
  double overflow = first[last + 1];

  std::vector<double> next(last + 1);
  for (std::size_t m = 1; m < aps.size(); ++m) {
    const auto t = tails(aps[m]);
    std::vector<double> mass(last + 1);
    for (std::size_t k = 0; k <= last; ++k) mass[k] = t[k] - t[k + 1];
    std::fill(next.begin(), next.end(), 0.0);
    double spill = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
      const double a = acc[i];
      if (a == 0.0) continue;
      for (std::size_t l = 0; i + l <= last; ++l) next[i + l] += a * mass[l];
      spill += a * t[last - i + 1];
    }
    overflow += spill;
    acc.swap(next);
  }

  // Spread each node's mass uniformly over its cell when comparing with the
  // threshold.
  double success = overflow;
  for (std::size_t k = 0; k <= last; ++k) {
    const double x = static_cast<double>(k) * h;
    const double w = std::clamp((x + 0.5 * h - threshold) / h, 0.0, 1.0);
    success += acc[k] * w;
  }
  out.success_probability = std::clamp(success, 0.0, 1.0);
  return out;
}

double mrc_success_probability(const JointReceptionConfig& cfg, std::size_t j, double threshold,
                               const Scenario& s) {
  if (j >= s.classes.size()) throw InputError("class index out of range");
  const auto& law = s.classes[j].carrier;
  const auto breaks = carrier_breakpoints(j, s);
  auto at = [&](double f) { return mrc_success_at_carrier(cfg, j, threshold, f, s).success_probability; };
  return std::clamp(average_over_carrier(law, at, breaks, 1e-6), 0.0, 1.0);
}

}  // namespace coexist
