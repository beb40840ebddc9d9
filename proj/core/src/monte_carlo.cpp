#include "coexist/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "coexist/analytic.hpp"
#include "coexist/errors.hpp"
#include "coexist/overlap.hpp"
#include "coexist/parallel.hpp"

namespace coexist {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kChunk = 4096;
constexpr std::uint64_t kTopologyDomain = 0x70f0106fULL;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
  }
  Estimate estimate(std::uint64_t trials_used) const {
    Estimate e;
    e.trials_used = trials_used;
    if (n == 0) return e;
    e.mean = sum / static_cast<double>(n);
    if (n > 1) {
      const double var = std::max(0.0, (sum_sq - sum * e.mean) / static_cast<double>(n - 1));
      e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return e;
  }
};

struct InterfererClass {
  double intensity = 0.0;  // active devices per m^2
  double power = 0.0;
  double bandwidth = 0.0;
  const CarrierDistribution* law = nullptr;
};

class Context {
 public:
  Context(std::size_t j, const Scenario& s, OverlapSampling overlap)
      : s_(s), j_(j), overlap_(overlap) {
    require_valid(s);
    if (j >= s.classes.size()) throw InputError("class index out of range");
    if (s.channel.fading.kind != Fading::Kind::rayleigh_unit_mean) {
      throw InputError("Monte Carlo supports Rayleigh unit-mean fading only");
    }
    alpha_ = s.channel.pathloss_exponent;
    const auto& ref = s.classes[j];
    ref_power_ = ref.tx_power;
    ref_bandwidth_ = ref.bandwidth;
    noise_ = noise_power(j, s);
    for (std::size_t i = 0; i < s.classes.size(); ++i) {
      const auto& c = s.classes[i];
      classes_.push_back({time_activity_factor(i, j, s) * c.device_density, c.tx_power, c.bandwidth, &c.carrier});
    }
    if (ref.carrier.kind == CarrierDistribution::Kind::point_mass) fixed_ratios_ = expected_ratios(ref.carrier.f_min);
  }

  const std::vector<InterfererClass>& classes() const { return classes_; }
  double ref_power() const { return ref_power_; }
  double noise() const { return noise_; }

  double path_gain(double r2) const {
    if (alpha_ == 4.0) return 1.0 / (r2 * r2);
    return std::pow(r2, -0.5 * alpha_);
  }

  double draw_ref_carrier(RandomStream& rng) const {
    const auto& law = s_.classes[j_].carrier;
    if (law.kind == CarrierDistribution::Kind::point_mass) return law.f_min;
    return law.quantile(rng.uniform());
  }

  // Expected overlap ratios at this reference carrier, empty in actual mode.
  std::vector<double> ratios_for(double f_j) const {
    if (overlap_ == OverlapSampling::actual) return {};
    if (!fixed_ratios_.empty()) return fixed_ratios_;
    return expected_ratios(f_j);
  }

  // Received-power weight (overlap fraction times transmit power) of one
  // class-i interferer.
  double weight(std::size_t i, double f_j, const std::vector<double>& ratios, RandomStream& rng) const {
    const auto& c = classes_[i];
    if (!ratios.empty()) return ratios[i] * c.power;
    const double f_i = c.law->kind == CarrierDistribution::Kind::point_mass ? c.law->f_min
                                                                            : c.law->quantile(rng.uniform());
    return deterministic_overlap(f_j, ref_bandwidth_, f_i, c.bandwidth) / ref_bandwidth_ * c.power;
  }

 private:
  std::vector<double> expected_ratios(double f_j) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < s_.classes.size(); ++i) out.push_back(frequency_activity_factor(i, j_, f_j, s_));
    return out;
  }

  const Scenario& s_;
  std::size_t j_;
  OverlapSampling overlap_;
  double alpha_ = 4.0;
  double ref_power_ = 0.0;
  double ref_bandwidth_ = 0.0;
  double noise_ = 0.0;
  std::vector<InterfererClass> classes_;
  std::vector<double> fixed_ratios_;
};

struct Interferer {
  double r2;      // squared distance to the layer centre
  double angle;   // only drawn for layers that need positions
  double weight;
};

// Interferers of every class, generated lazily in order of increasing
// distance from the layer centre: the areas pi r_k^2 of a homogeneous PPP
// form a 1-D Poisson process, so each next point costs one exponential.
// Without `keep`, only the latest point of each class is stored and the
// points must be read in order.
class RadialLayers {
 public:
  RadialLayers(const Context& ctx, double radius, bool with_angles, RandomStream& rng, bool keep = false)
      : ctx_(ctx),
        radius2_(radius * radius),
        with_angles_(with_angles),
        keep_(keep),
        rng_(&rng),
        layers_(ctx.classes().size()) {}

  void reset(double f_j, std::vector<double> ratios) {
    f_j_ = f_j;
    ratios_ = std::move(ratios);
    for (auto& l : layers_) l = Layer{};
  }

  const Interferer* get(std::size_t cls, std::size_t k) {
    auto& l = layers_[cls];
    while (l.count <= k) {
      if (!next(cls, l)) return nullptr;
    }
    return keep_ ? &l.points[k] : &l.last;
  }

  std::size_t class_count() const { return layers_.size(); }

 private:
  struct Layer {
    double area = 0.0;
    bool done = false;
    std::size_t count = 0;
    Interferer last{};
    std::vector<Interferer> points;
  };

  bool next(std::size_t cls, Layer& l) {
    const auto& c = ctx_.classes()[cls];
    if (l.done || c.intensity <= 0.0) {
      l.done = true;
      return false;
    }
    l.area += rng_->exponential() / c.intensity;
    const double r2 = l.area / kPi;
    if (r2 > radius2_) {
      l.done = true;
      return false;
    }
    const double w = ctx_.weight(cls, f_j_, ratios_, *rng_);
    const double angle = with_angles_ && w != 0.0 ? 2.0 * kPi * rng_->uniform() : 0.0;
    l.last = {r2, angle, w};
    if (keep_) l.points.push_back(l.last);
    ++l.count;
    return true;
  }

  const Context& ctx_;
  double radius2_;
  bool with_angles_;
  bool keep_;
  RandomStream* rng_;
  double f_j_ = 0.0;
  std::vector<double> ratios_;
  std::vector<Layer> layers_;
};

// One uplink attempt at a single AP at the origin. Stops drawing
// interferers as soon as the accumulated interference exceeds what the
// desired signal can tolerate.
bool single_ap_attempt(const Context& ctx, RadialLayers& layers, RandomStream& fades, double d, double threshold) {
  if (d == 0.0) return true;
  const double signal = ctx.ref_power() * fades.exponential() * ctx.path_gain(d * d);
  const double budget = signal / threshold - ctx.noise();
  if (budget < 0.0) return false;
  double interference = 0.0;
  for (std::size_t c = 0; c < layers.class_count(); ++c) {
    for (std::size_t k = 0;; ++k) {
      const Interferer* p = layers.get(c, k);
      if (p == nullptr) break;
      if (p->weight == 0.0) continue;
      interference += p->weight * fades.exponential() * ctx.path_gain(p->r2);
      if (interference > budget) return false;
    }
  }
  return true;
}

double resolve_radius(const SimConfig& cfg, std::size_t j, double d, double threshold, const Scenario& s) {
  if (cfg.region_radius > 0.0) return cfg.region_radius;
  return default_region_radius(j, d, threshold, s, cfg.tail_tolerance);
}

struct StreamId {
  std::uint64_t stream;
  bool mirrored;
};

StreamId stream_for(std::uint64_t trial, bool antithetic) {
  if (antithetic) return {trial / 2, (trial % 2) == 1};
  return {trial, false};
}

// Estimator over per-trial outcomes. With antithetic pairing the
// sampling unit is the pair average.
template <class Trial>
Estimate estimate_probability(const SimConfig& cfg, Trial&& trial) {
  if (cfg.trials == 0) throw InputError("trials must be at least 1");
  const std::uint64_t trials = cfg.antithetic ? cfg.trials + (cfg.trials % 2) : cfg.trials;
  auto total = deterministic_reduce<Moments>(trials, kChunk, cfg.threads, [&](std::uint64_t b, std::uint64_t e) {
    Moments m;
    if (cfg.antithetic) {
      for (std::uint64_t t = b; t < e; t += 2) {
        const double x = 0.5 * ((trial(t) ? 1.0 : 0.0) + (trial(t + 1) ? 1.0 : 0.0));
        m.add(x);
      }
    } else {
      for (std::uint64_t t = b; t < e; ++t) m.add(trial(t) ? 1.0 : 0.0);
    }
    return m;
  });
  return total.estimate(trials);
}

}  // namespace

std::vector<Point2> sample_ppp(double intensity, double radius, RandomStream& rng) {
  if (intensity < 0.0) throw InputError("sample_ppp: intensity must be non-negative");
  if (radius < 0.0) throw InputError("sample_ppp: radius must be non-negative");
  const std::uint64_t count = rng.poisson(intensity * kPi * radius * radius);
  std::vector<Point2> pts;
  pts.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * kPi * rng.uniform();
    pts.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return pts;
}

double default_region_radius(std::size_t j, double d, double threshold, const Scenario& s, double tail_tolerance) {
  if (j >= s.classes.size()) throw InputError("class index out of range");
  if (!(tail_tolerance > 0.0)) throw InputError("tail_tolerance must be positive");
  const double alpha = s.channel.pathloss_exponent;
  const auto& ref = s.classes[j];
  const double f_j = ref.carrier.mean();
  // Mean interference from beyond R, times threshold * d^alpha / P_j, is
  // scale * R^(2 - alpha).
  double weight = 0.0;
  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    const auto& c = s.classes[i];
    weight += time_activity_factor(i, j, s) * c.device_density * frequency_activity_factor(i, j, f_j, s) * c.tx_power;
  }
  const double scale = threshold * std::pow(d, alpha) / ref.tx_power * weight * 2.0 * kPi / (alpha - 2.0);
  const double tail_radius = scale > 0.0 ? std::pow(scale / tail_tolerance, 1.0 / (alpha - 2.0)) : 0.0;
  return std::max({1000.0, 10.0 * d, tail_radius});
}

Estimate snapshot_success(std::size_t j, double d, double threshold, const Scenario& s, const SimConfig& cfg) {
  if (d < 0.0 || !(threshold > 0.0)) throw InputError("snapshot_success: invalid distance or threshold");
  const Context ctx(j, s, cfg.overlap);
  const double radius = resolve_radius(cfg, j, d, threshold, s);
  return estimate_probability(cfg, [&](std::uint64_t t) {
    const auto id = stream_for(t, cfg.antithetic);
    RandomStream rng(cfg.seed, id.stream, id.mirrored);
    const double f_j = ctx.draw_ref_carrier(rng);
    RadialLayers layers(ctx, radius, false, rng);
    layers.reset(f_j, ctx.ratios_for(f_j));
    return single_ap_attempt(ctx, layers, rng, d, threshold);
  });
}

namespace {

struct SessionMoments {
  Moments success, tx_all, tx_success, delay_all, delay_success, energy;

  void merge(const SessionMoments& o) {
    success.merge(o.success);
    tx_all.merge(o.tx_all);
    tx_success.merge(o.tx_success);
    delay_all.merge(o.delay_all);
    delay_success.merge(o.delay_success);
    energy.merge(o.energy);
  }
};

}  // namespace

SessionEstimates simulate_session(std::size_t j, double d, const Scenario& s, const SimConfig& cfg,
                                  const SessionOptions& options) {
  if (d < 0.0) throw InputError("simulate_session: distance must be non-negative");
  if (cfg.trials == 0) throw InputError("trials must be at least 1");
  const Context ctx(j, s, cfg.overlap);
  const double threshold = s.sinr_threshold;
  const double radius = resolve_radius(cfg, j, d, threshold, s);
  const double p_ack = options.forced_ack ? *options.forced_ack : ack_success_probability(j, d, s);
  const int max_tx = s.retransmission.max_transmissions;
  const double packet_time = s.classes[j].packet_time;
  const double retry_wait = s.retransmission.retry_wait;

  auto total = deterministic_reduce<SessionMoments>(cfg.trials, kChunk, cfg.threads, [&](std::uint64_t b,
                                                                                         std::uint64_t e) {
    SessionMoments m;
    for (std::uint64_t t = b; t < e; ++t) {
      RandomStream rng(cfg.seed, t);
      RandomStream topo_rng(mix_seed(cfg.seed, kTopologyDomain), t);
      const double f_j = ctx.draw_ref_carrier(rng);
      const auto ratios = ctx.ratios_for(f_j);
      RadialLayers frozen(ctx, radius, false, topo_rng, true);
      if (cfg.frozen_topology) frozen.reset(f_j, ratios);

      int n = 0;
      bool delivered = false;
      while (n < max_tx && !delivered) {
        ++n;
        bool uplink;
        if (options.forced_uplink_success) {
          uplink = rng.bernoulli(*options.forced_uplink_success);
        } else if (cfg.frozen_topology) {
          uplink = single_ap_attempt(ctx, frozen, rng, d, threshold);
        } else {
          RadialLayers fresh(ctx, radius, false, rng);
          fresh.reset(f_j, ratios);
          uplink = single_ap_attempt(ctx, fresh, rng, d, threshold);
        }
        delivered = uplink && (p_ack >= 1.0 || rng.bernoulli(p_ack));
      }
      const double delay = n * packet_time + (n - 1) * retry_wait;
      m.success.add(delivered ? 1.0 : 0.0);
      m.tx_all.add(n);
      m.delay_all.add(delay);
      m.energy.add(energy_for_transmissions(n, j, s));
      if (delivered) {
        m.tx_success.add(n);
        m.delay_success.add(delay);
      }
    }
    return m;
  });

  SessionEstimates out;
  out.session_success = total.success.estimate(cfg.trials);
  out.transmissions_all = total.tx_all.estimate(cfg.trials);
  out.transmissions_success = total.tx_success.estimate(cfg.trials);
  out.delay_all = total.delay_all.estimate(cfg.trials);
  out.delay_success = total.delay_success.estimate(cfg.trials);
  out.energy_per_report = total.energy.estimate(cfg.trials);
  const double mean_energy = out.energy_per_report.mean;
  out.battery_lifetime.trials_used = cfg.trials;
  if (mean_energy > 0.0) {
    out.battery_lifetime.mean = battery_lifetime_for_energy(mean_energy, j, s);
    out.battery_lifetime.std_error = out.battery_lifetime.mean * out.energy_per_report.std_error / mean_energy;
  }
  return out;
}

Estimate snapshot_mrc_success(const JointReceptionConfig& jr, std::size_t j, double threshold, const Scenario& s,
                              const SimConfig& cfg, InterferenceCoupling coupling) {
  if (auto v = validate_joint_reception(jr); !v.empty()) {
    throw InputError("invalid joint reception config: " + v.front().path + ": " + v.front().message);
  }
  if (!(threshold > 0.0)) throw InputError("snapshot_mrc_success: threshold must be positive");
  const Context ctx(j, s, cfg.overlap);

  struct Ap {
    double x, y, d, p_av;
  };
  std::vector<Ap> aps;
  double d_max = 0.0;
  const std::size_t m_total = jr.ap_distances.size();
  for (std::size_t m = 0; m < m_total; ++m) {
    const double a = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(m_total);
    const double dm = jr.ap_distances[m];
    const double p = jr.availabilities[m];
    if (p <= 0.0) continue;
    aps.push_back({dm * std::cos(a), dm * std::sin(a), dm, p});
    d_max = std::max(d_max, dm);
  }
  if (aps.empty()) return {0.0, 0.0, cfg.trials};

  const double radius = cfg.region_radius > 0.0
                            ? cfg.region_radius
                            : default_region_radius(j, d_max, threshold, s, cfg.tail_tolerance);
  const double signal_scale = ctx.ref_power();
  const double noise = ctx.noise();

  return estimate_probability(cfg, [&](std::uint64_t t) {
    const auto id = stream_for(t, cfg.antithetic);
    RandomStream rng(cfg.seed, id.stream, id.mirrored);
    const double f_j = ctx.draw_ref_carrier(rng);
    const auto ratios = ctx.ratios_for(f_j);

    const std::size_t n = aps.size();
    std::vector<double> signal(n, 0.0);
    std::vector<double> interference(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const bool listening = aps[m].p_av >= 1.0 || rng.bernoulli(aps[m].p_av);
      if (!listening) continue;
      if (aps[m].d == 0.0) return true;
      signal[m] = signal_scale * rng.exponential() * ctx.path_gain(aps[m].d * aps[m].d);
    }
    // Sum of SINRs with the interference accumulated so far: an upper bound
    // on the final combined SINR.
    auto bound = [&] {
      double u = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (signal[m] > 0.0) u += signal[m] / (noise + interference[m]);
      }
      return u;
    };
    if (bound() < threshold) return false;

    // Points of every (AP, class) stream are consumed in order of increasing
    // distance, so interference builds up at all APs together and the
    // early exit fires as soon as it can.
    struct Cursor {
      RadialLayers* layers;
      std::size_t cls, k, ap;
      const Interferer* point;
    };
    const bool shared = coupling == InterferenceCoupling::shared;
    std::vector<std::unique_ptr<RadialLayers>> owned;
    std::vector<Cursor> cursors;
    for (std::size_t m = 0; m < (shared ? 1 : n); ++m) {
      if (!shared && signal[m] == 0.0) continue;
      owned.push_back(std::make_unique<RadialLayers>(ctx, shared ? radius + d_max : radius, shared, rng));
      owned.back()->reset(f_j, ratios);
      for (std::size_t c = 0; c < owned.back()->class_count(); ++c) {
        Cursor cur{owned.back().get(), c, 0, m, nullptr};
        cur.point = cur.layers->get(c, 0);
        if (cur.point != nullptr) cursors.push_back(cur);
      }
    }
    while (!cursors.empty()) {
      std::size_t pick = 0;
      for (std::size_t q = 1; q < cursors.size(); ++q) {
        if (cursors[q].point->r2 < cursors[pick].point->r2) pick = q;
      }
      auto& cur = cursors[pick];
      const Interferer* p = cur.point;
      if (p->weight != 0.0) {
        if (shared) {
          const double r = std::sqrt(p->r2);
          const double px = r * std::cos(p->angle);
          const double py = r * std::sin(p->angle);
          for (std::size_t m = 0; m < n; ++m) {
            if (signal[m] == 0.0) continue;
            const double dx = px - aps[m].x;
            const double dy = py - aps[m].y;
            interference[m] += p->weight * rng.exponential() * ctx.path_gain(dx * dx + dy * dy);
          }
        } else {
          interference[cur.ap] += p->weight * rng.exponential() * ctx.path_gain(p->r2);
        }
        if (bound() < threshold) return false;
      }
      cur.point = cur.layers->get(cur.cls, ++cur.k);
      if (cur.point == nullptr) cursors.erase(cursors.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return bound() >= threshold;
  });
}

}  // namespace coexist
