#pragma once

#include <cstdint>
#include <random>

namespace coexist {

/// 64-bit finaliser used to derive independent engine seeds from
/// (master seed, stream counter) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * One independent random stream. Trial k of an estimator always reads
 * stream k of the master seed, so results do not depend on how trials
 * are scheduled across threads.
 *
 * With `mirrored` set every uniform u is replaced by 1 - u, which gives
 * the antithetic partner of the unmirrored stream with the same ids.
 */
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream, bool mirrored = false);

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Unit-mean exponential.
  double exponential();
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool mirrored_;
};

}  // namespace coexist
