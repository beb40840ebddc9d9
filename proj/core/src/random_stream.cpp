#include "coexist/random_stream.hpp"

#include <cmath>

namespace coexist {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over a golden-ratio stride
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, bool mirrored)
    : engine_(mix_seed(seed, stream)), mirrored_(mirrored) {}

double RandomStream::uniform() {
  // 53 random bits, centred in their cell so neither 0 nor 1 occurs
  const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return mirrored_ ? 1.0 - u : u;
}

double RandomStream::exponential() { return -std::log(uniform()); }

std::uint64_t RandomStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

}  // namespace coexist
