#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace grfmcmc {

// Bit mixer used for seeding; one step of the splitmix64 sequence.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream with cheap derived substreams.
//
// Every stochastic routine in the library takes an RngStream by reference;
// nothing touches global state, so a run is reproducible from a single seed.
// Substreams are derived by hashing (seed, index) so that e.g. chains or
// datasets get independent streams that do not depend on execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent stream for a child task; stable under reordering of calls.
  RngStream substream(std::uint64_t index) const {
    return RngStream(splitmix64(seed_ ^ splitmix64(index + 0x51a2b3c4d5e6f708ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n). n must be positive.
  std::int64_t uniform_int(std::int64_t n) {
    return static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes exactly two engine draws per
  // call so the stream position never depends on generated values.  The +1
  // shift keeps the first uniform strictly positive for the log.
  double normal() {
    double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace grfmcmc
