#ifndef AGHQ_RNG_HPP
#define AGHQ_RNG_HPP

#include <cstdint>
#include <vector>

namespace aghq {

/// Counter-based pseudo-random stream built on the SplitMix64 output function.
/// A stream is addressed by (seed, id1, id2); draws depend only on the address
/// and the draw counter, so disjoint (id1, id2) substreams can be consumed in
/// any order (or in parallel) with identical results.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed, std::uint64_t id1 = 0, std::uint64_t id2 = 0);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double next_uniform();

  /// Standard normal via inverse-CDF transform of next_uniform().
  double next_normal();

  /// Poisson(lambda): CDF inversion for lambda <= 30, transformed rejection
  /// (PTRS) above.
  long next_poisson(double lambda);

private:
  std::uint64_t state_;
};

/// iid Poisson(lambda) counts drawn from `stream`.
std::vector<long> poisson_sample(double lambda, std::size_t count, RngStream& stream);

}  // namespace aghq

#endif
