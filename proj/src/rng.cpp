#include "aghq/rng.hpp"

#include <cmath>

#include "aghq/special.hpp"

namespace aghq {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t id1, std::uint64_t id2) {
  // Fold the substream ids into the state one at a time; +1 keeps id 0
  // distinct from "no id".
  std::uint64_t s = mix(seed + kGamma);
  s = mix(s ^ ((id1 + 1) * kGamma));
  s = mix(s ^ ((id2 + 1) * kGamma));
  state_ = s;
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix(state_);
}

double RngStream::next_uniform() {
  // 53 random bits, offset by half an ulp: strictly inside (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() { return normal_quantile(next_uniform()); }

long RngStream::next_poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda <= 30.0) {
    // Sequential CDF inversion.
    const double u = next_uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    long x = 0;
    while (u > cdf) {
      ++x;
      p *= lambda / static_cast<double>(x);
      cdf += p;
      if (x > 10000) break;  // u in the far tail beyond double resolution
    }
    return x;
  }
  // PTRS transformed rejection (Hormann 1993).
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    double u = next_uniform() - 0.5;
    const double v = next_uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<long>(kf);
  }
}

std::vector<long> poisson_sample(double lambda, std::size_t count, RngStream& stream) {
  std::vector<long> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = stream.next_poisson(lambda);
  return out;
}

}  // namespace aghq
