#pragma once

#include <cstdint>
#include <random>

namespace subart {

/// Wrapper around a single MCMC random stream. Every sampler owns exactly
/// one Rng; independent streams are derived with derive_seed so that
/// parallel replications never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return unif_(gen_); }

  double normal() { return norm_(gen_); }

  double normal(double mean, double sd) { return mean + sd * norm_(gen_); }

  double gamma(double shape, double scale) {
    std::gamma_distribution<double> d(shape, scale);
    return d(gen_);
  }

  double chi_squared(double df) { return gamma(0.5 * df, 2.0); }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(gen_);
  }

  /// One-sided truncated normal: support (0, inf) if positive, else (-inf, 0].
  /// Inverse-CDF with clamped tail probabilities so extreme means stay finite.
  double truncated_normal(double mean, double sd, bool positive);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

/// Counter-based seed derivation (splitmix64 finalizer). Children of the
/// same parent seed with distinct stream ids are effectively independent.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace subart
