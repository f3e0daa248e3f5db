#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dsm/types.hpp"

namespace dsm {

/// Seeded generator whose child streams are derived deterministically from
/// (seed, stream id) with splitmix64, so independent experiments never share
/// state and every run is bit-reproducible from its recorded seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent generator for sub-experiment `stream`.
  Rng split(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniformly distributed point on the unit sphere of R^n.
  Vector unit_vector(Eigen::Index n) {
    Vector v = normal_vector(n);
    double norm = v.norm();
    while (norm == 0.0) {
      v = normal_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

  /// Uniformly distributed point in the closed ball B(center, radius).
  Vector in_ball(const Vector& center, double radius) {
    const auto n = center.size();
    const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
    return center + r * unit_vector(n);
  }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dsm
