#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lpproj {

// (seed, stream_id) pair recorded with every generated batch.
struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix64(std::uint64_t x);

/// Deterministic xoshiro256** stream keyed by (seed, stream_id).
///
/// The generator state is derived by hashing both keys through SplitMix64, so
/// any two distinct stream ids give unrelated sequences. Children created with
/// split() are ordinary streams whose id is a hash of the parent id and the
/// child index. Normal variates use the polar method and cache the second
/// value, so the output depends only on the call sequence.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); safe to pass to log().
  double uniform_open();
  /// Uniform on (a, b).
  double uniform(double a, double b);
  double normal();
  bool coin();

  RngStream split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  Provenance provenance() const { return {seed_, stream_id_}; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace lpproj
