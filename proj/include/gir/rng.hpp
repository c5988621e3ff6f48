#pragma once

#include <array>
#include <cstdint>

#include "gir/linalg.hpp"

namespace gir {

/// Counter-based random stream (Philox4x32-10). A stream is fully determined
/// by (master_seed, stream_id); every draw advances a 64-bit block counter, so
/// replaying a stream reproduces the exact draw sequence regardless of which
/// worker executes it. Distinct stream ids give statistically independent
/// streams.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derives a child stream for nested parallel work (bootstrap draw inside a
  /// replication, etc.). Pure function of (stream_id, child).
  RngStream substream(std::uint64_t child) const;

  std::uint64_t next_u64();
  double uniform01();  // (0, 1]
  double normal();     // standard normal, Box-Muller
  /// Uniform integer on [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Student-t draw standardized to unit variance; requires df > 2.
  double t_scaled(int df);
  Vec normal_vec(int n);

 private:
  std::array<std::uint32_t, 4> philox_block(std::uint64_t counter) const;
  void refill();

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int buf_pos_ = 2;  // empty
  double spare_normal_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gir
