#include "gir/rng.hpp"

#include <cmath>

namespace gir {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
  std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  std::array<std::uint32_t, 4> out;
  out[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0;
  out[1] = static_cast<std::uint32_t>(p1);
  out[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1;
  out[3] = static_cast<std::uint32_t>(p0);
  ctr = out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {}

RngStream RngStream::substream(std::uint64_t child) const {
  return RngStream(master_seed_, splitmix64(stream_id_ ^ splitmix64(child + 1)));
}

std::array<std::uint32_t, 4> RngStream::philox_block(std::uint64_t counter) const {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(master_seed_);
  std::uint32_t k1 = static_cast<std::uint32_t>(master_seed_ >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

void RngStream::refill() {
  auto blk = philox_block(counter_++);
  buf_[0] = (static_cast<std::uint64_t>(blk[1]) << 32) | blk[0];
  buf_[1] = (static_cast<std::uint64_t>(blk[3]) << 32) | blk[2];
  buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (buf_pos_ >= 2) refill();
  return buf_[buf_pos_++];
}

double RngStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) fail(ErrorCode::invalid_spec, "uniform_int: empty range");
  std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  std::uint64_t reject_below = (-range) % range;
  for (;;) {
    std::uint64_t x = next_u64();
    if (x >= reject_below) return lo + static_cast<std::int64_t>(x % range);
  }
}

double RngStream::t_scaled(int df) {
  if (df <= 2) fail(ErrorCode::invalid_spec, "t_scaled needs df > 2 for unit variance");
  double z = normal();
  double chi2 = 0.0;
  for (int i = 0; i < df; ++i) {
    double g = normal();
    chi2 += g * g;
  }
  double t = z / std::sqrt(chi2 / df);
  return t * std::sqrt((df - 2.0) / df);
}

Vec RngStream::normal_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = normal();
  return v;
}

}  // namespace gir
