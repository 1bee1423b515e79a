#pragma once

#include <cmath>
#include <cstdint>

#include "locint/errors.hpp"
#include "locint/geometry.hpp"

namespace locint {

// Counter-based stream (Philox 4x32-10). A (seed, stream) pair addresses an
// independent substream; identical pairs reproduce identical draws bit for
// bit on any platform.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key0_(std::uint32_t(seed)), key1_(std::uint32_t(seed >> 32)),
        ctr2_(std::uint32_t(stream)), ctr3_(std::uint32_t(stream >> 32)) {}

  std::uint64_t next_u64() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  Vec2 uniform_in(const BBox& b) { return {uniform(b.xmin, b.xmax), uniform(b.ymin, b.ymax)}; }

  Vec2 uniform_in_disc(Vec2 c, double r) {
    const double rho = r * std::sqrt(uniform());
    const double a = 2.0 * M_PI * uniform();
    return {c.x + rho * std::cos(a), c.y + rho * std::sin(a)};
  }

  double exponential() { return -std::log1p(-uniform()); }

  // Exact Poisson draw by counting unit-rate exponential arrivals.
  long poisson(double mean) {
    if (!(mean >= 0.0)) throw InvalidArgumentError("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (!std::isfinite(mean)) throw InvalidModelError("poisson: mean is not finite");
    double sum = 0.0;
    long k = -1;
    while (sum < mean) {
      sum += exponential();
      ++k;
    }
    return k;
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * b;
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
  }

  void refill() {
    std::uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[0] = (std::uint64_t(c0) << 32) | c1;
    buf_[1] = (std::uint64_t(c2) << 32) | c3;
    have_ = 2;
    if (++ctr0_ == 0) ++ctr1_;  // 64-bit block counter in (ctr0, ctr1)
  }

  std::uint32_t key0_, key1_;
  std::uint32_t ctr0_ = 0, ctr1_ = 0, ctr2_, ctr3_;
  std::uint64_t buf_[2] = {0, 0};
  int have_ = 0;
};

}  // namespace locint
