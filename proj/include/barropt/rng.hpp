#pragma once

// Counter-based random streams: Philox4x32-10 (Salmon et al. 2011) keyed by
// (seed, path index), so any path's stream is reproducible independently of
// scheduling. Standard normals via a 128-layer ziggurat over the Philox
// output.

#include <array>
#include <cmath>
#include <cstdint>

namespace barropt {

struct Philox4x32 {
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t(kM0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kM1) * ctr[2];
      const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
      const std::uint32_t hi1 = std::uint64_t(p1) >> 32, lo1 = std::uint32_t(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }
};

namespace detail {

struct ZigguratTables {
  // 128 layers; kn: acceptance thresholds against 55-bit |hz|
  std::uint64_t kn[128];
  double wn[128], fn[128];
  double r;

  ZigguratTables() {
    const double m1 = 36028797018963968.0;  // 2^55
    double dn = 3.442619855899, tn = dn;
    const double vn = 9.91256303526217e-3;
    r = dn;
    const double q = vn / std::exp(-0.5 * dn * dn);
    kn[0] = std::uint64_t((dn / q) * m1);
    kn[1] = 0;
    wn[0] = q / m1;
    wn[127] = dn / m1;
    fn[0] = 1.0;
    fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; --i) {
      dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
      kn[i + 1] = std::uint64_t((dn / tn) * m1);
      tn = dn;
      fn[i] = std::exp(-0.5 * dn * dn);
      wn[i] = dn / m1;
    }
  }
};

inline const ZigguratTables& ziggurat() {
  static const ZigguratTables t;
  return t;
}

}  // namespace detail

// One path's stream: counter = (path, block), key = seed.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t path)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        path_lo_(std::uint32_t(path)), path_hi_(std::uint32_t(path >> 32)) {}

  std::uint64_t next_u64() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    const auto out = Philox4x32::block(
        {path_lo_, path_hi_, std::uint32_t(block_), std::uint32_t(block_ >> 32)},
        key_);
    ++block_;
    spare_ = (std::uint64_t(out[2]) << 32) | out[3];
    have_ = true;
    return (std::uint64_t(out[0]) << 32) | out[1];
  }

  // uniform on (0, 1)
  double uniform() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal (ziggurat with exact tail)
  double normal() {
    const auto& t = detail::ziggurat();
    for (;;) {
      const std::uint64_t u = next_u64();
      const int iz = int(u & 127u);
      const std::int64_t hz = std::int64_t(u) >> 8;  // 56-bit signed
      const std::uint64_t ahz = std::uint64_t(hz < 0 ? -hz : hz);
      if (ahz < t.kn[iz]) return double(hz) * t.wn[iz];
      if (iz == 0) {  // tail beyond r
        double x, y;
        do {
          x = -std::log(uniform()) / t.r;
          y = -std::log(uniform());
        } while (y + y < x * x);
        return hz > 0 ? t.r + x : -(t.r + x);
      }
      const double x = double(hz) * t.wn[iz];
      if (t.fn[iz] + uniform() * (t.fn[iz - 1] - t.fn[iz]) <
          std::exp(-0.5 * x * x))
        return x;
    }
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_, path_hi_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_ = false;
};

}  // namespace barropt
