#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace itolab {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ generator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }
  static Xoshiro256pp from_state(const std::array<std::uint64_t, 4>& s) noexcept {
    Xoshiro256pp g;
    g.s_ = s;
    return g;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

/// Random stream of one path: a function of (seed, path index) only, so the
/// draws a path sees never depend on which worker runs it.
Xoshiro256pp path_stream(std::uint64_t seed, std::uint64_t path) noexcept;

namespace detail {
struct ZigguratTables {
  std::array<double, 129> x{};
  std::array<double, 128> ratio{};
};
extern const ZigguratTables ziggurat_tables;
}  // namespace detail

/// 128-layer ziggurat for the standard normal. Each accepted draw in the
/// common case consumes a single 64-bit output: the top 53 bits give the
/// abscissa and the low 7 bits the layer.
class ZigguratNormal {
 public:
  double operator()(Xoshiro256pp& rng) const noexcept {
    for (;;) {
      const std::uint64_t bits = rng();
      const unsigned layer = static_cast<unsigned>(bits & 0x7F);
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
      if (std::abs(u) < detail::ziggurat_tables.ratio[layer]) [[likely]]
        return u * detail::ziggurat_tables.x[layer];
      const double z = slow_path(rng, u, layer);
      if (!std::isnan(z)) return z;
    }
  }

  /// Completes a draw whose first output failed the fast test.
  static double finish(Xoshiro256pp& rng, double u, unsigned layer) noexcept {
    const double z = slow_path(rng, u, layer);
    return std::isnan(z) ? ZigguratNormal{}(rng) : z;
  }

 private:
  /// Tail or wedge sample; NaN means "rejected, draw again".
  static double slow_path(Xoshiro256pp& rng, double u, unsigned layer) noexcept;
};

inline double standard_normal(Xoshiro256pp& rng) noexcept { return ZigguratNormal{}(rng); }

/// N independent xoshiro256++ streams stored lane-wise so that one normal per
/// lane can be drawn in a single vectorisable pass. Lane l produces exactly
/// the sequence ZigguratNormal would produce from the same stream.
template <std::size_t N>
class StreamBlock {
 public:
  void set(std::size_t lane, const Xoshiro256pp& g) noexcept {
    const auto& st = g.state();
    s0_[lane] = st[0];
    s1_[lane] = st[1];
    s2_[lane] = st[2];
    s3_[lane] = st[3];
  }

  Xoshiro256pp get(std::size_t lane) const noexcept {
    return Xoshiro256pp::from_state({s0_[lane], s1_[lane], s2_[lane], s3_[lane]});
  }

  /// z[l] ~ N(0, 1) for l < lanes.
  void normals(double* __restrict z, std::size_t lanes) noexcept {
    const auto& tab = detail::ziggurat_tables;
    for (std::size_t l = 0; l < lanes; ++l) {
      const std::uint64_t r = rotl(s0_[l] + s3_[l], 23) + s0_[l];
      const std::uint64_t t = s1_[l] << 17;
      s2_[l] ^= s0_[l];
      s3_[l] ^= s1_[l];
      s1_[l] ^= s2_[l];
      s0_[l] ^= s3_[l];
      s2_[l] ^= t;
      s3_[l] = rotl(s3_[l], 45);
      const std::uint64_t layer = r & 0x7F;
      const double u = static_cast<double>(r >> 11) * 0x1.0p-52 - 1.0;
      z[l] = u * tab.x[layer];
      u_[l] = u;
      layer_[l] = layer;
      reject_[l] = (u < 0.0 ? -u : u) < tab.ratio[layer] ? 0 : 1;
    }
    for (std::size_t l = 0; l < lanes; ++l) {
      if (!reject_[l]) [[likely]]
        continue;
      Xoshiro256pp g = get(l);
      z[l] = ZigguratNormal::finish(g, u_[l], static_cast<unsigned>(layer_[l]));
      set(l, g);
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  alignas(64) std::array<std::uint64_t, N> s0_{};
  alignas(64) std::array<std::uint64_t, N> s1_{};
  alignas(64) std::array<std::uint64_t, N> s2_{};
  alignas(64) std::array<std::uint64_t, N> s3_{};
  alignas(64) std::array<double, N> u_{};
  alignas(64) std::array<std::uint64_t, N> layer_{};
  alignas(64) std::array<std::uint64_t, N> reject_{};
};

}  // namespace itolab
