#include "itolab/rng.hpp"

#include <limits>

namespace itolab {

namespace {

// Doornik's 128-layer constants: right edge of the base layer and common area.
constexpr double kR = 3.442619855899;
constexpr double kV = 9.91256303526217e-3;

double density(double x) { return std::exp(-0.5 * x * x); }

}  // namespace

Xoshiro256pp path_stream(std::uint64_t seed, std::uint64_t path) noexcept {
  std::uint64_t a = seed;
  std::uint64_t b = path ^ 0xD1B54A32D192ED03ULL;
  const std::uint64_t ka = splitmix64(a);
  const std::uint64_t kb = splitmix64(b);
  return Xoshiro256pp(ka ^ (kb * 0x9E3779B97F4A7C15ULL) ^ (kb >> 29));
}

namespace detail {

const ZigguratTables ziggurat_tables = [] {
  ZigguratTables t;
  double f = density(kR);
  t.x[0] = kV / f;
  t.x[1] = kR;
  t.x[128] = 0.0;
  for (int i = 2; i < 128; ++i) {
    t.x[i] = std::sqrt(-2.0 * std::log(kV / t.x[i - 1] + f));
    f = density(t.x[i]);
  }
  for (int i = 0; i < 128; ++i) t.ratio[i] = t.x[i + 1] / t.x[i];
  return t;
}();

}  // namespace detail

double ZigguratNormal::slow_path(Xoshiro256pp& rng, double u, unsigned layer) noexcept {
  const auto& t = detail::ziggurat_tables;
  if (layer == 0) {
    // Marsaglia's tail method beyond R.
    double x;
    double y;
    do {
      x = std::log(1.0 - rng.uniform()) / kR;
      y = std::log(1.0 - rng.uniform());
    } while (-2.0 * y < x * x);
    return u < 0.0 ? x - kR : kR - x;
  }
  const double x = u * t.x[layer];
  const double f0 = std::exp(-0.5 * (t.x[layer] * t.x[layer] - x * x));
  const double f1 = std::exp(-0.5 * (t.x[layer + 1] * t.x[layer + 1] - x * x));
  if (f1 + rng.uniform() * (f0 - f1) < 1.0) return x;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace itolab
