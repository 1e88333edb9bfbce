#pragma once

#include <cstdint>
#include <random>

namespace bmline {

// Seeded uniform generator. Scales raw mt19937 words directly so the stream
// is identical across standard libraries (distributions are not portable).
class UniformRng {
 public:
  explicit UniformRng(std::uint32_t seed) : eng_(seed) {}

  // uniform on [-1, 1)
  double symmetric() { return 2.0 * unit() - 1.0; }

  // uniform on [0, 1)
  double unit() {
    return static_cast<double>(eng_()) / 4294967296.0;
  }

  // uniform on [lo, hi)
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937 eng_;
};

}  // namespace bmline
