#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tubal {

/// Seeded generator with a hand-rolled Box-Muller transform. The standard
/// library's normal_distribution is implementation-defined, which would break
/// the bit-reproducibility contract across toolchains; mt19937_64 itself is
/// specified exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in (0, 1].
  double uniform() {
    return (double(gen_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace tubal
