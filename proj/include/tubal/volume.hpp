#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tubal/errors.hpp"
#include "tubal/rng.hpp"
#include "tubal/tensor3.hpp"

namespace tubal {

/// 3D data volume: n1 samples along the time/depth axis (fastest), n2
/// inlines, n3 crosslines. sample_interval is the axis-1 spacing.
struct Volume {
  Index n1 = 0, n2 = 0, n3 = 0;
  double sample_interval = 1.0;
  std::vector<double> data;

  Volume() = default;
  Volume(Index n1_, Index n2_, Index n3_, double dt = 1.0)
      : n1(n1_), n2(n2_), n3(n3_), sample_interval(dt) {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0) throw shape_error("Volume: dimensions must be positive");
    data.assign(static_cast<std::size_t>(n1 * n2 * n3), 0.0);
  }

  Index size() const { return n1 * n2 * n3; }
  std::string shape_str() const { return detail::dims_str(n1, n2, n3); }
  bool same_shape(const Volume& o) const { return n1 == o.n1 && n2 == o.n2 && n3 == o.n3; }

  double& operator()(Index i1, Index i2, Index i3) {
    return data[std::size_t(i1 + n1 * (i2 + n2 * i3))];
  }
  double operator()(Index i1, Index i2, Index i3) const {
    return data[std::size_t(i1 + n1 * (i2 + n2 * i3))];
  }
};

inline double energy(const Volume& v) {
  double s = 0;
  for (double x : v.data) s += x * x;
  return s;
}

/// SNR = 10 log10(||M||^2 / ||M - Y||^2); +infinity when Y == M.
inline double snr_db(const Volume& reference, const Volume& test) {
  if (!reference.same_shape(test))
    throw shape_error("snr_db: volume shapes differ (" + reference.shape_str() + " vs " +
                      test.shape_str() + ")");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < reference.data.size(); ++i) {
    const double m = reference.data[i];
    const double e = m - test.data[i];
    num += m * m;
    den += e * e;
  }
  if (den == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

/// Add white Gaussian noise at the requested SNR. Sigma is derived
/// analytically from the signal energy; an infinite target returns the
/// input unchanged.
inline Volume add_noise(const Volume& clean, double target_snr_db, std::uint64_t seed) {
  const double e = energy(clean);
  if (e == 0) throw numeric_error("add_noise: zero input volume");
  Volume out = clean;
  if (std::isinf(target_snr_db) && target_snr_db > 0) return out;
  const double sigma = std::sqrt(e * std::pow(10.0, -target_snr_db / 10.0) / double(clean.size()));
  Rng rng(seed);
  for (double& v : out.data) v += sigma * rng.gaussian();
  return out;
}

/// Robust noise level estimate: median absolute deviation of the
/// finest-scale differences along axis 1, scaled to Gaussian sigma.
inline double mad_sigma(const Volume& v) {
  if (v.n1 < 2) throw shape_error("mad_sigma: need at least two samples along axis 1");
  std::vector<double> diffs;
  diffs.reserve(std::size_t((v.n1 - 1) * v.n2 * v.n3));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index i3 = 0; i3 < v.n3; ++i3)
    for (Index i2 = 0; i2 < v.n2; ++i2)
      for (Index i1 = 0; i1 + 1 < v.n1; ++i1)
        diffs.push_back(std::abs((v(i1 + 1, i2, i3) - v(i1, i2, i3)) * inv_sqrt2));
  auto mid = diffs.begin() + std::ptrdiff_t(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  return *mid / 0.6744897501960817;
}

}  // namespace tubal
