#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "tubal/volume.hpp"

namespace tubal {

/// Planar dipping reflector: depth (meters) at trace (0,0) plus linear
/// gradients per inline/crossline step. Depths map to samples 1:1.
struct ReflectorSpec {
  double depth_at_origin = 0;
  double dip_inline = 0;     // meters per inline trace
  double dip_crossline = 0;  // meters per crossline trace
  double amplitude = 1.0;
};

struct WaveletSpec {
  double central_frequency = 60.0;  // Hz
  double sample_interval = 0.001;   // seconds
  Index half_length = 64;           // samples on each side of the peak

  void validate() const {
    if (!(central_frequency > 0)) throw config_error("WaveletSpec: frequency must be positive");
    if (!(sample_interval > 0)) throw config_error("WaveletSpec: sample interval must be positive");
    if (half_length < 0) throw config_error("WaveletSpec: negative half length");
    if (!(central_frequency < 0.5 / sample_interval))
      throw config_error("WaveletSpec: central frequency violates the Nyquist limit");
  }
};

/// Peak-normalized Ricker wavelet (1 - 2 pi^2 f0^2 t^2) exp(-pi^2 f0^2 t^2)
/// sampled at t = -half_length*dt .. +half_length*dt.
inline std::vector<double> ricker(const WaveletSpec& w) {
  w.validate();
  std::vector<double> out(std::size_t(2 * w.half_length + 1));
  const double pf = std::numbers::pi * w.central_frequency;
  for (Index i = 0; i <= 2 * w.half_length; ++i) {
    const double t = double(i - w.half_length) * w.sample_interval;
    const double a = pf * pf * t * t;
    out[std::size_t(i)] = (1.0 - 2.0 * a) * std::exp(-a);
  }
  return out;
}

/// Spike reflectivity on dipping planes convolved per trace with the Ricker
/// wavelet ('same' alignment). Spike amplitude is split linearly between the
/// two samples bracketing the exact plane depth.
inline Volume make_model(Index n1, Index n2, Index n3, double dt,
                         const std::vector<ReflectorSpec>& reflectors, const WaveletSpec& w) {
  Volume refl(n1, n2, n3, dt);
  for (const ReflectorSpec& r : reflectors) {
    bool hit = false;
    for (Index i3 = 0; i3 < n3; ++i3)
      for (Index i2 = 0; i2 < n2; ++i2) {
        const double depth = r.depth_at_origin + r.dip_inline * double(i2) +
                             r.dip_crossline * double(i3);
        const Index s = Index(std::floor(depth));
        const double frac = depth - double(s);
        if (s >= 0 && s < n1) {
          refl(s, i2, i3) += r.amplitude * (1.0 - frac);
          hit = true;
        }
        if (s + 1 >= 0 && s + 1 < n1 && frac > 0) {
          refl(s + 1, i2, i3) += r.amplitude * frac;
          hit = true;
        }
      }
    if (!hit) throw config_error("make_model: reflector lies entirely outside the volume");
  }

  const std::vector<double> wav = ricker(w);
  Volume out(n1, n2, n3, dt);
  for (Index i3 = 0; i3 < n3; ++i3)
    for (Index i2 = 0; i2 < n2; ++i2)
      for (Index t = 0; t < n1; ++t) {
        double acc = 0;
        const Index lo = std::max<Index>(0, t - w.half_length);
        const Index hi = std::min<Index>(n1 - 1, t + w.half_length);
        for (Index s = lo; s <= hi; ++s)
          acc += refl(s, i2, i3) * wav[std::size_t(w.half_length + (t - s))];
        out(t, i2, i3) = acc;
      }
  return out;
}

/// Fixed synthetic benchmark: 1200 x 32 x 32 volume, 60 Hz wavelet at 1 ms,
/// two dipping planar reflectors near 300 m and 900 m, white noise injected
/// at the requested SNR (default matches the reference operating point).
inline std::pair<Volume, Volume> make_benchmark(std::uint64_t seed,
                                                double target_snr_db = 0.14) {
  WaveletSpec w;
  w.central_frequency = 60.0;
  w.sample_interval = 0.001;
  w.half_length = 64;
  std::vector<ReflectorSpec> reflectors = {
      {300.0, 1.5, 1.0, 1.0},
      {900.0, -2.0, 1.2, -0.8},
  };
  Volume clean = make_model(1200, 32, 32, w.sample_interval, reflectors, w);
  Volume noisy = add_noise(clean, target_snr_db, seed);
  return {std::move(clean), std::move(noisy)};
}

}  // namespace tubal
