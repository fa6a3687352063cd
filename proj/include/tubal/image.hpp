#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tubal/volume.hpp"
#include "tubal/volume_io.hpp"

namespace tubal {

struct GrayImage {
  Index rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

namespace detail {
inline double median_of(std::vector<double>& v) {
  auto mid = v.begin() + std::ptrdiff_t(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}
}  // namespace detail

/// Render a 2D slice with robust amplitude scaling: values are clipped at
/// +-3 robust standard deviations around the median and mapped linearly to
/// 0..255. A constant slice renders uniform mid-gray.
///
/// axis 1 fixes i1 (rows = n2, cols = n3); axis 2 fixes i2 (rows = n1,
/// cols = n3); axis 3 fixes i3 (rows = n1, cols = n2).
inline GrayImage render_slice(const Volume& v, int axis, Index index) {
  if (axis < 1 || axis > 3) throw config_error("render_slice: axis must be 1, 2 or 3");
  const Index lim = axis == 1 ? v.n1 : axis == 2 ? v.n2 : v.n3;
  if (index < 0 || index >= lim)
    throw config_error("render_slice: index " + std::to_string(index) +
                       " out of range for axis " + std::to_string(axis) + " (size " +
                       std::to_string(lim) + ")");
  GrayImage img;
  img.rows = axis == 1 ? v.n2 : v.n1;
  img.cols = axis == 3 ? v.n2 : v.n3;

  std::vector<double> vals(std::size_t(img.rows * img.cols));
  for (Index r = 0; r < img.rows; ++r)
    for (Index c = 0; c < img.cols; ++c) {
      double val = 0;
      switch (axis) {
        case 1: val = v(index, r, c); break;
        case 2: val = v(r, index, c); break;
        default: val = v(r, c, index); break;
      }
      vals[std::size_t(r * img.cols + c)] = val;
    }

  std::vector<double> tmp = vals;
  const double med = detail::median_of(tmp);
  for (double& t : tmp) t = std::abs(t - med);
  const double sigma = 1.4826022185056018 * detail::median_of(tmp);

  img.pixels.resize(vals.size());
  if (sigma == 0) {
    std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t(128));
    return img;
  }
  const double scale = 127.5 / (3.0 * sigma);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double g = std::clamp(127.5 + scale * (vals[i] - med), 0.0, 255.0);
    img.pixels[i] = std::uint8_t(std::lround(g) > 255 ? 255 : std::lround(g));
  }
  return img;
}

inline void write_pgm(std::ostream& os, const GrayImage& img) {
  os << "P5\n" << img.cols << " " << img.rows << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()),
           std::streamsize(img.pixels.size()));
  if (!os) throw io_error("pgm write: stream failure");
}

inline void save_pgm(const std::string& path, const GrayImage& img) {
  write_file_atomic(path, [&](std::ostream& os) { write_pgm(os, img); });
}

}  // namespace tubal
