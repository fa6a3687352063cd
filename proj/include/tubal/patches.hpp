#pragma once
#include <string>
#include <vector>

#include "tubal/tensor3.hpp"
#include "tubal/volume.hpp"

namespace tubal {

/// Bidirectional mapping between volume coordinates and patch columns.
///
/// Anchors along each axis run 0, s, 2s, ...; when the last aligned anchor
/// does not reach dim - p a clamped tail anchor at dim - p is appended, so
/// every voxel is covered as long as strides do not exceed patch dims.
/// Patch enumeration order: axis-1 anchors fastest, then axis 2, then axis 3.
/// A patch becomes one lateral column of the training tensor: mode 1 keeps
/// the time axis (m = p1), the tube axis flattens the spatial footprint
/// (k = p2 * p3, axis-2 offset fastest), mode 2 indexes patches.
struct PatchGrid {
  Index p1 = 0, p2 = 0, p3 = 0;
  Index s1 = 0, s2 = 0, s3 = 0;
  Index o1 = 0, o2 = 0, o3 = 0;  // origin offsets; covering grids use 0
  std::vector<Index> a1, a2, a3;  // anchor coordinates per axis

  static std::vector<Index> axis_anchors(Index dim, Index p, Index s, Index o,
                                         const char* axis) {
    if (p <= 0 || s <= 0) throw config_error(std::string("PatchGrid: nonpositive ") + axis +
                                             " patch or stride");
    if (p > dim)
      throw config_error(std::string("PatchGrid: patch exceeds volume along ") + axis);
    if (s > p)
      throw config_error(std::string("PatchGrid: stride exceeds patch along ") + axis +
                         ", grid would not cover the volume");
    if (o != 0) throw config_error("PatchGrid: nonzero origin offsets do not cover the volume");
    std::vector<Index> anchors;
    for (Index a = 0;; a += s) {
      if (a >= dim - p) {
        anchors.push_back(dim - p);
        break;
      }
      anchors.push_back(a);
    }
    return anchors;
  }

  static PatchGrid cover(Index n1, Index n2, Index n3, Index p1, Index p2, Index p3, Index s1,
                         Index s2, Index s3) {
    PatchGrid g;
    g.p1 = p1; g.p2 = p2; g.p3 = p3;
    g.s1 = s1; g.s2 = s2; g.s3 = s3;
    g.a1 = axis_anchors(n1, p1, s1, 0, "axis 1");
    g.a2 = axis_anchors(n2, p2, s2, 0, "axis 2");
    g.a3 = axis_anchors(n3, p3, s3, 0, "axis 3");
    return g;
  }

  Index count() const { return Index(a1.size()) * Index(a2.size()) * Index(a3.size()); }
  Index tube_len() const { return p2 * p3; }

  bool covers(const Volume& v) const {
    return !a1.empty() && a1.front() == 0 && a1.back() == v.n1 - p1 && !a2.empty() &&
           a2.front() == 0 && a2.back() == v.n2 - p2 && !a3.empty() && a3.front() == 0 &&
           a3.back() == v.n3 - p3;
  }

  void anchor(Index j, Index& i1, Index& i2, Index& i3) const {
    const Index c1 = Index(a1.size()), c2 = Index(a2.size());
    i1 = a1[std::size_t(j % c1)];
    i2 = a2[std::size_t((j / c1) % c2)];
    i3 = a3[std::size_t(j / (c1 * c2))];
  }
};

/// Patch stack of a volume: Tensor3 of shape p1 x count x (p2*p3).
inline Tensor3 extract_patches(const Volume& v, const PatchGrid& g) {
  if (!g.covers(v))
    throw config_error("extract_patches: grid does not cover the volume " + v.shape_str());
  Tensor3 out(g.p1, g.count(), g.tube_len());
  for (Index j = 0; j < out.n; ++j) {
    Index b1, b2, b3;
    g.anchor(j, b1, b2, b3);
    for (Index u3 = 0; u3 < g.p3; ++u3)
      for (Index u2 = 0; u2 < g.p2; ++u2) {
        const Index lag = u2 + g.p2 * u3;
        for (Index t = 0; t < g.p1; ++t) out(t, j, lag) = v(b1 + t, b2 + u2, b3 + u3);
      }
  }
  return out;
}

/// Reassemble a volume from a patch stack by uniform overlap averaging:
/// every voxel is the arithmetic mean of all patch copies covering it.
inline Volume reconstruct(const Tensor3& patches, const PatchGrid& g, Index n1, Index n2,
                          Index n3) {
  if (patches.m != g.p1 || patches.n != g.count() || patches.k != g.tube_len())
    throw shape_error("reconstruct: patch stack " + patches.shape_str() +
                      " does not match the grid");
  Volume out(n1, n2, n3);
  std::vector<std::uint32_t> hits(out.data.size(), 0);
  for (Index j = 0; j < patches.n; ++j) {
    Index b1, b2, b3;
    g.anchor(j, b1, b2, b3);
    for (Index u3 = 0; u3 < g.p3; ++u3)
      for (Index u2 = 0; u2 < g.p2; ++u2) {
        const Index lag = u2 + g.p2 * u3;
        for (Index t = 0; t < g.p1; ++t) {
          const std::size_t at = std::size_t(b1 + t + n1 * (b2 + u2 + n2 * (b3 + u3)));
          out.data[at] += patches(t, j, lag);
          ++hits[at];
        }
      }
  }
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    if (hits[i] == 0) throw shape_error("reconstruct: grid leaves voxels uncovered");
    out.data[i] /= double(hits[i]);
  }
  return out;
}

}  // namespace tubal
