#pragma once
#include "tubal/fft.hpp"
#include "tubal/tensor3.hpp"

namespace tubal {

namespace detail {
inline void check_tprod_shapes(const Tensor3& a, const Tensor3& b) {
  if (a.n != b.m || a.k != b.k)
    throw shape_error("tprod: shapes do not conform (" + a.shape_str() + " * " + b.shape_str() +
                      ")");
}
}  // namespace detail

/// t-product A * B: every output tube is the sum over the inner index of
/// circular convolutions of input tubes. Computed in the spectral domain as
/// one complex matrix product per stored frontal slice.
inline Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  detail::check_tprod_shapes(a, b);
  HalfSpectrum ah = rdft3(a);
  HalfSpectrum bh = rdft3(b);
  HalfSpectrum ch(a.m, b.n, a.k);
  for (Index l = 0; l < ch.ks; ++l) ch.slice(l) = ah.slice(l) * bh.slice(l);
  return irdft3(ch);
}

/// Brute-force t-product by direct circular convolution. Desk-scale oracle
/// for the spectral path; not for production use.
inline Tensor3 tprod_naive(const Tensor3& a, const Tensor3& b) {
  detail::check_tprod_shapes(a, b);
  const Index k = a.k;
  Tensor3 out(a.m, b.n, k);
  for (Index i = 0; i < a.m; ++i)
    for (Index j = 0; j < b.n; ++j)
      for (Index t = 0; t < k; ++t) {
        double s = 0;
        for (Index q = 0; q < a.n; ++q)
          for (Index u = 0; u < k; ++u) s += a(i, q, u) * b(q, j, (t - u + k) % k);
        out(i, j, t) = s;
      }
  return out;
}

}  // namespace tubal
