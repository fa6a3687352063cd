#pragma once
#include <fftw3.h>

#include <algorithm>
#include <cfloat>
#include <complex>
#include <vector>

#include "tubal/tensor3.hpp"

namespace tubal {

namespace detail {

// One rank-1 batched transform over every tube of an m x n x k block.
// Tubes are strided by m*n and consecutive tubes are offset by 1, so a
// single plan covers the whole tensor.
inline void fft_mode3_c2c_inplace(Cplx* p, Index m, Index n, Index k, int sign) {
  int nk = static_cast<int>(k);
  auto* fp = reinterpret_cast<fftw_complex*>(p);
  fftw_plan plan = fftw_plan_many_dft(1, &nk, static_cast<int>(m * n), fp, nullptr,
                                      static_cast<int>(m * n), 1, fp, nullptr,
                                      static_cast<int>(m * n), 1, sign, FFTW_ESTIMATE);
  if (!plan) throw numeric_error("fft: plan creation failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

inline void fft_mode3_r2c(const double* in, Cplx* out, Index m, Index n, Index k) {
  int nk = static_cast<int>(k);
  fftw_plan plan = fftw_plan_many_dft_r2c(
      1, &nk, static_cast<int>(m * n), const_cast<double*>(in), nullptr,
      static_cast<int>(m * n), 1, reinterpret_cast<fftw_complex*>(out), nullptr,
      static_cast<int>(m * n), 1, FFTW_ESTIMATE);
  if (!plan) throw numeric_error("fft: plan creation failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

// c2r overwrites its input; callers pass a scratch copy.
inline void fft_mode3_c2r(Cplx* in, double* out, Index m, Index n, Index k) {
  int nk = static_cast<int>(k);
  fftw_plan plan = fftw_plan_many_dft_c2r(
      1, &nk, static_cast<int>(m * n), reinterpret_cast<fftw_complex*>(in), nullptr,
      static_cast<int>(m * n), 1, out, nullptr, static_cast<int>(m * n), 1, FFTW_ESTIMATE);
  if (!plan) throw numeric_error("fft: plan creation failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace detail

/// Unnormalized forward DFT along mode 3 of every tube.
inline SpectralTensor dft3(const Tensor3& a) {
  SpectralTensor out(a.m, a.n, a.k);
  for (Index i = 0; i < a.size(); ++i) out.data[std::size_t(i)] = Cplx(a.data[std::size_t(i)], 0);
  detail::fft_mode3_c2c_inplace(out.data.data(), a.m, a.n, a.k, FFTW_FORWARD);
  return out;
}

/// Inverse of dft3 (1/k normalization). The imaginary residue left after
/// normalization must be negligible relative to the output energy; a larger
/// residue means the spectral tensor lost its conjugate symmetry.
inline Tensor3 idft3(const SpectralTensor& a, double residue_tol = 1e-9) {
  std::vector<Cplx> buf = a.data;
  detail::fft_mode3_c2c_inplace(buf.data(), a.m, a.n, a.k, FFTW_BACKWARD);
  const double scale = 1.0 / double(a.k);
  double re2 = 0, im2 = 0;
  Tensor3 out(a.m, a.n, a.k);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const Cplx v = buf[i] * scale;
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
    out.data[i] = v.real();
  }
  const double denom = std::sqrt(re2 + im2);
  if (denom > 0 && std::sqrt(im2) > residue_tol * denom)
    throw numeric_error("idft3: imaginary residue exceeds tolerance; spectral tensor is not "
                        "conjugate-symmetric");
  return out;
}

/// Half spectrum of a real tensor: slices 0..floor(k/2). Slice l of the full
/// spectrum for l > k/2 is the elementwise conjugate of slice k-l and is not
/// stored. weight(l) is the multiplicity of stored slice l in sums over the
/// full spectrum.
struct HalfSpectrum {
  Index m = 0, n = 0, k = 0;
  Index ks = 0;  // stored slices = k/2 + 1
  std::vector<Cplx> data;

  HalfSpectrum() = default;
  HalfSpectrum(Index m_, Index n_, Index k_) : m(m_), n(n_), k(k_), ks(k_ / 2 + 1) {
    data.assign(static_cast<std::size_t>(m * n * ks), Cplx(0, 0));
  }

  CMatMap slice(Index l) { return CMatMap(data.data() + m * n * l, m, n); }
  ConstCMatMap slice(Index l) const { return ConstCMatMap(data.data() + m * n * l, m, n); }

  bool self_conjugate(Index l) const { return l == 0 || 2 * l == k; }
  double weight(Index l) const { return self_conjugate(l) ? 1.0 : 2.0; }
};

inline HalfSpectrum rdft3(const Tensor3& a) {
  HalfSpectrum out(a.m, a.n, a.k);
  detail::fft_mode3_r2c(a.data.data(), out.data.data(), a.m, a.n, a.k);
  return out;
}

/// Inverse of rdft3; conjugate symmetry is enforced structurally by the
/// half-spectrum representation, so the output is real by construction.
inline Tensor3 irdft3(const HalfSpectrum& a) {
  std::vector<Cplx> buf = a.data;
  Tensor3 out(a.m, a.n, a.k);
  detail::fft_mode3_c2r(buf.data(), out.data.data(), a.m, a.n, a.k);
  const double scale = 1.0 / double(a.k);
  for (double& v : out.data) v *= scale;
  return out;
}

/// Expand a half spectrum into the full conjugate-symmetric spectrum.
inline SpectralTensor mirror_full(const HalfSpectrum& h) {
  SpectralTensor out(h.m, h.n, h.k);
  for (Index l = 0; l < h.ks; ++l) out.slice(l) = h.slice(l);
  for (Index l = h.ks; l < h.k; ++l) out.slice(l) = h.slice(h.k - l).conjugate();
  return out;
}

}  // namespace tubal
