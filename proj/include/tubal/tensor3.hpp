#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tubal/errors.hpp"

namespace tubal {

using Index = Eigen::Index;
using Cplx = std::complex<double>;

using MatMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using CMatMap = Eigen::Map<Eigen::MatrixXcd>;
using ConstCMatMap = Eigen::Map<const Eigen::MatrixXcd>;

namespace detail {
inline std::string dims_str(Index m, Index n, Index k) {
  std::ostringstream os;
  os << m << "x" << n << "x" << k;
  return os.str();
}
}  // namespace detail

/// Dense real third-order tensor of shape m x n x k.
///
/// Storage order is fixed: mode 1 fastest, then mode 2, then mode 3, so
/// entry (i,j,l) lives at data[i + m*j + m*n*l] and every frontal slice
/// is one contiguous column-major m x n block. Tubes (i,j,:) are strided
/// by m*n. This is also the on-disk payload order.
struct Tensor3 {
  Index m = 0, n = 0, k = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(Index m_, Index n_, Index k_) : m(m_), n(n_), k(k_) {
    if (m <= 0 || n <= 0 || k <= 0)
      throw shape_error("Tensor3: dimensions must be positive, got " + shape_str());
    data.assign(static_cast<std::size_t>(m * n * k), 0.0);
  }

  // Construction from external input validates the all-finite invariant.
  static Tensor3 from_data(Index m, Index n, Index k, std::vector<double> values) {
    Tensor3 t(m, n, k);
    if (values.size() != t.data.size())
      throw shape_error("Tensor3: data length " + std::to_string(values.size()) +
                        " does not match dims " + t.shape_str());
    for (double v : values)
      if (!std::isfinite(v)) throw numeric_error("Tensor3: non-finite entry in input data");
    t.data = std::move(values);
    return t;
  }

  Index size() const { return m * n * k; }
  std::string shape_str() const { return detail::dims_str(m, n, k); }
  bool same_shape(const Tensor3& o) const { return m == o.m && n == o.n && k == o.k; }

  double& operator()(Index i, Index j, Index l) { return data[std::size_t(i + m * (j + n * l))]; }
  double operator()(Index i, Index j, Index l) const {
    return data[std::size_t(i + m * (j + n * l))];
  }

  MatMap slice(Index l) { return MatMap(data.data() + m * n * l, m, n); }
  ConstMatMap slice(Index l) const { return ConstMatMap(data.data() + m * n * l, m, n); }
};

/// Complex tensor holding the mode-3 DFT of a Tensor3; frontal slice l is
/// the l-th DFT coefficient of every tube. Same storage order as Tensor3.
struct SpectralTensor {
  Index m = 0, n = 0, k = 0;
  std::vector<Cplx> data;

  SpectralTensor() = default;
  SpectralTensor(Index m_, Index n_, Index k_) : m(m_), n(n_), k(k_) {
    if (m <= 0 || n <= 0 || k <= 0)
      throw shape_error("SpectralTensor: dimensions must be positive");
    data.assign(static_cast<std::size_t>(m * n * k), Cplx(0, 0));
  }

  Index size() const { return m * n * k; }
  std::string shape_str() const { return detail::dims_str(m, n, k); }

  Cplx& operator()(Index i, Index j, Index l) { return data[std::size_t(i + m * (j + n * l))]; }
  Cplx operator()(Index i, Index j, Index l) const {
    return data[std::size_t(i + m * (j + n * l))];
  }

  CMatMap slice(Index l) { return CMatMap(data.data() + m * n * l, m, n); }
  ConstCMatMap slice(Index l) const { return ConstCMatMap(data.data() + m * n * l, m, n); }
};

inline double fro_norm(const Tensor3& a) {
  double s = 0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

inline double l1_norm(const Tensor3& a) {
  double s = 0;
  for (double v : a.data) s += std::abs(v);
  return s;
}

/// Frobenius norm of every lateral slice D(:,j,:); entry j is the energy
/// of atom j when D is a dictionary.
inline Eigen::VectorXd lateral_slice_norms(const Tensor3& d) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d.n);
  for (Index l = 0; l < d.k; ++l)
    for (Index j = 0; j < d.n; ++j) {
      double s = 0;
      for (Index i = 0; i < d.m; ++i) {
        double v = d(i, j, l);
        s += v * v;
      }
      out[j] += s;
    }
  return out.array().sqrt();
}

/// Tensor transpose: slice 0 transposed, slices 1..k-1 transposed and
/// reversed, so the mode-3 DFT of the result is the slice-wise conjugate
/// transpose of the mode-3 DFT of the input.
inline Tensor3 ttranspose(const Tensor3& a) {
  Tensor3 out(a.n, a.m, a.k);
  out.slice(0) = a.slice(0).transpose();
  for (Index l = 1; l < a.k; ++l) out.slice(l) = a.slice(a.k - l).transpose();
  return out;
}

/// Identity element of the t-product: first frontal slice is I_r, the rest zero.
inline Tensor3 identity_tensor(Index r, Index k) {
  Tensor3 e(r, r, k);
  e.slice(0).setIdentity();
  return e;
}

}  // namespace tubal
