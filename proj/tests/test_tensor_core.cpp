#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tubal/fft.hpp"
#include "tubal/tprod.hpp"

using namespace tubal;

TEST_CASE("tprod with k=1 reduces to the matrix product") {
  Tensor3 a(2, 2, 1), b(2, 1, 1);
  a(0, 0, 0) = 1; a(0, 1, 0) = 2; a(1, 0, 0) = 3; a(1, 1, 0) = 4;
  b(0, 0, 0) = 1; b(1, 0, 0) = 0;
  const Tensor3 c = tprod(a, b);
  CHECK(c.m == 2); CHECK(c.n == 1); CHECK(c.k == 1);
  CHECK_THAT(c(0, 0, 0), Catch::Matchers::WithinAbs(1.0, 1e-14));
  CHECK_THAT(c(1, 0, 0), Catch::Matchers::WithinAbs(3.0, 1e-14));
}

TEST_CASE("identity tensor is the t-product unit") {
  Rng rng(7);
  const Tensor3 a = oracles::random_tensor(3, 4, 5, rng);
  const Tensor3 e = identity_tensor(4, 5);
  CHECK(oracles::rel_err(tprod(a, e), a) < 1e-14);
  const Tensor3 e2 = identity_tensor(3, 5);
  CHECK(oracles::rel_err(tprod(e2, a), a) < 1e-14);
}

TEST_CASE("spectral tprod matches the circular-convolution oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 1 + Index(rng.bits() % 6), n = 1 + Index(rng.bits() % 6);
    const Index r = 1 + Index(rng.bits() % 6), k = 1 + Index(rng.bits() % 6);
    const Tensor3 a = oracles::random_tensor(m, r, k, rng);
    const Tensor3 b = oracles::random_tensor(r, n, k, rng);
    CHECK(oracles::rel_err(tprod(a, b), tprod_naive(a, b)) <= 1e-10);
  }
}

TEST_CASE("tprod rejects nonconforming shapes, naming both") {
  const Tensor3 a(2, 3, 4), b(5, 3, 4);
  CHECK_THROWS_MATCHES(tprod(a, b), shape_error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("2x3x4") &&
                           Catch::Matchers::ContainsSubstring("5x3x4")));
  const Tensor3 c(3, 2, 5);
  CHECK_THROWS_AS(tprod(a, c), shape_error);
}

TEST_CASE("tprod is bilinear and associative on small instances") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 1 + Index(rng.bits() % 4), r = 1 + Index(rng.bits() % 4);
    const Index n = 1 + Index(rng.bits() % 4), q = 1 + Index(rng.bits() % 4);
    const Index k = 1 + Index(rng.bits() % 5);
    const Tensor3 a = oracles::random_tensor(m, r, k, rng);
    const Tensor3 b = oracles::random_tensor(r, q, k, rng);
    const Tensor3 b2 = oracles::random_tensor(r, q, k, rng);
    const Tensor3 c = oracles::random_tensor(q, n, k, rng);

    const Tensor3 left = tprod(tprod(a, b), c);
    const Tensor3 right = tprod(a, tprod(b, c));
    CHECK(oracles::rel_err(left, right) <= 1e-10);

    Tensor3 bsum = b;
    for (std::size_t i = 0; i < bsum.data.size(); ++i) bsum.data[i] += 2.5 * b2.data[i];
    Tensor3 want = tprod(a, b);
    const Tensor3 ab2 = tprod(a, b2);
    for (std::size_t i = 0; i < want.data.size(); ++i) want.data[i] += 2.5 * ab2.data[i];
    CHECK(oracles::rel_err(tprod(a, bsum), want) <= 1e-10);
  }
}

TEST_CASE("ttranspose: k=1 transpose, involution, product reversal") {
  Rng rng(17);
  Tensor3 a1 = oracles::random_tensor(3, 2, 1, rng);
  const Tensor3 t1 = ttranspose(a1);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) CHECK(t1(j, i, 0) == a1(i, j, 0));

  const Tensor3 a = oracles::random_tensor(3, 4, 5, rng);
  CHECK(oracles::rel_err(ttranspose(ttranspose(a)), a) == 0.0);

  const Tensor3 b = oracles::random_tensor(4, 2, 5, rng);
  const Tensor3 lhs = ttranspose(tprod_naive(a, b));
  const Tensor3 rhs = tprod_naive(ttranspose(b), ttranspose(a));
  CHECK(oracles::rel_err(lhs, rhs) <= 1e-10);
}

TEST_CASE("ttranspose spectral identity: slice-wise conjugate transpose") {
  Rng rng(19);
  const Tensor3 a = oracles::random_tensor(3, 4, 6, rng);
  const SpectralTensor ah = dft3(a);
  const SpectralTensor th = dft3(ttranspose(a));
  for (Index l = 0; l < a.k; ++l) {
    const Eigen::MatrixXcd want = ah.slice(l).adjoint();
    CHECK((th.slice(l) - want).norm() <= 1e-10 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("dft3 matches the direct DFT summation oracle") {
  Tensor3 z(2, 3, 4);
  const SpectralTensor zh = dft3(z);
  for (const Cplx& v : zh.data) CHECK(std::abs(v) == 0.0);

  Tensor3 ones(1, 1, 8);
  for (double& v : ones.data) v = 1.0;
  const SpectralTensor oh = dft3(ones);
  CHECK_THAT(oh(0, 0, 0).real(), Catch::Matchers::WithinAbs(8.0, 1e-12));
  for (Index l = 1; l < 8; ++l) CHECK(std::abs(oh(0, 0, l)) < 1e-12);

  Rng rng(23);
  const Tensor3 a = oracles::random_tensor(3, 4, 5, rng);
  const SpectralTensor got = dft3(a);
  const SpectralTensor want = oracles::naive_dft3(a);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < got.data.size(); ++i) {
    num += std::norm(got.data[i] - want.data[i]);
    den += std::norm(want.data[i]);
  }
  CHECK(std::sqrt(num / den) <= 1e-12);
}

TEST_CASE("idft3 inverts dft3 and screens non-symmetric spectra") {
  Rng rng(29);
  const Tensor3 a = oracles::random_tensor(4, 3, 6, rng);
  CHECK(oracles::rel_err(idft3(dft3(a)), a) <= 1e-12);

  SpectralTensor z(2, 2, 3);
  const Tensor3 zi = idft3(z);
  for (double v : zi.data) CHECK(v == 0.0);

  // explicitly conjugate-symmetric random spectrum -> exactly real output
  SpectralTensor s(2, 2, 5);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) {
      s(i, j, 0) = Cplx(rng.gaussian(), 0);
      for (Index l = 1; l <= 2; ++l) {
        const Cplx v(rng.gaussian(), rng.gaussian());
        s(i, j, l) = v;
        s(i, j, 5 - l) = std::conj(v);
      }
    }
  CHECK_NOTHROW(idft3(s));

  SpectralTensor bad(2, 2, 4);
  bad(0, 0, 1) = Cplx(0, 1);  // breaks conjugate symmetry
  CHECK_THROWS_AS(idft3(bad), numeric_error);
}

TEST_CASE("half-spectrum round trip and mirror") {
  Rng rng(31);
  for (Index k : {1, 2, 5, 8}) {
    const Tensor3 a = oracles::random_tensor(3, 2, k, rng);
    CHECK(oracles::rel_err(irdft3(rdft3(a)), a) <= 1e-12);
    const SpectralTensor full = dft3(a);
    const SpectralTensor mirrored = mirror_full(rdft3(a));
    double diff = 0;
    for (std::size_t i = 0; i < full.data.size(); ++i)
      diff += std::norm(full.data[i] - mirrored.data[i]);
    CHECK(std::sqrt(diff) <= 1e-10 * std::max(1.0, fro_norm(a)));
  }
}

TEST_CASE("norms match direct summation") {
  Tensor3 z(2, 2, 2);
  CHECK(fro_norm(z) == 0.0);
  CHECK(l1_norm(z) == 0.0);
  z(1, 0, 1) = 3.0;
  CHECK(fro_norm(z) == 3.0);

  Tensor3 s(1, 3, 1);
  s(0, 0, 0) = 1; s(0, 1, 0) = -2; s(0, 2, 0) = 3;
  CHECK(l1_norm(s) == 6.0);

  Rng rng(37);
  const Tensor3 a = oracles::random_tensor(3, 4, 5, rng);
  double f2 = 0, l1 = 0;
  for (double v : a.data) {
    f2 += v * v;
    l1 += std::abs(v);
  }
  CHECK_THAT(fro_norm(a), Catch::Matchers::WithinRel(std::sqrt(f2), 1e-14));
  CHECK_THAT(l1_norm(a), Catch::Matchers::WithinRel(l1, 1e-14));
}

TEST_CASE("lateral slice norms") {
  Tensor3 d(3, 2, 4);
  d(1, 0, 2) = 1.0;  // unit impulse atom
  Eigen::VectorXd nrm = lateral_slice_norms(d);
  CHECK_THAT(nrm[0], Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK(nrm[1] == 0.0);

  Rng rng(41);
  const Tensor3 r = oracles::random_tensor(3, 4, 5, rng);
  nrm = lateral_slice_norms(r);
  for (Index j = 0; j < 4; ++j) {
    double s = 0;
    for (Index l = 0; l < 5; ++l)
      for (Index i = 0; i < 3; ++i) s += r(i, j, l) * r(i, j, l);
    CHECK_THAT(nrm[j], Catch::Matchers::WithinRel(std::sqrt(s), 1e-13));
  }
}

TEST_CASE("Parseval scale: k * fro^2 equals spectral energy") {
  Rng rng(43);
  for (Index k : {1, 3, 4, 7}) {
    const Tensor3 a = oracles::random_tensor(2, 3, k, rng);
    const SpectralTensor ah = dft3(a);
    double spec = 0;
    for (const Cplx& v : ah.data) spec += std::norm(v);
    const double sig = fro_norm(a);
    CHECK_THAT(spec, Catch::Matchers::WithinRel(sig * sig * double(k), 1e-10));
  }
}

TEST_CASE("construction from external data validates finiteness") {
  CHECK_THROWS_AS(Tensor3::from_data(1, 1, 2, {1.0, std::nan("")}), numeric_error);
  CHECK_THROWS_AS(Tensor3::from_data(2, 1, 2, {1.0, 2.0}), shape_error);
  const Tensor3 t = Tensor3::from_data(1, 1, 2, {1.0, -2.0});
  CHECK(t(0, 0, 1) == -2.0);
}
