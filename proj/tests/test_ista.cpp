#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tubal/ista.hpp"

using namespace tubal;

namespace {

SolverConfig small_cfg(double beta) {
  SolverConfig cfg;
  cfg.beta = beta;
  cfg.max_inner = 500;
  cfg.tol_obj = 1e-14;
  return cfg;
}

double objective_naive(const Tensor3& y, const Tensor3& d, const Tensor3& x, double beta) {
  const Tensor3 fit = tprod_naive(d, x);
  double s = 0;
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    const double e = y.data[i] - fit.data[i];
    s += e * e;
  }
  return 0.5 * s + beta * l1_norm(x);
}

}  // namespace

TEST_CASE("soft threshold: definition values, tau=0 identity, grid-search prox") {
  Tensor3 a(1, 2, 1);
  a(0, 0, 0) = 2.0;
  a(0, 1, 0) = -0.3;
  const Tensor3 s = soft_threshold(a, 0.5);
  CHECK_THAT(s(0, 0, 0), Catch::Matchers::WithinAbs(1.5, 1e-15));
  CHECK(s(0, 1, 0) == 0.0);

  Rng rng(3);
  const Tensor3 r = oracles::random_tensor(2, 3, 4, rng);
  CHECK(oracles::rel_err(soft_threshold(r, 0.0), r) == 0.0);

  CHECK_THROWS_AS(soft_threshold(r, -1e-12), config_error);

  // prox property: entrywise argmin of 0.5 (x-a)^2 + tau |x| by dense scan
  const double tau = 0.7;
  const Tensor3 p = soft_threshold(r, tau);
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    const double a0 = r.data[i];
    double best_x = 0, best_v = std::numeric_limits<double>::infinity();
    for (double x = -4.0; x <= 4.0; x += 1e-4) {
      const double v = 0.5 * (x - a0) * (x - a0) + tau * std::abs(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    CHECK_THAT(p.data[i], Catch::Matchers::WithinAbs(best_x, 2e-4));
  }
}

TEST_CASE("smooth gradient: zero residual, k=1 matrix formula, finite differences") {
  Rng rng(5);
  const Tensor3 d = oracles::random_tensor(3, 4, 2, rng);
  const Tensor3 c = oracles::random_tensor(4, 2, 2, rng);
  const Tensor3 y = tprod(d, c);
  const Tensor3 g0 = smooth_gradient(d, y, c);
  CHECK(fro_norm(g0) < 1e-12 * fro_norm(y));

  // k=1: matrix algebra D^T (D C - Y)
  const Tensor3 d1 = oracles::random_tensor(3, 2, 1, rng);
  const Tensor3 c1 = oracles::random_tensor(2, 4, 1, rng);
  const Tensor3 y1 = oracles::random_tensor(3, 4, 1, rng);
  const Tensor3 g1 = smooth_gradient(d1, y1, c1);
  Eigen::MatrixXd dm = d1.slice(0), cm = c1.slice(0), ym = y1.slice(0);
  const Eigen::MatrixXd want = dm.transpose() * (dm * cm - ym);
  CHECK((Eigen::MatrixXd(g1.slice(0)) - want).norm() <= 1e-12 * want.norm());

  CHECK_THROWS_AS(smooth_gradient(d, y, oracles::random_tensor(3, 2, 2, rng)), shape_error);

  // central finite differences of f(C) = 0.5 ||Y - D*C||^2
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = 2 + Index(rng.bits() % 2), r = 2 + Index(rng.bits() % 2);
    const Index n = 2 + Index(rng.bits() % 2), k = 1 + Index(rng.bits() % 3);
    const Tensor3 dd = oracles::random_tensor(m, r, k, rng);
    const Tensor3 yy = oracles::random_tensor(m, n, k, rng);
    Tensor3 cc = oracles::random_tensor(r, n, k, rng);
    const Tensor3 g = smooth_gradient(dd, yy, cc);
    auto f = [&](const Tensor3& point) {
      const Tensor3 fit = tprod_naive(dd, point);
      double s = 0;
      for (std::size_t i = 0; i < fit.data.size(); ++i) {
        const double e = yy.data[i] - fit.data[i];
        s += e * e;
      }
      return 0.5 * s;
    };
    Tensor3 fd(r, n, k);
    for (std::size_t i = 0; i < cc.data.size(); ++i) {
      const double h = 6e-6 * std::max(1.0, std::abs(cc.data[i]));
      const double keep = cc.data[i];
      cc.data[i] = keep + h;
      const double fp = f(cc);
      cc.data[i] = keep - h;
      const double fm = f(cc);
      cc.data[i] = keep;
      fd.data[i] = (fp - fm) / (2 * h);
    }
    CHECK(oracles::rel_err(g, fd) <= 1e-6);
  }
}

TEST_CASE("lipschitz bound: impulse atom, homogeneity, spectral oracle") {
  for (Index k : {Index(1), Index(4), Index(5)}) {
    Tensor3 d(3, 1, k);
    d(1, 0, 0) = 1.0;  // unit impulse tube: flat spectrum
    CHECK_THAT(lipschitz_bound(d, 2.0, 0), Catch::Matchers::WithinRel(double(k), 1e-12));
  }

  Rng rng(9);
  const Tensor3 d = oracles::random_tensor(3, 4, 5, rng);
  Tensor3 d2 = d;
  for (double& v : d2.data) v *= 2.0;
  CHECK_THAT(lipschitz_bound(d2, 2.0, 0),
             Catch::Matchers::WithinRel(4.0 * lipschitz_bound(d, 2.0, 0), 1e-12));
  CHECK_THAT(lipschitz_bound(d, 1.5, 3),
             Catch::Matchers::WithinRel(std::pow(1.5, 3) * lipschitz_bound(d, 1.5, 0), 1e-12));

  // direct spectral-slice computation
  const SpectralTensor dh = oracles::naive_dft3(d);
  double want = 0;
  for (Index l = 0; l < d.k; ++l) {
    const Eigen::MatrixXcd b = dh.slice(l);
    want += (b.adjoint() * b).norm();
  }
  CHECK_THAT(lipschitz_bound(d, 2.0, 0), Catch::Matchers::WithinRel(want, 1e-10));

  const Tensor3 z(2, 2, 2);
  CHECK_THROWS_AS(lipschitz_bound(z, 2.0, 0), numeric_error);
}

TEST_CASE("objective matches brute-force evaluation") {
  Rng rng(15);
  const Tensor3 d = oracles::random_tensor(3, 4, 3, rng);
  const Tensor3 x = oracles::random_tensor(4, 5, 3, rng);
  const Tensor3 y = oracles::random_tensor(3, 5, 3, rng);

  Tensor3 zero(4, 5, 3);
  CHECK_THAT(objective(y, d, zero, 0.3),
             Catch::Matchers::WithinRel(0.5 * fro_norm(y) * fro_norm(y), 1e-12));
  CHECK(objective(tprod(d, x), d, x, 0.0) <= 1e-18);
  CHECK_THAT(objective(y, d, x, 0.7),
             Catch::Matchers::WithinRel(objective_naive(y, d, x, 0.7), 1e-10));
}

TEST_CASE("identity dictionary: solver reproduces the closed-form shrink") {
  Rng rng(21);
  const Index m = 4, n = 5, k = 3;
  const Tensor3 y = oracles::random_tensor(m, n, k, rng);
  const Tensor3 d = identity_tensor(m, k);
  for (double beta : {1e-8, 0.2}) {
    const Tensor3 x = ista_t_solve(y, d, small_cfg(beta), Tensor3(m, n, k));
    const Tensor3 want = soft_threshold(y, beta);
    CHECK(oracles::rel_err(x, want) <= 1e-7);
  }
}

TEST_CASE("large beta keeps the zero warm start fixed") {
  Rng rng(23);
  const Tensor3 d = oracles::random_tensor(3, 5, 4, rng);
  const Tensor3 y = oracles::random_tensor(3, 6, 4, rng);
  const Tensor3 corr = tprod(ttranspose(d), y);
  double bmax = 0;
  for (double v : corr.data) bmax = std::max(bmax, std::abs(v));

  SolverConfig cfg = small_cfg(bmax * 1.000001);
  const Tensor3 x = ista_t_solve(y, d, cfg, Tensor3(5, 6, 4));
  CHECK(fro_norm(x) == 0.0);
}

TEST_CASE("k=1 solutions agree with a dense matrix FISTA oracle") {
  Rng rng(27);
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = 8, r = 5, n = 6;
    const Tensor3 d = oracles::random_tensor(m, r, 1, rng);
    const Tensor3 y = oracles::random_tensor(m, n, 1, rng);
    const double beta = 0.4;

    SolverConfig cfg = small_cfg(beta);
    cfg.max_inner = 20000;
    cfg.tol_obj = 1e-30;  // run until the objective is flat to machine precision
    const Tensor3 x = ista_t_solve(y, d, cfg, Tensor3(r, n, 1));
    const Eigen::MatrixXd want = oracles::exact_lasso(y.slice(0), d.slice(0), beta, 4000);
    Tensor3 xw(r, n, 1);
    Eigen::Map<Eigen::MatrixXd>(xw.data.data(), r, n) = want;
    // objective agreement at 1e-8; the iterate itself can only be located to
    // ~sqrt(eps/mu) once the objective saturates in double precision
    const double obj_got = objective(y, d, x, beta);
    const double obj_want = objective(y, d, xw, beta);
    CHECK(obj_got <= obj_want + 1e-8 * std::abs(obj_want));
    CHECK(obj_got >= obj_want - 1e-8 * std::abs(obj_want));
    CHECK((Eigen::MatrixXd(x.slice(0)) - want).norm() <= 1e-6 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("planted sparse instance is recovered") {
  Rng rng(31);
  const Index m = 16, r = 32, n = 64, k = 8;
  Tensor3 d(m, r, k);
  for (Index j = 0; j < r; ++j) {
    double nrm2 = 0;
    for (Index l = 0; l < k; ++l)
      for (Index i = 0; i < m; ++i) {
        const double v = rng.gaussian();
        d(i, j, l) = v;
        nrm2 += v * v;
      }
    for (Index l = 0; l < k; ++l)
      for (Index i = 0; i < m; ++i) d(i, j, l) /= std::sqrt(nrm2);
  }
  Tensor3 x_true(r, n, k);
  for (double& v : x_true.data)
    if (rng.uniform() < 0.05) v = rng.gaussian();
  const Tensor3 y = tprod(d, x_true);

  const Tensor3 corr = tprod(ttranspose(d), y);
  double bmax = 0;
  for (double v : corr.data) bmax = std::max(bmax, std::abs(v));

  SolverConfig cfg;
  cfg.beta = 1e-4 * bmax;
  cfg.max_inner = 3000;
  cfg.tol_obj = 1e-16;
  IstaTrace trace;
  const Tensor3 x = ista_t_solve(y, d, cfg, Tensor3(r, n, k), &trace);
  CHECK(oracles::rel_err(x, x_true) <= 1e-2);
  for (std::size_t i = 1; i < trace.best_objective.size(); ++i)
    CHECK(trace.best_objective[i] <= trace.best_objective[i - 1]);
}

TEST_CASE("majorization holds at every accepted step") {
  Rng rng(33);
  const Tensor3 d = oracles::random_tensor(4, 6, 3, rng);
  const Tensor3 y = oracles::random_tensor(4, 5, 3, rng);
  SolverConfig cfg = small_cfg(0.15);
  cfg.max_inner = 50;
  IstaTrace trace;
  ista_t_solve(y, d, cfg, Tensor3(6, 5, 3), &trace);
  REQUIRE(trace.iterations > 0);
  for (int i = 0; i < trace.iterations; ++i)
    CHECK(trace.smooth_value[std::size_t(i)] <= trace.quad_bound[std::size_t(i)] + 1e-9);
}

TEST_CASE("returned objective never exceeds the warm start objective") {
  Rng rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor3 d = oracles::random_tensor(3, 5, 4, rng);
    const Tensor3 y = oracles::random_tensor(3, 6, 4, rng);
    const Tensor3 x0 = oracles::random_tensor(5, 6, 4, rng);
    SolverConfig cfg = small_cfg(0.3);
    cfg.max_inner = 7;  // stop early on purpose
    const Tensor3 x = ista_t_solve(y, d, cfg, x0);
    CHECK(objective(y, d, x, cfg.beta) <=
          objective(y, d, x0, cfg.beta) * (1 + 1e-12) + 1e-12);
  }
}

TEST_CASE("prox fixed point stays fixed") {
  Rng rng(37);
  const Index m = 4, n = 5, k = 3;
  const Tensor3 y = oracles::random_tensor(m, n, k, rng);
  const Tensor3 d = identity_tensor(m, k);
  const double beta = 0.4;
  const Tensor3 x_star = soft_threshold(y, beta);  // exact minimizer for D = identity

  SolverConfig cfg = small_cfg(beta);
  cfg.max_inner = 1;
  const Tensor3 x1 = ista_t_solve(y, d, cfg, x_star);
  double moved = 0;
  for (std::size_t i = 0; i < x1.data.size(); ++i)
    moved = std::max(moved, std::abs(x1.data[i] - x_star.data[i]));
  CHECK(moved <= 1e-8);
}

TEST_CASE("divergent data raises a numeric error naming the iteration") {
  Tensor3 y(2, 2, 2);
  for (double& v : y.data) v = 1e200;
  Tensor3 d(2, 2, 2);
  d(0, 0, 0) = d(1, 1, 0) = 1.0;
  SolverConfig cfg = small_cfg(0.1);
  CHECK_THROWS_MATCHES(
      ista_t_solve(y, d, cfg, Tensor3(2, 2, 2)), numeric_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("iteration")));
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.beta = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.beta = 1;
  cfg.eta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.eta = 2.0;
  cfg.tol_obj = -1;
  CHECK_THROWS_AS(cfg.validate(), config_error);
}
