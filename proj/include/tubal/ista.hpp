#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tubal/fft.hpp"
#include "tubal/tprod.hpp"

namespace tubal {

/// All hyperparameters of the alternating solver.
struct SolverConfig {
  double beta = 0.1;        // sparsity weight
  Index atoms = 32;         // dictionary width r
  int max_outer = 15;       // alternation budget
  int max_inner = 200;      // coefficient-solve budget
  double eta = 2.0;         // backtracking growth factor, > 1
  double tol_obj = 1e-6;    // relative objective-change stop
  double newton_tol = 1e-9; // dual KKT tolerance (scaled by tube length)
  int max_newton = 50;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(beta > 0)) throw config_error("SolverConfig: beta must be positive");
    if (atoms <= 0) throw config_error("SolverConfig: atoms must be positive");
    if (max_inner < 1) throw config_error("SolverConfig: max_inner must be at least 1");
    if (!(eta > 1)) throw config_error("SolverConfig: eta must exceed 1");
    if (!(tol_obj > 0)) throw config_error("SolverConfig: tol_obj must be positive");
    if (!(newton_tol > 0)) throw config_error("SolverConfig: newton_tol must be positive");
    if (max_newton < 1) throw config_error("SolverConfig: max_newton must be at least 1");
  }
};

/// State of the accelerated proximal iteration.
struct IstaState {
  Tensor3 X_current;   // latest iterate
  Tensor3 X_previous;  // previous iterate (momentum memory)
  Tensor3 C;           // extrapolation point
  double t = 1.0;      // momentum scalar, >= 1 and nondecreasing
  double L = 0.0;      // current curvature estimate, > 0
  int p = 0;           // iteration counter
};

/// Per-iteration diagnostics of ista_t_solve.
struct IstaTrace {
  std::vector<double> objective;       // F at each candidate iterate
  std::vector<double> best_objective;  // running minimum of the above (monotone)
  std::vector<double> smooth_at_extrap;
  std::vector<double> smooth_value;
  std::vector<double> quad_bound;
  std::vector<double> step_L;
  int backtracks = 0;
  int iterations = 0;
};

/// Elementwise soft threshold: prox of tau * l1.
inline Tensor3 soft_threshold(const Tensor3& a, double tau) {
  if (!(tau >= 0)) throw config_error("soft_threshold: tau must be nonnegative");
  Tensor3 out(a.m, a.n, a.k);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double v = a.data[i];
    const double mag = std::abs(v) - tau;
    out.data[i] = mag > 0 ? (v < 0 ? -mag : mag) : 0.0;
  }
  return out;
}

/// Gradient of the data-fit term f(C) = 0.5 * ||Y - D*C||_F^2.
inline Tensor3 smooth_gradient(const Tensor3& d, const Tensor3& y, const Tensor3& c) {
  if (d.m != y.m || d.k != y.k || d.n != c.m || c.n != y.n || c.k != y.k)
    throw shape_error("smooth_gradient: shapes do not conform (D " + d.shape_str() + ", Y " +
                      y.shape_str() + ", C " + c.shape_str() + ")");
  Tensor3 r = tprod(d, c);
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= y.data[i];
  return tprod(ttranspose(d), r);
}

/// Curvature bound eta^p * sum over spectral slices of ||Dhat_l^H Dhat_l||_F.
/// A (loose) global upper bound on the gradient Lipschitz constant of the
/// data-fit term; eta^p is the backtracking schedule.
inline double lipschitz_bound(const Tensor3& d, double eta, int p) {
  if (!(eta > 0)) throw config_error("lipschitz_bound: eta must be positive");
  if (fro_norm(d) == 0) throw numeric_error("lipschitz_bound: zero dictionary, step size undefined");
  SpectralTensor dh = dft3(d);
  double s = 0;
  for (Index l = 0; l < dh.k; ++l) {
    auto b = dh.slice(l);
    s += (b.adjoint() * b).norm();
  }
  return std::pow(eta, p) * s;
}

/// Full objective 0.5 * ||Y - D*X||_F^2 + beta * ||X||_1.
inline double objective(const Tensor3& y, const Tensor3& d, const Tensor3& x, double beta) {
  Tensor3 r = tprod(d, x);
  double s = 0;
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    const double v = y.data[i] - r.data[i];
    s += v * v;
  }
  return 0.5 * s + beta * l1_norm(x);
}

namespace detail {

// Exact gradient Lipschitz constant of the data-fit term: the largest
// squared spectral norm over frontal slices, computed on the smaller Gram
// side. The half spectrum covers all distinct slice norms of a real tensor.
inline double spectral_curvature(const HalfSpectrum& dh) {
  double lmax = 0;
  for (Index l = 0; l < dh.ks; ++l) {
    auto b = dh.slice(l);
    Eigen::MatrixXcd gram =
        b.rows() <= b.cols() ? (b * b.adjoint()).eval() : (b.adjoint() * b).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    lmax = std::max(lmax, eig.eigenvalues().maxCoeff());
  }
  return lmax;
}

inline double weighted_energy(const HalfSpectrum& h) {
  double s = 0;
  for (Index l = 0; l < h.ks; ++l) s += h.weight(l) * h.slice(l).squaredNorm();
  return s;
}

}  // namespace detail

/// Solve min_X 0.5*||Y - D*X||_F^2 + beta*||X||_1 for fixed D by accelerated
/// proximal iteration with backtracked curvature and a monotone safeguard:
/// the returned iterate achieves the lowest objective observed, which is
/// never above the objective at the warm start X0.
///
/// Residuals live in the half spectrum of the tube axis; extrapolation
/// residuals are affine combinations of stored iterate residuals, so each
/// iteration costs one forward and one inverse transform plus two complex
/// matrix products per stored slice.
inline Tensor3 ista_t_solve(const Tensor3& y, const Tensor3& d, const SolverConfig& cfg,
                            const Tensor3& x0, IstaTrace* trace = nullptr) {
  cfg.validate();
  if (d.m != y.m || d.k != y.k) throw shape_error("ista_t_solve: D/Y shapes do not conform");
  if (x0.m != d.n || x0.n != y.n || x0.k != y.k)
    throw shape_error("ista_t_solve: X0 shape " + x0.shape_str() + " does not conform");

  const Index r = d.n, n = y.n, k = y.k;
  const double inv2k = 0.5 / double(k);

  const HalfSpectrum yh = rdft3(y);
  const HalfSpectrum dh = rdft3(d);
  const Index ks = yh.ks;

  double lip = detail::spectral_curvature(dh);
  if (!(lip > 0)) throw numeric_error("ista_t_solve: zero dictionary, step size undefined");

  IstaState st;
  st.X_current = x0;
  st.X_previous = x0;
  st.C = x0;
  st.L = lip;

  // Residual carousel: res_cur/res_prev hold Dhat*Xhat - Yhat for the two
  // stored iterates; the extrapolation residual is an affine combination.
  HalfSpectrum res_cur(y.m, n, k), res_prev(y.m, n, k), res_trial(y.m, n, k), res_extrap(y.m, n, k);
  HalfSpectrum xh(r, n, k), gh(r, n, k);

  xh = rdft3(x0);
  for (Index l = 0; l < ks; ++l) res_cur.slice(l) = dh.slice(l) * xh.slice(l) - yh.slice(l);
  res_prev = res_cur;

  double f0 = detail::weighted_energy(res_cur) * inv2k;
  double best_obj = f0 + cfg.beta * l1_norm(x0);
  if (!std::isfinite(best_obj))
    throw numeric_error("ista_t_solve: non-finite objective at iteration 0");
  Tensor3 x_best = x0;
  Tensor3 x_trial(r, n, k);
  Tensor3 grad(r, n, k);

  double gamma = 0.0;
  double prev_obj = best_obj;

  for (int p = 0; p < cfg.max_inner; ++p) {
    st.p = p + 1;
    // Extrapolation point and its residual.
    for (Index l = 0; l < ks; ++l)
      res_extrap.slice(l) =
          res_cur.slice(l) + gamma * (res_cur.slice(l) - res_prev.slice(l));
    const double f_extrap = detail::weighted_energy(res_extrap) * inv2k;
    for (Index l = 0; l < ks; ++l) gh.slice(l) = dh.slice(l).adjoint() * res_extrap.slice(l);
    grad = irdft3(gh);
    {
      const double* xc = st.X_current.data.data();
      const double* xp = st.X_previous.data.data();
      double* c = st.C.data.data();
      for (Index i = 0; i < st.C.size(); ++i)
        c[std::size_t(i)] = xc[std::size_t(i)] + gamma * (xc[std::size_t(i)] - xp[std::size_t(i)]);
    }

    double f_trial = 0, quad = 0;
    for (int bt = 0;; ++bt) {
      const double step = 1.0 / st.L;
      const double tau = cfg.beta * step;
      double dot_gd = 0, nrm_d2 = 0;
      const double* c = st.C.data.data();
      const double* g = grad.data.data();
      double* xt = x_trial.data.data();
      for (Index i = 0; i < x_trial.size(); ++i) {
        const std::size_t u = std::size_t(i);
        const double v = c[u] - step * g[u];
        const double mag = std::abs(v) - tau;
        const double xv = mag > 0 ? (v < 0 ? -mag : mag) : 0.0;
        xt[u] = xv;
        const double diff = xv - c[u];
        dot_gd += g[u] * diff;
        nrm_d2 += diff * diff;
      }
      xh = rdft3(x_trial);
      for (Index l = 0; l < ks; ++l)
        res_trial.slice(l) = dh.slice(l) * xh.slice(l) - yh.slice(l);
      f_trial = detail::weighted_energy(res_trial) * inv2k;
      quad = f_extrap + dot_gd + 0.5 * st.L * nrm_d2;
      if (f_trial <= quad + 1e-12 * std::max(1.0, std::abs(f_extrap))) break;
      if (bt >= 60)
        throw numeric_error("ista_t_solve: backtracking failed to restore majorization");
      st.L *= cfg.eta;
      if (trace) ++trace->backtracks;
    }

    const double obj = f_trial + cfg.beta * l1_norm(x_trial);
    if (!std::isfinite(obj))
      throw numeric_error("ista_t_solve: non-finite objective at iteration " +
                          std::to_string(p + 1));
    if (obj < best_obj) {
      best_obj = obj;
      x_best = x_trial;
    }
    if (trace) {
      trace->objective.push_back(obj);
      trace->best_objective.push_back(best_obj);
      trace->smooth_at_extrap.push_back(f_extrap);
      trace->smooth_value.push_back(f_trial);
      trace->quad_bound.push_back(quad);
      trace->step_L.push_back(st.L);
      trace->iterations = p + 1;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * st.t * st.t));
    gamma = (st.t - 1.0) / t_next;
    st.t = t_next;
    std::swap(st.X_previous, st.X_current);
    std::swap(st.X_current, x_trial);
    std::swap(res_prev, res_cur);
    std::swap(res_cur, res_trial);

    const double rel = std::abs(obj - prev_obj) / std::max(std::abs(prev_obj), 1e-30);
    prev_obj = obj;
    if (rel < cfg.tol_obj) break;
  }
  return x_best;
}

}  // namespace tubal
