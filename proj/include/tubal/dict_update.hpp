#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tubal/fft.hpp"
#include "tubal/tensor3.hpp"

namespace tubal {

/// Dual variables of the atom-energy constraints plus Newton controls.
/// lambda is warm-startable across calls; degraded reports a bisection
/// fallback after Newton failed to reach the KKT tolerance.
struct DualState {
  Eigen::VectorXd lambda;
  double newton_tol = 1e-9;
  int max_newton = 50;
  bool degraded = false;
  int iterations = 0;
};

namespace detail {

constexpr double kLambdaFloor = 1e-10;

enum class SingularPolicy { Throw, Floor };

// Per-slice data of the dual problem. S and P determine the inner minimizer
// Dhat = P (S + Lambda)^{-1}; w is the slice multiplicity when the problem
// was built from a half spectrum.
struct DualSlice {
  Eigen::MatrixXcd S;    // Xhat Xhat^H
  Eigen::MatrixXcd P;    // Yhat Xhat^H
  Eigen::MatrixXcd PhP;  // P^H P
  double y2 = 0;         // ||Yhat||_F^2
  double w = 1;
};

struct DualProblem {
  Index m = 0, r = 0, k = 0;
  std::vector<DualSlice> slices;
};

inline DualSlice make_slice(ConstCMatMap yl, ConstCMatMap xl, double w) {
  DualSlice s;
  s.S = xl * xl.adjoint();
  s.P = yl * xl.adjoint();
  s.PhP = s.P.adjoint() * s.P;
  s.y2 = yl.squaredNorm();
  s.w = w;
  return s;
}

inline DualProblem make_problem(const SpectralTensor& yh, const SpectralTensor& xh) {
  if (yh.n != xh.n || yh.k != xh.k)
    throw shape_error("dict update: spectral shapes do not conform (" + yh.shape_str() + " vs " +
                      xh.shape_str() + ")");
  DualProblem pr;
  pr.m = yh.m;
  pr.r = xh.m;
  pr.k = yh.k;
  pr.slices.reserve(std::size_t(yh.k));
  for (Index l = 0; l < yh.k; ++l) pr.slices.push_back(make_slice(yh.slice(l), xh.slice(l), 1.0));
  return pr;
}

inline DualProblem make_problem(const HalfSpectrum& yh, const HalfSpectrum& xh) {
  DualProblem pr;
  pr.m = yh.m;
  pr.r = xh.m;
  pr.k = yh.k;
  pr.slices.reserve(std::size_t(yh.ks));
  for (Index l = 0; l < yh.ks; ++l)
    pr.slices.push_back(make_slice(yh.slice(l), xh.slice(l), yh.weight(l)));
  return pr;
}

inline bool ldlt_usable(const Eigen::LDLT<Eigen::MatrixXcd>& ldlt) {
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = ldlt.vectorD().real();
  const double dmax = d.cwiseAbs().maxCoeff();
  const double dmin = d.minCoeff();  // PSD input: negative pivots mean breakdown
  return dmax > 0 && dmin > 1e-13 * dmax;
}

struct DualEval {
  double g = 0;            // dual objective value
  Eigen::VectorXd energy;  // per-atom spectral energy sum_l ||Dhat_l(:,j)||^2
  Eigen::VectorXd grad;    // energy - k
  Eigen::MatrixXd hess;
};

inline DualEval eval_dual(const DualProblem& pr, const Eigen::VectorXd& lambda, bool want_hess,
                          SingularPolicy pol) {
  const Index r = pr.r;
  DualEval ev;
  ev.energy = Eigen::VectorXd::Zero(r);
  ev.g = 0;
  if (want_hess) ev.hess = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t li = 0; li < pr.slices.size(); ++li) {
    const DualSlice& sl = pr.slices[li];
    Eigen::MatrixXcd a = sl.S;
    a.diagonal() += lambda.cast<Cplx>();
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
    if (!ldlt_usable(ldlt)) {
      if (pol == SingularPolicy::Throw)
        throw numeric_error("dual: spectral slice " + std::to_string(li) +
                            ": (Xhat Xhat^H + Lambda) is singular");
      a.diagonal().array() += kLambdaFloor;
      ldlt.compute(a);
      if (!ldlt_usable(ldlt))
        throw numeric_error("dual: spectral slice " + std::to_string(li) +
                            " remains singular after the lambda floor");
    }
    const Eigen::MatrixXcd inv = ldlt.solve(Eigen::MatrixXcd::Identity(r, r));
    const Eigen::MatrixXcd gram = inv * sl.PhP * inv;  // Dhat^H Dhat
    ev.g += sl.w * (sl.y2 - (sl.PhP * inv).trace().real());
    ev.energy += sl.w * gram.diagonal().real();
    if (want_hess)
      ev.hess.noalias() +=
          (-2.0 * sl.w) * gram.cwiseProduct(inv.transpose()).real().matrix();
  }
  ev.grad = ev.energy.array() - double(pr.k);
  ev.g -= double(pr.k) * lambda.sum();
  return ev;
}

inline double kkt_residual(const Eigen::VectorXd& lambda, const Eigen::VectorXd& grad) {
  double res = 0;
  for (Index j = 0; j < lambda.size(); ++j) {
    res = std::max(res, std::max(grad[j], 0.0));       // primal feasibility
    res = std::max(res, std::abs(lambda[j] * grad[j]));  // complementary slackness
  }
  return res;
}

// Projected Newton ascent on the concave dual; per-coordinate bisection
// fallback when Newton stalls.
inline Eigen::VectorXd newton_solve_impl(const DualProblem& pr, DualState& state) {
  const Index r = pr.r;
  Eigen::VectorXd lam = state.lambda.size() == r ? state.lambda.cwiseMax(0.0).eval()
                                                 : Eigen::VectorXd::Zero(r);
  state.degraded = false;
  state.iterations = 0;
  const double tol = state.newton_tol * std::max(1.0, double(pr.k));

  DualEval ev = eval_dual(pr, lam, true, SingularPolicy::Floor);
  bool converged = false;
  for (int it = 0; it < state.max_newton && !converged; ++it) {
    if (kkt_residual(lam, ev.grad) <= tol) {
      converged = true;
      break;
    }
    state.iterations = it + 1;

    const double hscale = std::max(1.0, ev.hess.cwiseAbs().maxCoeff());
    for (Index j = 0; j < r; ++j)
      if (ev.hess(j, j) > 1e-6 * hscale)
        throw numeric_error("newton_solve: positive curvature in the concave dual");

    std::vector<Index> act;
    for (Index j = 0; j < r; ++j)
      if (lam[j] > 0 || ev.grad[j] > 0) act.push_back(j);
    if (act.empty()) break;

    const Index na = Index(act.size());
    Eigen::MatrixXd neg_h(na, na);
    Eigen::VectorXd ga(na);
    for (Index a = 0; a < na; ++a) {
      ga[a] = ev.grad[act[std::size_t(a)]];
      for (Index b = 0; b < na; ++b)
        neg_h(a, b) = -ev.hess(act[std::size_t(a)], act[std::size_t(b)]);
    }
    Eigen::LDLT<Eigen::MatrixXd> hd(neg_h);
    if (hd.info() != Eigen::Success || hd.vectorD().minCoeff() <= 0) {
      neg_h.diagonal().array() += 1e-12 * std::max(1.0, neg_h.trace());
      hd.compute(neg_h);
    }
    const Eigen::VectorXd delta = hd.solve(ga);

    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd trial = lam;
      for (Index a = 0; a < na; ++a)
        trial[act[std::size_t(a)]] = std::max(0.0, trial[act[std::size_t(a)]] + alpha * delta[a]);
      DualEval ev2 = eval_dual(pr, trial, true, SingularPolicy::Floor);
      if (ev2.g >= ev.g - 1e-12 * std::max(1.0, std::abs(ev.g))) {
        lam = trial;
        ev = ev2;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  if (!converged && kkt_residual(lam, ev.grad) > tol) {
    // Bisection per coordinate: each grad component is decreasing in its own
    // lambda, so a sign change brackets the root.
    state.degraded = true;
    for (int cycle = 0; cycle < 50; ++cycle) {
      for (Index j = 0; j < r; ++j) {
        auto grad_j = [&](double v) {
          Eigen::VectorXd l2 = lam;
          l2[j] = v;
          return eval_dual(pr, l2, false, SingularPolicy::Floor).grad[j];
        };
        if (grad_j(0.0) <= 0) {
          lam[j] = 0;
          continue;
        }
        double lo = 0.0, hi = std::max(1.0, 4.0 * lam[j]);
        int guard = 0;
        while (grad_j(hi) > 0 && guard++ < 200) hi *= 4.0;
        for (int b = 0; b < 120; ++b) {
          const double mid = 0.5 * (lo + hi);
          (grad_j(mid) > 0 ? lo : hi) = mid;
        }
        lam[j] = 0.5 * (lo + hi);
      }
      ev = eval_dual(pr, lam, false, SingularPolicy::Floor);
      if (kkt_residual(lam, ev.grad) <= tol) break;
    }
  }

  state.lambda = lam;
  return lam;
}

// Closed-form slice minimizer with the documented floor applied when the
// coefficient Gram is rank-deficient.
inline Eigen::MatrixXcd slice_solve_floored(const DualSlice& sl, const Eigen::VectorXd& lambda) {
  Eigen::MatrixXcd a = sl.S;
  a.diagonal() += lambda.cast<Cplx>();
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
  if (!ldlt_usable(ldlt)) {
    a.diagonal().array() += kLambdaFloor;
    ldlt.compute(a);
    if (!ldlt_usable(ldlt))
      throw numeric_error("dict update: slice system singular despite the lambda floor");
  }
  return ldlt.solve(sl.P.adjoint()).adjoint();
}

}  // namespace detail

/// Value of the Lagrange dual at lambda: the slice-wise inner minimum of the
/// data-fit plus the weighted atom-energy penalty, minus k * sum(lambda).
inline double dual_objective(const SpectralTensor& yh, const SpectralTensor& xh,
                             const Eigen::VectorXd& lambda) {
  if (lambda.size() != xh.m) throw shape_error("dual_objective: lambda size mismatch");
  if ((lambda.array() < 0).any()) throw config_error("dual_objective: lambda must be nonnegative");
  detail::DualProblem pr = detail::make_problem(yh, xh);
  return detail::eval_dual(pr, lambda, false, detail::SingularPolicy::Throw).g;
}

/// Closed-form minimizer of one spectral slice given the duals:
/// Dhat = (Yhat Xhat^H)(Xhat Xhat^H + Lambda)^{-1}, solved as a linear system.
inline Eigen::MatrixXcd slice_update(const Eigen::MatrixXcd& yl, const Eigen::MatrixXcd& xl,
                                     const Eigen::VectorXd& lambda) {
  if (yl.cols() != xl.cols()) throw shape_error("slice_update: column counts differ");
  if (lambda.size() != xl.rows()) throw shape_error("slice_update: lambda size mismatch");
  if ((lambda.array() < 0).any()) throw config_error("slice_update: lambda must be nonnegative");
  Eigen::MatrixXcd a = xl * xl.adjoint();
  a.diagonal() += lambda.cast<Cplx>();
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
  if (!detail::ldlt_usable(ldlt))
    throw numeric_error(
        "slice_update: singular system (Xhat Xhat^H + Lambda); rank-deficient coefficients "
        "need a positive lambda floor");
  return ldlt.solve((yl * xl.adjoint()).adjoint()).adjoint();
}

/// Maximize the concave dual over lambda >= 0. Gradient component j is the
/// spectral energy of atom j at the inner minimizer minus k; convergence is
/// declared on the KKT residual (feasibility and complementary slackness).
inline Eigen::VectorXd newton_solve(const SpectralTensor& yh, const SpectralTensor& xh,
                                    DualState& state) {
  detail::DualProblem pr = detail::make_problem(yh, xh);
  return detail::newton_solve_impl(pr, state);
}

/// Dictionary subproblem: minimize ||Y - D*X||_F^2 subject to unit atom
/// energies, by the spectral decomposition and its Lagrange dual. Slices
/// 0..k/2 are solved and the rest mirrored, so the output is real by
/// construction and feasible within the KKT tolerance.
inline Tensor3 learn_dictionary(const Tensor3& y, const Tensor3& x, DualState& state) {
  if (y.n != x.n || y.k != x.k)
    throw shape_error("learn_dictionary: shapes do not conform (Y " + y.shape_str() + ", X " +
                      x.shape_str() + ")");
  if (fro_norm(x) == 0)
    throw numeric_error("learn_dictionary: zero coefficients, dictionary unidentifiable");

  const HalfSpectrum yh = rdft3(y);
  const HalfSpectrum xhh = rdft3(x);
  detail::DualProblem pr = detail::make_problem(yh, xhh);
  const Eigen::VectorXd lam = detail::newton_solve_impl(pr, state);

  HalfSpectrum dh(y.m, x.m, y.k);
  for (Index l = 0; l < dh.ks; ++l) {
    dh.slice(l) = detail::slice_solve_floored(pr.slices[std::size_t(l)], lam);
    if (dh.self_conjugate(l))
      for (Index i = 0; i < dh.m * dh.n; ++i) {
        Cplx& v = dh.data[std::size_t(dh.m * dh.n * l + i)];
        v = Cplx(v.real(), 0.0);
      }
  }
  Tensor3 d = irdft3(dh);

  const Eigen::VectorXd norms = lateral_slice_norms(d);
  if ((norms.array().square() > 1.0 + 1e-6).any())
    throw numeric_error("learn_dictionary: atom energy violates the unit constraint beyond "
                        "tolerance");
  return d;
}

}  // namespace tubal
