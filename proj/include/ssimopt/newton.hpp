#pragma once

#include <optional>

#include "ssimopt/linmap.hpp"
#include "ssimopt/metrics.hpp"
#include "ssimopt/report.hpp"

namespace ssimopt {

// min_x T(phi x, y) + reg * |x - anchor|^2
struct NewtonProblem {
  MapPtr phi;
  Vec y;
  Vec anchor;
  double reg = 0.0;
  double c = 0.0;  // stability constant of T

  double objective(const Vec& x) const;

  // lazily built dense Phi^T Phi, shared across Jacobian evaluations
  mutable std::shared_ptr<const Mat> gram_cache;
};

struct LipschitzBound {
  double k1, k2, k3, k4, k5;
  double sigma_omega, rho_omega;
  double value;  // the constant L
};

// Ball Omega = {x : |x - center| <= radius}.
struct BallSpec {
  Vec center;
  double radius;
};

struct NewtonOptions {
  double tol = -1.0;  // <0 selects 1e-9 * sqrt(n)
  int max_iters = 100;
  // n above which the linear solve switches to Gauss-Seidel sweeps
  std::size_t dense_limit = 4096;
  int gauss_seidel_sweeps = 200;
  double gauss_seidel_tol = 1e-10;
};

// Stationarity residual f(x) = [s(x) Phi^T Phi + reg r(x) I] x
//                              - reg r(x) anchor - Phi^T y.
Vec f_residual(const Vec& x, const NewtonProblem& p);

// Dense Jacobian of f_residual.
Mat jacobian(const Vec& x, const NewtonProblem& p);

LipschitzBound lipschitz_bound(const NewtonProblem& p, const BallSpec& omega);

// h = L |J(x0)^-1| |J(x0)^-1 f(x0)|; ok iff h <= 1/2.
// Throws std::runtime_error on a singular Jacobian.
std::pair<double, bool> kantorovich_check(const Vec& x0,
                                          const NewtonProblem& p, double L);

// Damped Newton iteration on f_residual.  Trace rows carry
// (k, |f|, step length) in (iteration, objective, extra).
SolveReport newton_solve(const NewtonProblem& p, Vec x0,
                         const NewtonOptions& opts = {});

// Default starting point: anchor when present and usable, else the
// normalized back-projection of the data.
Vec newton_default_start(const NewtonProblem& p);

}  // namespace ssimopt
