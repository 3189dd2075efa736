#include "ssimopt/newton.hpp"

#include <cmath>
#include <stdexcept>

namespace ssimopt {
namespace {

struct Scalars {
  double r;  // |phi x|^2 + |y|^2 + c
  double s;  // 1 - T(phi x, y) = (2 (phi x)^T y + c) / r
  Vec u;     // phi x
};

Scalars eval_scalars(const Vec& x, const NewtonProblem& p) {
  Scalars sc;
  sc.u = p.phi->apply(x);
  sc.r = norm_sq(sc.u) + norm_sq(p.y) + p.c;
  if (sc.r <= 0.0) throw std::invalid_argument("newton: zero denominator");
  sc.s = (2.0 * dot(sc.u, p.y) + p.c) / sc.r;
  return sc;
}

}  // namespace

double NewtonProblem::objective(const Vec& x) const {
  const Vec u = phi->apply(x);
  return dissim_T(u, y, c) + reg * dist_sq(x, anchor);
}

Vec f_residual(const Vec& x, const NewtonProblem& p) {
  const Scalars sc = eval_scalars(x, p);
  Vec f = p.phi->adjoint(sc.u);  // Phi^T Phi x
  kernels::scale(sc.s, f.data(), f.size());
  const double lr = p.reg * sc.r;
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] += lr * (x[i] - p.anchor[i]);
  const Vec pty = p.phi->adjoint(p.y);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= pty[i];
  return f;
}

Mat jacobian(const Vec& x, const NewtonProblem& p) {
  const std::size_t n = x.size();
  const Scalars sc = eval_scalars(x, p);
  const Vec ptpx = p.phi->adjoint(sc.u);      // Phi^T Phi x
  const Vec pty = p.phi->adjoint(p.y);        // Phi^T y
  // grad r = 2 Phi^T Phi x; grad s = (2 Phi^T y - 2 s Phi^T Phi x) / r
  Vec grad_r(n), grad_s(n);
  for (std::size_t i = 0; i < n; ++i) {
    grad_r[i] = 2.0 * ptpx[i];
    grad_s[i] = (2.0 * pty[i] - 2.0 * sc.s * ptpx[i]) / sc.r;
  }
  if (!p.gram_cache) {
    Mat phi = to_dense(*p.phi);
    p.gram_cache =
        std::make_shared<const Mat>(matmul(transpose(phi), phi));
  }
  const Mat& ptp = *p.gram_cache;

  Mat j(n, n);
  const double lr = p.reg * sc.r;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double v = ptpx[i] * grad_s[k] + sc.s * ptp(i, k) +
                 p.reg * (x[i] - p.anchor[i]) * grad_r[k];
      if (i == k) v += lr;
      j(i, k) = v;
    }
  }
  return j;
}

LipschitzBound lipschitz_bound(const NewtonProblem& p, const BallSpec& omega) {
  const double ny = norm2(p.y);
  if (ny <= 0.0) throw std::invalid_argument("lipschitz_bound: zero data");
  const std::size_t n = p.phi->in_dim();
  const Mat phi = to_dense(*p.phi);
  const Mat ptp = matmul(transpose(phi), phi);

  const double ptp_2 = opnorm2(ptp);
  const double ptp_f = ptp.frobenius();
  const double phi_2 = opnorm2(phi);
  double col_max = 0.0;
  for (std::size_t jcol = 0; jcol < n; ++jcol) {
    double s = 0.0;
    for (std::size_t i = 0; i < phi.rows(); ++i)
      s += phi(i, jcol) * phi(i, jcol);
    col_max = std::max(col_max, std::sqrt(s));
  }

  LipschitzBound b{};
  b.sigma_omega = 2.0 * omega.radius;
  b.rho_omega = norm2(omega.center) + omega.radius;
  b.k1 = 2.0 * ptp_2 * (b.sigma_omega + b.rho_omega);
  b.k2 = (std::sqrt(2.0) + 1.0) * phi_2 / ny;
  const double kij = (std::sqrt(2.0) + 3.0) * col_max * col_max / (ny * ny) +
                     (2.0 * std::sqrt(3.0) + 2.0) * col_max / (ny * ny * ny);
  b.k3 = static_cast<double>(n) * kij;
  b.k4 = 2.0 * static_cast<double>(n) * b.k1 * col_max * (col_max + phi_2);
  b.k5 = 2.0 * ptp_f;
  b.value = (b.k2 + b.k3) * ptp_f +
            p.reg * (b.k5 * norm2(p.anchor) + b.k1 + b.k4);
  return b;
}

std::pair<double, bool> kantorovich_check(const Vec& x0,
                                          const NewtonProblem& p, double L) {
  const Mat j0 = jacobian(x0, p);
  const Vec f0 = f_residual(x0, p);
  Vec step;
  double inv_norm;
  try {
    step = lu_solve(j0, f0);
    inv_norm = inv_opnorm2(j0);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("kantorovich_check: singular Jacobian at x0");
  }
  const double h = L * inv_norm * norm2(step);
  return {h, h <= 0.5};
}

namespace {

// With phi = I the Jacobian is (s + reg r) I + x grad_s^T +
// reg (x - anchor) grad_r^T; solve J d = f by the Woodbury identity on
// the two rank-one terms.  Returns false when the small system (or the
// diagonal) is singular and the dense path should take over.
bool solve_identity_jacobian(const Vec& x, const NewtonProblem& p,
                             const Vec& f, Vec& d) {
  const std::size_t n = x.size();
  const double r = norm_sq(x) + norm_sq(p.y) + p.c;
  if (r <= 0.0) return false;
  const double s = (2.0 * dot(x, p.y) + p.c) / r;
  const double sigma = s + p.reg * r;
  if (std::fabs(sigma) < 1e-300) return false;

  // U = [x, reg(x-anchor)], V = [grad_s, grad_r]
  Vec u2(n), v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    u2[i] = p.reg * (x[i] - p.anchor[i]);
    v1[i] = (2.0 * p.y[i] - 2.0 * s * x[i]) / r;
    v2[i] = 2.0 * x[i];
  }
  const double inv_sigma = 1.0 / sigma;
  // 2x2 capacitance C = I + V^T U / sigma
  const double c11 = 1.0 + inv_sigma * dot(v1, x);
  const double c12 = inv_sigma * dot(v1, u2);
  const double c21 = inv_sigma * dot(v2, x);
  const double c22 = 1.0 + inv_sigma * dot(v2, u2);
  const double det = c11 * c22 - c12 * c21;
  if (std::fabs(det) < 1e-14 * (std::fabs(c11 * c22) + std::fabs(c12 * c21) + 1.0))
    return false;
  const double b1 = inv_sigma * dot(v1, f);
  const double b2 = inv_sigma * dot(v2, f);
  const double a1 = (c22 * b1 - c12 * b2) / det;
  const double a2 = (c11 * b2 - c21 * b1) / det;
  d.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = inv_sigma * (f[i] - a1 * x[i] - a2 * u2[i]);
  return true;
}

// One Gauss-Seidel pass cycle for J d = f.
bool gauss_seidel(const Mat& j, const Vec& f, Vec& d, int sweeps, double tol) {
  const std::size_t n = f.size();
  if (d.size() != n) d.assign(n, 0.0);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const double diag = j(i, i);
      if (std::fabs(diag) < 1e-300) return false;
      double acc = f[i];
      acc -= kernels::dot(j.row(i), d.data(), n);
      acc += diag * d[i];
      d[i] = acc / diag;
    }
    // residual check
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = kernels::dot(j.row(i), d.data(), n) - f[i];
      res += ri * ri;
    }
    if (std::sqrt(res) <= tol * (1.0 + norm2(f))) return true;
  }
  return true;  // best effort; caller guards with the line search
}

}  // namespace

SolveReport newton_solve(const NewtonProblem& p, Vec x0,
                         const NewtonOptions& opts) {
  const std::size_t n = x0.size();
  const double tol =
      opts.tol >= 0.0 ? opts.tol : 1e-9 * std::sqrt(static_cast<double>(n));
  SolveReport report;
  Vec x = std::move(x0);
  Vec f = f_residual(x, p);
  double fnorm = norm2(f);
  double obj = p.objective(x);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (fnorm <= tol) {
      report.converged = true;
      break;
    }
    Vec d;
    bool have_direction = false;
    if (p.phi->kind() == MapKind::identity)
      have_direction = solve_identity_jacobian(x, p, f, d);
    if (!have_direction) {
      const Mat j = jacobian(x, p);
      if (n <= opts.dense_limit) {
        try {
          d = lu_solve(j, f);
          have_direction = true;
        } catch (const std::runtime_error&) {
          report.status = "singular Jacobian; damped gradient step";
        }
      } else {
        have_direction = gauss_seidel(j, f, d, opts.gauss_seidel_sweeps,
                                      opts.gauss_seidel_tol);
      }
    }

    // f equals (r/2) grad(objective), so backtracking on the objective
    // damps the Newton step globally; a non-descent Newton direction is
    // replaced by the gradient itself
    const double r_den = norm_sq(p.phi->apply(x)) + norm_sq(p.y) + p.c;
    double step = 1.0;
    if (!have_direction || dot(d, f) <= 0.0) {
      d = f;
      step = 2.0 / r_den;
    }
    const double slope = 2.0 * dot(d, f) / r_den;  // -d/dt obj(x - t d)

    Vec x_new(n);
    Vec f_new;
    double fnorm_new = fnorm, obj_new = obj;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] - step * d[i];
      try {
        obj_new = p.objective(x_new);
      } catch (const std::invalid_argument&) {
        step *= 0.5;
        continue;
      }
      if (obj_new <= obj - 1e-4 * step * slope) {
        f_new = f_residual(x_new, p);
        fnorm_new = norm2(f_new);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      report.status = "line search stalled";
      break;
    }
    x = std::move(x_new);
    f = std::move(f_new);
    fnorm = fnorm_new;
    obj = obj_new;
    report.trace.push_back({iter + 1, fnorm, 0.0, 0.0, step});
    report.iterations = iter + 1;
  }
  if (fnorm <= tol) report.converged = true;
  if (!report.converged && report.status.empty())
    report.status = "max iterations reached";
  report.objective = p.objective(x);
  report.solution = std::move(x);
  return report;
}

Vec newton_default_start(const NewtonProblem& p) {
  if (p.reg > 0.0 && !p.anchor.empty()) {
    // the anchor may sit exactly where T is undefined (all-zero with c=0)
    Vec cand = p.anchor;
    if (p.c > 0.0 || norm_sq(cand) + norm_sq(p.y) > 0.0) return cand;
  }
  Vec bp = p.phi->adjoint(p.y);
  const double nb = norm2(bp);
  if (nb > 0.0) kernels::scale(1.0 / nb, bp.data(), bp.size());
  return bp;
}

}  // namespace ssimopt
