#include "ssimopt/quasiconvex.hpp"

#include <algorithm>

#include "ssimopt/metrics.hpp"
#include <cmath>
#include <stdexcept>

namespace ssimopt {

double phi_alpha(const Vec& x, const LinearMap& phi, const Vec& y,
                 double alpha) {
  if (alpha < 0.0 || alpha > 2.0)
    throw std::invalid_argument("phi_alpha: alpha outside [0, 2]");
  const Vec u = phi.apply(x);
  return (1.0 - alpha) * dist_sq(u, y) - 2.0 * alpha * dot(u, y);
}

namespace {

// Projection onto the l1 ball of the given radius (Duchi et al. style
// threshold on the sorted magnitudes).
void project_l1(Vec& x, double radius) {
  double l1 = 0.0;
  for (double xi : x) l1 += std::fabs(xi);
  if (l1 <= radius) return;
  Vec mags(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::fabs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cum += mags[k];
    const double cand = (cum - radius) / static_cast<double>(k + 1);
    if (cand >= (k + 1 < mags.size() ? mags[k + 1] : 0.0)) {
      theta = cand;
      break;
    }
  }
  for (auto& xi : x) {
    const double m = std::fabs(xi) - theta;
    xi = m > 0.0 ? (xi > 0.0 ? m : -m) : 0.0;
  }
}

void project_box(Vec& x, double lo, double hi) {
  for (auto& xi : x) xi = std::clamp(xi, lo, hi);
}

struct EqualityProjector {
  Mat a;
  Mat aat;  // a a^T, factored on each solve
  Vec b;

  explicit EqualityProjector(const AffineEquality& eq) : a(eq.a), b(eq.b) {
    aat = matmul(a, transpose(a));
  }

  void operator()(Vec& x) const {
    Vec r = a.matvec(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    const Vec lam = lu_solve(aat, r);
    const Vec corr = a.matvec_t(lam);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= corr[i];
  }
};

}  // namespace

FeasibilityResult solve_feasibility(const FeasibilityProblem& p, double tol,
                                    Vec warm_start, int max_iters) {
  const std::size_t n = p.phi->in_dim();
  Vec x = warm_start.empty() ? Vec(n, 0.0) : std::move(warm_start);
  if (x.size() != n)
    throw std::invalid_argument("solve_feasibility: warm start dimension");

  std::optional<EqualityProjector> eq_proj;
  if (p.equality) eq_proj.emplace(*p.equality);

  auto project = [&](Vec& v) {
    if (eq_proj) (*eq_proj)(v);
    for (const auto& cons : p.constraints) {
      if (const auto* l1 = std::get_if<L1Ball>(&cons)) {
        project_l1(v, l1->radius);
      } else if (const auto* box = std::get_if<Box>(&cons)) {
        project_box(v, box->lo, box->hi);
      } else if (const auto* l2 = std::get_if<L2SqBall>(&cons)) {
        // projectable in closed form only for the identity map
        if (l2->a->kind() == MapKind::identity) {
          const double nsq = norm_sq(v);
          if (nsq > l2->level)
            kernels::scale(std::sqrt(l2->level / nsq), v.data(), n);
        }
      }
    }
  };

  // value and subgradient of max(phi_alpha, penalty-tracked violations)
  auto eval = [&](const Vec& v, Vec* grad) {
    const Vec u = p.phi->apply(v);
    double best = (1.0 - p.alpha) * dist_sq(u, p.y) - 2.0 * p.alpha * dot(u, p.y);
    int active = -1;  // -1: phi_alpha
    int idx = 0;
    for (const auto& cons : p.constraints) {
      if (const auto* l2 = std::get_if<L2SqBall>(&cons)) {
        if (l2->a->kind() != MapKind::identity) {
          const double viol = norm_sq(l2->a->apply(v)) - l2->level;
          if (viol > best) {
            best = viol;
            active = idx;
          }
        }
      }
      ++idx;
    }
    if (grad) {
      if (active < 0) {
        Vec res(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) res[i] = u[i] - p.y[i];
        Vec g = p.phi->adjoint(res);
        kernels::scale(2.0 * (1.0 - p.alpha), g.data(), n);
        const Vec pty = p.phi->adjoint(p.y);
        kernels::axpy(-2.0 * p.alpha, pty.data(), g.data(), n);
        *grad = std::move(g);
      } else {
        const auto& l2 = std::get<L2SqBall>(p.constraints[active]);
        Vec g = l2.a->gram(v);
        kernels::scale(2.0, g.data(), n);
        *grad = std::move(g);
      }
    }
    return best;
  };

  project(x);
  FeasibilityResult result;
  result.witness = x;
  result.best_value = eval(x, nullptr);

  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    Vec g;
    const double val = eval(x, &g);
    if (val < result.best_value) {
      result.best_value = val;
      result.witness = x;
    }
    if (val <= tol) break;
    const double gsq = norm_sq(g);
    if (gsq <= 0.0) break;
    // Polyak step toward the zero level, with a diminishing floor
    const double step =
        std::max(val / gsq, 1e-3 / (gsq > 1.0 ? gsq : 1.0) /
                                std::sqrt(static_cast<double>(iter + 1)));
    kernels::axpy(-step, g.data(), x.data(), n);
    project(x);
  }

  result.feasible = result.best_value <= tol;
  return result;
}

BisectionResult bisection_solve(const BisectionProblem& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("bisection_solve: eps <= 0");
  auto [y, y_mean] = center(p.y);
  (void)y_mean;

  BisectionResult result;
  Vec x(p.phi->in_dim(), 0.0);
  double l = 0.0, u = 2.0;

  while (u - l > eps) {
    const double alpha = 0.5 * (l + u);
    FeasibilityProblem fp{alpha, p.phi, y, p.constraints, p.equality};
    FeasibilityResult fr =
        solve_feasibility(fp, p.feasibility_tol, x, p.feasibility_cap);
    result.feasibility_trace.emplace_back(alpha, fr.feasible);
    ++result.iterations;
    if (fr.feasible) {
      u = alpha;
      x = std::move(fr.witness);
    } else if (alpha == 1.0) {
      result.status = BisectionStatus::infeasible_at_one;
      break;
    } else {
      l = alpha;
    }
  }

  result.solution = std::move(x);
  result.lower = l;
  result.upper = u;
  return result;
}

}  // namespace ssimopt
