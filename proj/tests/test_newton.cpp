#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ssimopt/newton.hpp"

using namespace ssimopt;

namespace {

Vec random_vec(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
               double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

Mat random_mat(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Mat m(r, c);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : m.data()) v = dist(rng);
  return m;
}

NewtonProblem random_problem(std::mt19937_64& rng, std::size_t m,
                             std::size_t n) {
  NewtonProblem p;
  p.phi = make_dense(random_mat(m, n, rng));
  p.y = random_vec(m, rng, 0.2, 1.0);
  p.anchor = random_vec(n, rng);
  p.reg = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
  p.c = 0.0;
  return p;
}

}  // namespace

TEST_CASE("f_residual is proportional to the objective gradient") {
  std::mt19937_64 rng(3);
  const NewtonProblem p = random_problem(rng, 5, 4);
  const Vec x = random_vec(4, rng);
  const Vec f = f_residual(x, p);
  const double r = norm_sq(p.phi->apply(x)) + norm_sq(p.y) + p.c;
  const double h = 1e-6;
  for (std::size_t i = 0; i < 4; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double grad = (p.objective(xp) - p.objective(xm)) / (2 * h);
    CHECK(f[i] == doctest::Approx(0.5 * r * grad).epsilon(1e-5));
  }
}

TEST_CASE("jacobian matches finite differences of f_residual") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const NewtonProblem p = random_problem(rng, n + 1, n);
    const Vec x = random_vec(n, rng);
    const Mat j = jacobian(x, p);
    const double h = 1e-7;
    for (std::size_t k = 0; k < n; ++k) {
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const Vec fp = f_residual(xp, p);
      const Vec fm = f_residual(xm, p);
      for (std::size_t i = 0; i < n; ++i) {
        const double fd = (fp[i] - fm[i]) / (2 * h);
        CHECK(j(i, k) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("solver matches a dense grid search in two dimensions") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const NewtonProblem p = random_problem(rng, 3, 2);

    double grid_best = std::numeric_limits<double>::infinity();
    Vec grid_x(2);
    for (int i = 0; i <= 400; ++i)
      for (int j = 0; j <= 400; ++j) {
        const Vec x{-2.0 + 0.01 * i, -2.0 + 0.01 * j};
        const double v = p.objective(x);
        if (v < grid_best) {
          grid_best = v;
          grid_x = x;
        }
      }

    // the objective is nonconvex, so the solver gets the standard
    // handful of starts; the best must reach the brute-force level
    NewtonOptions opts;
    opts.tol = 1e-10;
    const SolveReport polished = newton_solve(p, grid_x, opts);
    CHECK(polished.converged);
    double best = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (const Vec& start : {newton_default_start(p), p.anchor, grid_x}) {
      const SolveReport run = newton_solve(p, start, opts);
      any_converged = any_converged || run.converged;
      best = std::min(best, run.objective);
    }
    CHECK(any_converged);
    CHECK(best <= std::min(polished.objective, grid_best) + 1e-4);
  }
}

TEST_CASE("identity fast path agrees with the dense Jacobian path") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    NewtonProblem p;
    p.phi = make_identity(6);
    p.y = random_vec(6, rng, 0.2, 1.0);
    p.anchor = random_vec(6, rng);
    p.reg = 0.4;

    NewtonProblem dense_p = p;
    dense_p.phi = make_dense(Mat::identity(6));  // forces the dense branch

    NewtonOptions opts;
    opts.tol = 1e-9;
    const SolveReport a = newton_solve(p, newton_default_start(p), opts);
    const SolveReport b =
        newton_solve(dense_p, newton_default_start(dense_p), opts);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-8));
  }
}

TEST_CASE("lipschitz bound dominates sampled Jacobian difference ratios") {
  std::mt19937_64 rng(37);
  const NewtonProblem p = random_problem(rng, 4, 3);
  BallSpec omega{random_vec(3, rng), 1.5};
  const LipschitzBound b = lipschitz_bound(p, omega);
  CHECK(b.value > 0.0);

  double max_ratio = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    // two points inside Omega
    Vec x1 = random_vec(3, rng), x2 = random_vec(3, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      x1[i] = omega.center[i] + 0.8 * omega.radius * x1[i] / std::sqrt(3.0);
      x2[i] = omega.center[i] + 0.8 * omega.radius * x2[i] / std::sqrt(3.0);
    }
    const double d = dist2(x1, x2);
    if (d < 1e-8) continue;
    const Mat j1 = jacobian(x1, p), j2 = jacobian(x2, p);
    Mat diff(3, 3);
    for (std::size_t i = 0; i < 9; ++i)
      diff.data()[i] = j1.data()[i] - j2.data()[i];
    max_ratio = std::max(max_ratio, diff.frobenius() / d);
  }
  CHECK(max_ratio <= b.value);
}

TEST_CASE("kantorovich check flags quadratic-convergence starts") {
  std::mt19937_64 rng(41);
  NewtonProblem p;
  p.phi = make_dense(random_mat(4, 4, rng));
  p.y = random_vec(4, rng, 0.3, 1.0);
  p.anchor = random_vec(4, rng, -0.2, 0.2);
  p.reg = 1.0;

  NewtonOptions opts;
  opts.tol = 1e-13;
  const SolveReport sol = newton_solve(p, newton_default_start(p), opts);
  REQUIRE(sol.converged);

  // start close to the solution: the check passes and the residual
  // trace contracts at quadratic order
  Vec x0 = sol.solution;
  for (auto& v : x0) v += 0.01;
  BallSpec omega{sol.solution, 0.5};
  const LipschitzBound lb = lipschitz_bound(p, omega);
  const auto [h, ok] = kantorovich_check(x0, p, lb.value);
  if (ok) {
    const SolveReport run = newton_solve(p, x0, opts);
    REQUIRE(run.converged);
    // residual norms live in the trace objective column
    for (std::size_t k = 0; k + 1 < run.trace.size(); ++k) {
      const double e0 = run.trace[k].objective;
      const double e1 = run.trace[k + 1].objective;
      if (e0 < 1e-2 && e0 > 1e-14)
        CHECK(e1 <= std::max(5.0 * e0 * e0, 1e-13));
    }
  } else {
    MESSAGE("kantorovich h above 1/2 at this start; h = ", h);
    CHECK(h > 0.5);
  }

  // far-away starts must not be certified
  Vec far(4, 50.0);
  const auto [h_far, ok_far] = kantorovich_check(far, p, lb.value);
  CHECK_FALSE(ok_far);
}

TEST_CASE("solver survives a noise-dominated low-intensity block") {
  // regression shape: dark data, large anchor, moderate regularization
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    NewtonProblem p;
    p.phi = make_identity(64);
    p.y = random_vec(64, rng, -0.15, 0.15);
    p.anchor = random_vec(64, rng, -0.3, 0.3);
    p.reg = 0.5;
    NewtonOptions opts;
    opts.tol = 1e-6;
    const SolveReport r = newton_solve(p, p.anchor, opts);
    CHECK(r.converged);
    CHECK(r.objective <= p.objective(p.anchor) + 1e-12);
  }
}
