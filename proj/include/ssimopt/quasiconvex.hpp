#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ssimopt/linmap.hpp"

namespace ssimopt {

// Convex constraint descriptors with available projections / penalties.
struct L1Ball {
  double radius;  // |x|_1 <= radius
};
struct L2SqBall {
  MapPtr a;      // |A x|_2^2 <= level
  double level;
};
struct Box {
  double lo, hi;  // lo <= x_i <= hi
};
using Constraint = std::variant<L1Ball, L2SqBall, Box>;

struct AffineEquality {
  Mat a;
  Vec b;
};

struct FeasibilityProblem {
  double alpha = 1.0;  // current level, in [0, 2]
  MapPtr phi;
  Vec y;  // zero-mean data
  std::vector<Constraint> constraints;
  std::optional<AffineEquality> equality;
};

// phi_alpha(x) = (1 - alpha) |phi x - y|^2 - 2 alpha x^T phi^T y.
// Nonpositive iff T(phi x, y) <= alpha on the (phi x)^T y >= 0 half-space
// with c = 0.
double phi_alpha(const Vec& x, const LinearMap& phi, const Vec& y,
                 double alpha);

struct FeasibilityResult {
  bool feasible = false;
  Vec witness;
  double best_value = 0.0;  // min achieved max(phi_alpha, violations)
  int iterations = 0;
};

FeasibilityResult solve_feasibility(const FeasibilityProblem& p, double tol,
                                    Vec warm_start = {}, int max_iters = 2000);

enum class BisectionStatus { converged, infeasible_at_one };

struct BisectionResult {
  Vec solution;
  double lower = 0.0, upper = 2.0;
  int iterations = 0;
  std::vector<std::pair<double, bool>> feasibility_trace;  // (alpha, feasible)
  BisectionStatus status = BisectionStatus::converged;
};

struct BisectionProblem {
  MapPtr phi;
  Vec y;  // raw data; centered by the algorithm's preprocessing step
  std::vector<Constraint> constraints;
  std::optional<AffineEquality> equality;
  double feasibility_tol = 1e-8;
  int feasibility_cap = 2000;
};

BisectionResult bisection_solve(const BisectionProblem& p, double eps);

}  // namespace ssimopt
