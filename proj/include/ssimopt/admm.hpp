#pragma once

#include <optional>

#include "ssimopt/metrics.hpp"
#include "ssimopt/newton.hpp"
#include "ssimopt/prox.hpp"
#include "ssimopt/report.hpp"

namespace ssimopt {

enum class Regularizer { l1, tikhonov, tv };

// min_x fidelity(phi x, y) + lambda h(x), solved by operator splitting.
// The fidelity is the dissimilarity T (or its blockwise average with
// means kept), or the plain quadratic when quadratic_fidelity is set so
// the l2 baselines run under identical solver conditions.
struct SplitProblem {
  MapPtr phi;
  Vec y;
  Regularizer reg = Regularizer::l1;
  MapPtr tik_a;  // A of the Tikhonov term
  double lambda = 1.0;
  double rho = 1.0;
  double mu = 1.0;

  // image geometry of the unknown (required for tv and blockwise modes)
  std::size_t rows = 0, cols = 0;
  // geometry of the data side (for blockwise fidelity in the 3-block
  // splitting where w lives in the output space)
  std::size_t y_rows = 0, y_cols = 0;

  bool blockwise = false;  // blockwise fidelity, block means kept
  BlockScheme scheme;
  SsimConstants constants = SsimConstants::defaults();

  bool quadratic_fidelity = false;
  // subtract the data mean before solving (zero-mean T regime); ignored
  // in blockwise mode, where block means are kept
  bool center_data = true;
};

struct AdmmOptions {
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
  int max_iters = 500;
  std::optional<Vec> x0;
  // reference for the mssim trace column; empty disables
  Image reference;
};

struct AdmmState {
  Vec x, z, u;  // two-block splitting
  Vec w, v;     // extra variables of the three-block splitting
  Vec phi_x;    // cached phi x of the three-block splitting
  double rho = 1.0, mu = 1.0;
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// (primal, dual) residual pair from the populated parts of the state;
// prev_z / prev_w hold the previous iterates.
std::pair<double, double> residuals(const AdmmState& state, const Vec& prev_z,
                                    const Vec& prev_w = {});

SolveReport admm3_solve(const SplitProblem& p, const AdmmOptions& opts = {});
SolveReport admm4_solve(const SplitProblem& p, const AdmmOptions& opts = {});

// One blockwise x-update sweep: per-block Newton subproblems
// argmin T(block(X), block(Y)) + N rho/2 |block - (Z-U) block|^2.
Image blockwise_x_update(const Image& x_init, const Image& z, const Image& u,
                         const Image& y, const BlockScheme& scheme, double rho,
                         const SsimConstants& k, double newton_tol = 1e-9);

}  // namespace ssimopt
