#pragma once

#include "ssimopt/image.hpp"
#include "ssimopt/linmap.hpp"

namespace ssimopt {

// Elementwise prox of tau |.|_1.
Vec soft_threshold(const Vec& v, double tau);

// Solves (2 t A^T A + I) z = v by conjugate gradient (SPD system).
// Throws std::runtime_error if the residual stagnates above tolerance.
Vec prox_tikhonov(const Vec& v, const LinearMap& a_map, double t,
                  double tol = 1e-10, int max_iters = 10000);

// Discrete isotropic TV: forward differences, zero at the last
// row/column.
double tv_seminorm(const Image& x);

struct ChambolleOptions {
  double dual_step = 0.248;
  double tol = 1e-5;
  int max_iters = 500;
};

// argmin_Z  t TV(Z) + 1/2 |Z - V|_F^2 via fixed-point iteration on the
// dual field.
Image prox_tv_chambolle(const Image& v, double t,
                        const ChambolleOptions& opts = {});

// Same iteration but reusing a caller-held dual field (warm starts
// across outer solver iterations).  Empty fields are zero-initialized.
Image prox_tv_chambolle_warm(const Image& v, double t, Image& px, Image& py,
                             const ChambolleOptions& opts = {});

// Forward-difference gradient with replicate (Neumann) boundary, and the
// negative-adjoint divergence.  Exposed for the TV machinery and tests.
void tv_gradient(const Image& x, Image& gx, Image& gy);
Image tv_divergence(const Image& px, const Image& py);

}  // namespace ssimopt
