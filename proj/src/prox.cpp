#include "ssimopt/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace ssimopt {

Vec soft_threshold(const Vec& v, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: negative tau");
  Vec out(v.size());
  kernels::soft_threshold(v.data(), tau, out.data(), v.size());
  return out;
}

Vec prox_tikhonov(const Vec& v, const LinearMap& a_map, double t, double tol,
                  int max_iters) {
  if (t <= 0.0) throw std::invalid_argument("prox_tikhonov: t <= 0");
  if (a_map.in_dim() != v.size())
    throw std::invalid_argument("prox_tikhonov: dimension mismatch");
  auto apply = [&](const Vec& x) {
    Vec ax = a_map.gram(x);
    kernels::scale(2.0 * t, ax.data(), ax.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] += x[i];
    return ax;
  };
  Vec z = v;  // warm start at the t -> 0 limit
  const double res = cg_solve(apply, v, z, tol, max_iters);
  if (res > tol * (1.0 + norm2(v)))
    throw std::runtime_error("prox_tikhonov: CG stagnated, residual " +
                             std::to_string(res));
  return z;
}

void tv_gradient(const Image& x, Image& gx, Image& gy) {
  gx = Image(x.rows, x.cols);
  gy = Image(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) {
      gx.at(r, c) = (c + 1 < x.cols) ? x.at(r, c + 1) - x.at(r, c) : 0.0;
      gy.at(r, c) = (r + 1 < x.rows) ? x.at(r + 1, c) - x.at(r, c) : 0.0;
    }
}

Image tv_divergence(const Image& px, const Image& py) {
  // negative adjoint of tv_gradient
  Image d(px.rows, px.cols);
  for (std::size_t r = 0; r < px.rows; ++r)
    for (std::size_t c = 0; c < px.cols; ++c) {
      double v = 0.0;
      if (c + 1 < px.cols) v -= px.at(r, c);
      if (c > 0) v += px.at(r, c - 1);
      if (r + 1 < px.rows) v -= py.at(r, c);
      if (r > 0) v += py.at(r - 1, c);
      d.at(r, c) = -v;
    }
  return d;
}

double tv_seminorm(const Image& x) {
  Image gx, gy;
  tv_gradient(x, gx, gy);
  return kernels::hypot_sum(gx.data.data(), gy.data.data(), x.size());
}

Image prox_tv_chambolle(const Image& v, double t,
                        const ChambolleOptions& opts) {
  Image px, py;
  return prox_tv_chambolle_warm(v, t, px, py, opts);
}

Image prox_tv_chambolle_warm(const Image& v, double t, Image& px, Image& py,
                             const ChambolleOptions& opts) {
  if (t <= 0.0) throw std::invalid_argument("prox_tv_chambolle: t <= 0");
  const std::size_t n = v.size();
  if (!px.same_shape(v)) px = Image(v.rows, v.cols);
  if (!py.same_shape(v)) py = Image(v.rows, v.cols);
  Image scaled = v;
  kernels::scale(1.0 / t, scaled.data.data(), n);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // w = div p - V/t ; p <- (p + tau grad w) / (1 + tau |grad w|)
    Image w = tv_divergence(px, py);
    for (std::size_t i = 0; i < n; ++i) w.data[i] -= scaled.data[i];
    Image gx, gy;
    tv_gradient(w, gx, gy);
    double change_sq = 0.0, norm_sq_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::sqrt(gx.data[i] * gx.data[i] +
                                   gy.data[i] * gy.data[i]);
      const double denom = 1.0 + opts.dual_step * mag;
      const double nx = (px.data[i] + opts.dual_step * gx.data[i]) / denom;
      const double ny = (py.data[i] + opts.dual_step * gy.data[i]) / denom;
      const double dx = nx - px.data[i];
      const double dy = ny - py.data[i];
      change_sq += dx * dx + dy * dy;
      norm_sq_p += nx * nx + ny * ny;
      px.data[i] = nx;
      py.data[i] = ny;
    }
    if (std::sqrt(change_sq) <= opts.tol * (1.0 + std::sqrt(norm_sq_p)))
      break;
  }

  Image out = tv_divergence(px, py);
  for (std::size_t i = 0; i < n; ++i)
    out.data[i] = v.data[i] - t * out.data[i];
  return out;
}

}  // namespace ssimopt
