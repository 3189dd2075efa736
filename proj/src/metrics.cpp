#include "ssimopt/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ssimopt {

std::pair<Vec, double> center(const Vec& v) {
  if (v.empty()) throw std::invalid_argument("center: empty input");
  const double mean =
      kernels::sum(v.data(), v.size()) / static_cast<double>(v.size());
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return {std::move(out), mean};
}

double ssim_full(const Vec& x, const Vec& y, const SsimConstants& k) {
  if (x.size() != y.size()) throw std::invalid_argument("ssim_full: size");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("ssim_full: need n >= 2");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double mu_x = kernels::sum(x.data(), n) * inv_n;
  const double mu_y = kernels::sum(y.data(), n) * inv_n;
  // biased (1/n) second moments, matching the zero-mean simplification
  const double var_x = kernels::sumsq(x.data(), n) * inv_n - mu_x * mu_x;
  const double var_y = kernels::sumsq(y.data(), n) * inv_n - mu_y * mu_y;
  const double cov = kernels::dot(x.data(), y.data(), n) * inv_n - mu_x * mu_y;
  const double lum = (2.0 * mu_x * mu_y + k.c1) / (mu_x * mu_x + mu_y * mu_y + k.c1);
  const double cs = (2.0 * cov + k.c2) / (var_x + var_y + k.c2);
  return lum * cs;
}

double ssim_simplified(const Vec& x, const Vec& y, double c) {
  // defined through T so that the pair satisfies T + S = 1 exactly
  return 1.0 - dissim_T(x, y, c);
}

double dissim_T(const Vec& x, const Vec& y, double c) {
  if (x.size() != y.size()) throw std::invalid_argument("dissim_T: size");
  const double denom = norm_sq(x) + norm_sq(y) + c;
  if (denom <= 0.0)
    throw std::invalid_argument("dissim_T: undefined for zero inputs");
  return dist_sq(x, y) / denom;
}

Vec grad_T(const LinearMap& phi, const Vec& x, const Vec& y, double c) {
  const Vec u = phi.apply(x);
  const double r = norm_sq(u) + norm_sq(y) + c;
  if (r <= 0.0) throw std::invalid_argument("grad_T: zero denominator");
  const double num = dist_sq(u, y);
  // d/du of |u-y|^2 / r  =  (2(u-y) r - num * 2u) / r^2
  Vec g(u.size());
  const double inv_r = 1.0 / r;
  const double scale = num * inv_r * inv_r;
  for (std::size_t i = 0; i < u.size(); ++i)
    g[i] = 2.0 * (u[i] - y[i]) * inv_r - 2.0 * u[i] * scale;
  return phi.adjoint(g);
}

namespace {

double block_ssim_centered(const Vec& xb, const Vec& yb,
                           const SsimConstants& k) {
  auto [xc, mx] = center(xb);
  auto [yc, my] = center(yb);
  (void)mx;
  (void)my;
  return ssim_simplified(xc, yc, k.aggregated_c(xb.size()));
}

}  // namespace

double mssim(const Image& x, const Image& y, const BlockScheme& scheme,
             const SsimConstants& k) {
  if (!x.same_shape(y)) throw std::invalid_argument("mssim: shape mismatch");
  const auto rects = block_rects(x.rows, x.cols, scheme);
  double acc = 0.0;
  for (const auto& rect : rects)
    acc += block_ssim_centered(extract_block(x, rect), extract_block(y, rect), k);
  return acc / static_cast<double>(rects.size());
}

double mt_fidelity(const Image& x, const Image& y, const BlockScheme& scheme,
                   const SsimConstants& k) {
  if (!x.same_shape(y))
    throw std::invalid_argument("mt_fidelity: shape mismatch");
  const auto rects = block_rects(x.rows, x.cols, scheme);
  double acc = 0.0;
  for (const auto& rect : rects) {
    const Vec xb = extract_block(x, rect);
    const Vec yb = extract_block(y, rect);
    acc += dissim_T(xb, yb, k.aggregated_c(xb.size()));
  }
  return acc / static_cast<double>(rects.size());
}

Image ssim_map(const Image& x, const Image& y, const BlockScheme& scheme,
               const SsimConstants& k) {
  if (!x.same_shape(y))
    throw std::invalid_argument("ssim_map: shape mismatch");
  Image map(x.rows, x.cols);
  for (const auto& rect : block_rects(x.rows, x.cols, scheme)) {
    const double s =
        block_ssim_centered(extract_block(x, rect), extract_block(y, rect), k);
    insert_block(map, rect, Vec(rect.size(), s));
  }
  return map;
}

}  // namespace ssimopt
