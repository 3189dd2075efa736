#pragma once

#include "ssimopt/dense.hpp"
#include "ssimopt/image.hpp"
#include "ssimopt/linmap.hpp"

namespace ssimopt {

// Stability constants of the similarity index.  aggregated_c(n) is the
// constant of the zero-mean simplified form for a block of n pixels.
struct SsimConstants {
  double c1;
  double c2;
  double c3;
  double dynamic_range;

  static SsimConstants defaults(double dynamic_range = 1.0) {
    const double c1 = 0.01 * dynamic_range;
    const double c2 = 0.03 * dynamic_range;
    return {c1 * c1, c2 * c2, (c2 * c2) / 2.0, dynamic_range};
  }

  double aggregated_c(std::size_t n) const {
    return c2 * static_cast<double>(n);
  }
};

// Subtracts the mean; returns {centered vector, mean}.
std::pair<Vec, double> center(const Vec& v);

// Full two-term similarity index (luminance times contrast-structure)
// on same-sized blocks with at least two samples.
double ssim_full(const Vec& x, const Vec& y, const SsimConstants& k);

// Zero-mean simplified similarity, (2 x^T y + c) / (|x|^2 + |y|^2 + c),
// evaluated as 1 - T so the complement identity holds exactly.
double ssim_simplified(const Vec& x, const Vec& y, double c);

// Dissimilarity T = 1 - ssim_simplified = |x-y|^2 / (|x|^2 + |y|^2 + c).
// With c == 0 both inputs zero is rejected (0/0).
double dissim_T(const Vec& x, const Vec& y, double c);

// Gradient of x -> dissim_T(phi x, y, c).
Vec grad_T(const LinearMap& phi, const Vec& x, const Vec& y, double c);

// Mean of per-block simplified similarity on mean-subtracted blocks,
// guarded by the aggregated constant.
double mssim(const Image& x, const Image& y, const BlockScheme& scheme,
             const SsimConstants& k);

// Blockwise dissimilarity average; blocks are NOT mean-subtracted.
double mt_fidelity(const Image& x, const Image& y, const BlockScheme& scheme,
                   const SsimConstants& k);

// Per-block similarity tiled over each block's extent.
Image ssim_map(const Image& x, const Image& y, const BlockScheme& scheme,
               const SsimConstants& k);

}  // namespace ssimopt
