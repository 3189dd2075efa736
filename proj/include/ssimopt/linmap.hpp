#pragma once

#include <memory>
#include <vector>

#include "ssimopt/dense.hpp"
#include "ssimopt/image.hpp"

namespace ssimopt {

enum class MapKind {
  identity,
  block_dct,
  gaussian_blur,
  blur_subsample,
  difference_1d,
  composed,
  dense,
};

// Linear operator with matrix-free apply/adjoint actions.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  MapKind kind() const { return kind_; }
  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }

  Vec apply(const Vec& x) const;
  Vec adjoint(const Vec& y) const;
  // adjoint(apply(x)); Phi^T Phi x
  Vec gram(const Vec& x) const;

 protected:
  LinearMap(MapKind kind, std::size_t in_dim, std::size_t out_dim)
      : kind_(kind), in_dim_(in_dim), out_dim_(out_dim) {}

  virtual Vec do_apply(const Vec& x) const = 0;
  virtual Vec do_adjoint(const Vec& y) const = 0;

 private:
  MapKind kind_;
  std::size_t in_dim_, out_dim_;
};

using MapPtr = std::shared_ptr<const LinearMap>;

MapPtr make_identity(std::size_t n);

// Per-block synthesis of the orthonormal type-II DCT over an image grid;
// apply turns coefficients into pixels, adjoint is the forward transform.
MapPtr make_block_dct(std::size_t rows, std::size_t cols,
                      const BlockScheme& scheme);

// Separable sampled-Gaussian convolution, unit-sum kernel, reflective
// boundary.  radius < 0 selects ceil(3*sigma).
MapPtr make_gaussian_blur(std::size_t rows, std::size_t cols, double sigma,
                          int radius = -1);

// Gaussian blur followed by decimation by `factor` in both directions;
// rows and cols must be divisible by factor.
MapPtr make_blur_subsample(std::size_t rows, std::size_t cols, double sigma,
                           std::size_t factor);

// Forward differences, R^n -> R^(n-1).
MapPtr make_difference_1d(std::size_t n);

// maps.front() is applied first.
MapPtr make_composed(std::vector<MapPtr> maps);

MapPtr make_dense(Mat m);

// Materializes the operator column by column.
Mat to_dense(const LinearMap& map);

}  // namespace ssimopt
