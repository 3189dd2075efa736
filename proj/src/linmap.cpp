#include "ssimopt/linmap.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace ssimopt {

Vec LinearMap::apply(const Vec& x) const {
  if (x.size() != in_dim_)
    throw std::invalid_argument("LinearMap::apply: dimension mismatch");
  return do_apply(x);
}

Vec LinearMap::adjoint(const Vec& y) const {
  if (y.size() != out_dim_)
    throw std::invalid_argument("LinearMap::adjoint: dimension mismatch");
  return do_adjoint(y);
}

Vec LinearMap::gram(const Vec& x) const { return adjoint(apply(x)); }

namespace {

class IdentityMap final : public LinearMap {
 public:
  explicit IdentityMap(std::size_t n) : LinearMap(MapKind::identity, n, n) {}

 private:
  Vec do_apply(const Vec& x) const override { return x; }
  Vec do_adjoint(const Vec& y) const override { return y; }
};

// Orthonormal DCT-II basis for one dimension; rows are frequencies.
Mat dct_basis(std::size_t n) {
  Mat b(n, n);
  const double pi = std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t i = 0; i < n; ++i)
      b(k, i) = c * std::cos(pi * (2.0 * i + 1.0) * k / (2.0 * n));
  }
  return b;
}

class BlockDctMap final : public LinearMap {
 public:
  BlockDctMap(std::size_t rows, std::size_t cols, const BlockScheme& scheme)
      : LinearMap(MapKind::block_dct, rows * cols, rows * cols),
        rows_(rows),
        cols_(cols),
        rects_(block_rects(rows, cols, scheme)) {
    for (const auto& rect : rects_) {
      basis(rect.height);
      basis(rect.width);
    }
  }

 private:
  const Mat& basis(std::size_t n) const {
    auto it = bases_.find(n);
    if (it == bases_.end()) it = bases_.emplace(n, dct_basis(n)).first;
    return it->second;
  }

  // forward=true: pixels -> coefficients.
  Vec transform(const Vec& v, bool forward) const {
    Image in(rows_, cols_);
    in.data = v;
    Image out(rows_, cols_);
    for (const auto& rect : rects_) {
      const Mat& br = basis(rect.height);
      const Mat& bc = basis(rect.width);
      Vec blk = extract_block(in, rect);
      // rows pass then columns pass, each an n-point transform
      Vec tmp(blk.size());
      for (std::size_t r = 0; r < rect.height; ++r)
        for (std::size_t k = 0; k < rect.width; ++k) {
          double acc = 0.0;
          for (std::size_t i = 0; i < rect.width; ++i)
            acc += (forward ? bc(k, i) : bc(i, k)) * blk[r * rect.width + i];
          tmp[r * rect.width + k] = acc;
        }
      Vec res(blk.size());
      for (std::size_t c = 0; c < rect.width; ++c)
        for (std::size_t k = 0; k < rect.height; ++k) {
          double acc = 0.0;
          for (std::size_t i = 0; i < rect.height; ++i)
            acc += (forward ? br(k, i) : br(i, k)) * tmp[i * rect.width + c];
          res[k * rect.width + c] = acc;
        }
      insert_block(out, rect, res);
    }
    return out.data;
  }

  // synthesis: coefficients -> pixels
  Vec do_apply(const Vec& x) const override { return transform(x, false); }
  Vec do_adjoint(const Vec& y) const override { return transform(y, true); }

  std::size_t rows_, cols_;
  std::vector<BlockRect> rects_;
  mutable std::map<std::size_t, Mat> bases_;
};

std::size_t reflect(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return static_cast<std::size_t>(i);
}

Vec gaussian_kernel(double sigma, int radius) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian blur: sigma <= 0");
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  Vec k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = w;
    total += w;
  }
  kernels::scale(1.0 / total, k.data(), k.size());
  return k;
}

class GaussianBlurMap final : public LinearMap {
 public:
  GaussianBlurMap(std::size_t rows, std::size_t cols, double sigma, int radius)
      : LinearMap(MapKind::gaussian_blur, rows * cols, rows * cols),
        rows_(rows),
        cols_(cols),
        kernel_(gaussian_kernel(sigma, radius)) {}

  Vec blur(const Vec& x, bool adjoint) const {
    const long radius = static_cast<long>(kernel_.size() / 2);
    const long nr = static_cast<long>(rows_);
    const long nc = static_cast<long>(cols_);
    Vec tmp(x.size(), 0.0);
    // horizontal pass
    for (long r = 0; r < nr; ++r) {
      const double* src = x.data() + r * nc;
      double* dst = tmp.data() + r * nc;
      for (long c = 0; c < nc; ++c) {
        if (!adjoint) {
          double acc = 0.0;
          for (long k = -radius; k <= radius; ++k)
            acc += kernel_[k + radius] * src[reflect(c + k, nc)];
          dst[c] = acc;
        } else {
          // scatter transpose of the gather above
          for (long k = -radius; k <= radius; ++k)
            dst[reflect(c + k, nc)] += kernel_[k + radius] * src[c];
        }
      }
    }
    Vec out(x.size(), 0.0);
    // vertical pass
    for (long c = 0; c < nc; ++c) {
      for (long r = 0; r < nr; ++r) {
        if (!adjoint) {
          double acc = 0.0;
          for (long k = -radius; k <= radius; ++k)
            acc += kernel_[k + radius] * tmp[reflect(r + k, nr) * nc + c];
          out[r * nc + c] = acc;
        } else {
          for (long k = -radius; k <= radius; ++k)
            out[reflect(r + k, nr) * nc + c] +=
                kernel_[k + radius] * tmp[r * nc + c];
        }
      }
    }
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  Vec do_apply(const Vec& x) const override { return blur(x, false); }
  Vec do_adjoint(const Vec& y) const override { return blur(y, true); }

  std::size_t rows_, cols_;
  Vec kernel_;
};

class BlurSubsampleMap final : public LinearMap {
 public:
  BlurSubsampleMap(std::size_t rows, std::size_t cols, double sigma,
                   std::size_t factor)
      : LinearMap(MapKind::blur_subsample, rows * cols,
                  (rows / factor) * (cols / factor)),
        blur_(rows, cols, sigma, -1),
        rows_(rows),
        cols_(cols),
        factor_(factor) {
    if (factor == 0 || rows % factor != 0 || cols % factor != 0)
      throw std::invalid_argument(
          "blur_subsample: dimensions not divisible by factor");
  }

 private:
  Vec do_apply(const Vec& x) const override {
    const Vec blurred = blur_.blur(x, false);
    const std::size_t lr = rows_ / factor_, lc = cols_ / factor_;
    Vec out(lr * lc);
    for (std::size_t r = 0; r < lr; ++r)
      for (std::size_t c = 0; c < lc; ++c)
        out[r * lc + c] = blurred[(r * factor_) * cols_ + c * factor_];
    return out;
  }

  Vec do_adjoint(const Vec& y) const override {
    const std::size_t lr = rows_ / factor_, lc = cols_ / factor_;
    Vec up(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < lr; ++r)
      for (std::size_t c = 0; c < lc; ++c)
        up[(r * factor_) * cols_ + c * factor_] = y[r * lc + c];
    return blur_.blur(up, true);
  }

  GaussianBlurMap blur_;
  std::size_t rows_, cols_, factor_;
};

class Difference1dMap final : public LinearMap {
 public:
  explicit Difference1dMap(std::size_t n)
      : LinearMap(MapKind::difference_1d, n, n - 1) {
    if (n < 2) throw std::invalid_argument("difference_1d: n < 2");
  }

 private:
  Vec do_apply(const Vec& x) const override {
    Vec d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
    return d;
  }
  Vec do_adjoint(const Vec& y) const override {
    Vec x(y.size() + 1, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      x[i] -= y[i];
      x[i + 1] += y[i];
    }
    return x;
  }
};

class ComposedMap final : public LinearMap {
 public:
  explicit ComposedMap(std::vector<MapPtr> maps)
      : LinearMap(MapKind::composed, maps.front()->in_dim(),
                  maps.back()->out_dim()),
        maps_(std::move(maps)) {
    for (std::size_t i = 0; i + 1 < maps_.size(); ++i)
      if (maps_[i]->out_dim() != maps_[i + 1]->in_dim())
        throw std::invalid_argument("composed: dimension chain mismatch");
  }

 private:
  Vec do_apply(const Vec& x) const override {
    Vec v = x;
    for (const auto& m : maps_) v = m->apply(v);
    return v;
  }
  Vec do_adjoint(const Vec& y) const override {
    Vec v = y;
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it)
      v = (*it)->adjoint(v);
    return v;
  }

  std::vector<MapPtr> maps_;
};

class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(Mat m)
      : LinearMap(MapKind::dense, m.cols(), m.rows()), m_(std::move(m)) {}

 private:
  Vec do_apply(const Vec& x) const override { return m_.matvec(x); }
  Vec do_adjoint(const Vec& y) const override { return m_.matvec_t(y); }

  Mat m_;
};

}  // namespace

MapPtr make_identity(std::size_t n) {
  return std::make_shared<IdentityMap>(n);
}

MapPtr make_block_dct(std::size_t rows, std::size_t cols,
                      const BlockScheme& scheme) {
  return std::make_shared<BlockDctMap>(rows, cols, scheme);
}

MapPtr make_gaussian_blur(std::size_t rows, std::size_t cols, double sigma,
                          int radius) {
  return std::make_shared<GaussianBlurMap>(rows, cols, sigma, radius);
}

MapPtr make_blur_subsample(std::size_t rows, std::size_t cols, double sigma,
                           std::size_t factor) {
  return std::make_shared<BlurSubsampleMap>(rows, cols, sigma, factor);
}

MapPtr make_difference_1d(std::size_t n) {
  return std::make_shared<Difference1dMap>(n);
}

MapPtr make_composed(std::vector<MapPtr> maps) {
  if (maps.empty()) throw std::invalid_argument("composed: empty chain");
  return std::make_shared<ComposedMap>(std::move(maps));
}

MapPtr make_dense(Mat m) { return std::make_shared<DenseMap>(std::move(m)); }

Mat to_dense(const LinearMap& map) {
  Mat m(map.out_dim(), map.in_dim());
  Vec e(map.in_dim(), 0.0);
  for (std::size_t j = 0; j < map.in_dim(); ++j) {
    e[j] = 1.0;
    const Vec col = map.apply(e);
    for (std::size_t i = 0; i < map.out_dim(); ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

}  // namespace ssimopt
