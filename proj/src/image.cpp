#include "ssimopt/image.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssimopt {

std::vector<BlockRect> block_rects(std::size_t rows, std::size_t cols,
                                   const BlockScheme& scheme) {
  if (scheme.block_rows == 0 || scheme.block_cols == 0)
    throw std::invalid_argument("block_rects: zero block size");
  std::vector<BlockRect> rects;
  for (std::size_t r = 0; r < rows; r += scheme.block_rows)
    for (std::size_t c = 0; c < cols; c += scheme.block_cols)
      rects.push_back({r, c, std::min(scheme.block_rows, rows - r),
                       std::min(scheme.block_cols, cols - c)});
  return rects;
}

Vec extract_block(const Image& img, const BlockRect& rect) {
  Vec v(rect.size());
  std::size_t k = 0;
  for (std::size_t r = 0; r < rect.height; ++r)
    for (std::size_t c = 0; c < rect.width; ++c)
      v[k++] = img.at(rect.r0 + r, rect.c0 + c);
  return v;
}

void insert_block(Image& img, const BlockRect& rect, const Vec& values) {
  if (values.size() != rect.size())
    throw std::invalid_argument("insert_block: size mismatch");
  std::size_t k = 0;
  for (std::size_t r = 0; r < rect.height; ++r)
    for (std::size_t c = 0; c < rect.width; ++c)
      img.at(rect.r0 + r, rect.c0 + c) = values[k++];
}

double image_mean(const Image& img) {
  if (img.size() == 0) throw std::invalid_argument("image_mean: empty image");
  return kernels::sum(img.data.data(), img.size()) /
         static_cast<double>(img.size());
}

double psnr(const Image& reference, const Image& test, double peak) {
  if (!reference.same_shape(test))
    throw std::invalid_argument("psnr: shape mismatch");
  const double mse =
      dist_sq(reference.data, test.data) / static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace ssimopt
