#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssimopt/dense.hpp"

namespace ssimopt {

// 2-D grayscale image, row-major, intensities normally in [0,1].
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Image() = default;
  Image(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

// Non-overlapping block partition; edge blocks are truncated at the
// image boundary.
struct BlockScheme {
  std::size_t block_rows = 8;
  std::size_t block_cols = 8;

  std::size_t blocks_down(std::size_t rows) const {
    return (rows + block_rows - 1) / block_rows;
  }
  std::size_t blocks_across(std::size_t cols) const {
    return (cols + block_cols - 1) / block_cols;
  }
  std::size_t num_blocks(const Image& img) const {
    return blocks_down(img.rows) * blocks_across(img.cols);
  }
};

// A block's position and extent inside its image.
struct BlockRect {
  std::size_t r0, c0, height, width;
  std::size_t size() const { return height * width; }
};

std::vector<BlockRect> block_rects(std::size_t rows, std::size_t cols,
                                   const BlockScheme& scheme);

// Column-vector view of one block (row-major flatten).
Vec extract_block(const Image& img, const BlockRect& rect);
void insert_block(Image& img, const BlockRect& rect, const Vec& values);

double image_mean(const Image& img);
double psnr(const Image& reference, const Image& test, double peak = 1.0);

}  // namespace ssimopt
