#include "ssimopt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ssimopt {
namespace {

double gauss_bump(double r, double c, double r0, double c0, double width) {
  const double dr = r - r0, dc = c - c0;
  return std::exp(-(dr * dr + dc * dc) / (2.0 * width * width));
}

}  // namespace

Image make_smooth_image(std::size_t rows, std::size_t cols) {
  Image img(rows, cols);
  const double h = static_cast<double>(rows);
  const double w = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double rn = (static_cast<double>(r) + 0.5) / h;
      const double cn = (static_cast<double>(c) + 0.5) / w;
      double v = 0.25 + 0.2 * rn + 0.1 * cn;
      v += 0.45 * gauss_bump(rn, cn, 0.38, 0.46, 0.18);
      v += 0.25 * gauss_bump(rn, cn, 0.72, 0.68, 0.12);
      v -= 0.20 * gauss_bump(rn, cn, 0.22, 0.78, 0.15);
      img.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

Image make_textured_image(std::size_t rows, std::size_t cols,
                          std::uint64_t seed) {
  Image img(rows, cols);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> grain(-1.0, 1.0);
  const double h = static_cast<double>(rows);
  const double w = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double rn = static_cast<double>(r) / h;
      const double cn = static_cast<double>(c) / w;
      // slowly varying luminance with texture strongest in the dark folds
      const double lum =
          0.55 + 0.275 * std::sin(2.0 * M_PI * (1.3 * rn + 0.8 * cn) + 0.4);
      const double ta = std::clamp((0.85 - lum) / 0.6, 0.15, 1.0);
      double v = lum;
      v += ta * 0.15 * std::sin(2.0 * M_PI * (9.0 * rn + 4.0 * cn));
      v += ta * 0.12 * std::sin(2.0 * M_PI * (3.0 * rn - 11.0 * cn) + 0.7);
      v += ta * 0.10 * std::sin(2.0 * M_PI * (17.0 * rn + 13.0 * cn) + 1.9);
      v += ta * 0.08 * std::sin(2.0 * M_PI * 23.0 * cn);
      v += 0.07 * grain(rng);
      img.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

Image make_cartoon_image(std::size_t rows, std::size_t cols) {
  Image img(rows, cols);
  const double h = static_cast<double>(rows);
  const double w = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double rn = (static_cast<double>(r) + 0.5) / h;
      const double cn = (static_cast<double>(c) + 0.5) / w;
      double v = 0.2;
      const double dr = rn - 0.42, dc = cn - 0.40;
      if (dr * dr + dc * dc < 0.07) v = 0.85;
      if (rn > 0.62 && rn < 0.88 && cn > 0.55 && cn < 0.92) v = 0.55;
      if (rn > 0.10 && rn < 0.26 && cn > 0.66 && cn < 0.80) v = 0.05;
      if (cn < 0.12) v = 0.70;
      img.at(r, c) = v;
    }
  }
  return img;
}

Image add_awgn(const Image& x, double psnr_db, std::uint64_t seed) {
  const double sigma = std::pow(10.0, -psnr_db / 20.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Image out = x;
  for (auto& v : out.data) v += noise(rng);
  return out;
}

}  // namespace ssimopt
