#pragma once

#include <cstdint>

#include "ssimopt/image.hpp"

namespace ssimopt {

// Deterministic synthetic test images in [0, 1].  The generators are
// pure functions of the requested geometry so experiments and tests can
// reproduce them bit-for-bit without shipping binary fixtures.

// Smooth, low-frequency content: broad vignette plus a few Gaussian
// blobs.  Suited to TV regularization (its gradients are small).
Image make_smooth_image(std::size_t rows, std::size_t cols);

// High-frequency content: oriented sinusoids plus seeded grain.
Image make_textured_image(std::size_t rows, std::size_t cols,
                          std::uint64_t seed = 7);

// Piecewise-constant shapes (sharp edges, flat interiors).
Image make_cartoon_image(std::size_t rows, std::size_t cols);

// Additive white Gaussian noise at a prescribed PSNR (dB) against peak
// 1.0, i.e. sigma = 10^(-psnr/20).  Values are left unclipped.
Image add_awgn(const Image& x, double psnr_db, std::uint64_t seed);

}  // namespace ssimopt
