#pragma once

#include <string>

#include "ssimopt/image.hpp"

namespace ssimopt {

// Binary (P5) 8-bit PGM.  Intensities are mapped to [0,1] on load and
// quantized with round(255*v), clamped, on save.  Saving goes through a
// temp file plus rename so partially written outputs never appear.
Image read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Image& img);

}  // namespace ssimopt
