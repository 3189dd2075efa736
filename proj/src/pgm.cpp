#include "ssimopt/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ssimopt {
namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in) {
  for (;;) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  if (!in) throw std::runtime_error("pgm: malformed header");
  return value;
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("pgm: not a binary P5 file: " + path);
  const int cols = next_header_int(in);
  const int rows = next_header_int(in);
  const int maxval = next_header_int(in);
  if (cols <= 0 || rows <= 0 || maxval != 255)
    throw std::runtime_error("pgm: unsupported header in " + path);
  in.get();  // single whitespace after maxval
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw std::runtime_error("pgm: truncated pixel data in " + path);
  Image img(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.data[i] = static_cast<double>(raw[i]) / 255.0;
  return img;
}

void write_pgm(const std::string& path, const Image& img) {
  if (img.size() == 0) throw std::runtime_error("pgm: empty image");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("pgm: cannot open " + tmp);
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double q = std::round(255.0 * img.data[i]);
      raw[i] = static_cast<unsigned char>(std::clamp(q, 0.0, 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("pgm: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("pgm: rename failed for " + path);
}

}  // namespace ssimopt
