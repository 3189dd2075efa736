#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "ssimopt/corpus.hpp"
#include "ssimopt/pgm.hpp"

using namespace ssimopt;

int main(int argc, char** argv) {
  std::size_t size = 128;
  std::string out_dir = ".";
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--size") && i + 1 < argc)
      size = std::stoul(argv[++i]);
    else if (!std::strcmp(argv[i], "--output-dir") && i + 1 < argc)
      out_dir = argv[++i];
    else {
      std::fprintf(stderr,
                   "usage: make_corpus [--size N] [--output-dir DIR]\n");
      return 2;
    }
  }
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_pgm((dir / "smooth.pgm").string(), make_smooth_image(size, size));
  write_pgm((dir / "textured.pgm").string(), make_textured_image(size, size));
  write_pgm((dir / "cartoon.pgm").string(), make_cartoon_image(size, size));
  std::printf("wrote smooth.pgm, textured.pgm, cartoon.pgm (%zux%zu) to %s\n",
              size, size, out_dir.c_str());
  return 0;
}
