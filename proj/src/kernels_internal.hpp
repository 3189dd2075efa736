#pragma once

#include <cstddef>

// Per-ISA kernel entry points.  kernels_dispatch.cpp wires these into the
// public API through a function table.
namespace ssimopt::kernels::detail {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  double (*diff_sumsq)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*lincomb)(double, const double*, double, const double*, double*,
                  std::size_t);
  void (*soft_threshold)(const double*, double, double*, std::size_t);
  double (*hypot_sum)(const double*, const double*, std::size_t);
};

const Table& scalar_table();
#if SSIMOPT_HAVE_AVX2
const Table& avx2_table();
#endif

}  // namespace ssimopt::kernels::detail
