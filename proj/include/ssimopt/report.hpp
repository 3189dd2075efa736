#pragma once

#include <string>
#include <vector>

#include "ssimopt/dense.hpp"
#include "ssimopt/image.hpp"

namespace ssimopt {

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  // solver-specific extra column (step length, mssim-vs-reference, ...)
  double extra = 0.0;
};

struct SolveReport {
  Vec solution;
  Image image;  // populated by image-domain solvers
  bool converged = false;
  int iterations = 0;
  std::string status;
  double objective = 0.0;
  double mssim_value = 0.0;
  double tv_value = 0.0;
  double l0_count = 0.0;
  // mean removed from the data during preprocessing (zero-mean regimes)
  double data_mean = 0.0;
  std::vector<TraceRow> trace;
};

void write_trace_csv(const std::string& path, const SolveReport& report,
                     const std::string& extra_header = "extra");

}  // namespace ssimopt
