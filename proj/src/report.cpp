#include "ssimopt/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ssimopt {

void write_trace_csv(const std::string& path, const SolveReport& report,
                     const std::string& extra_header) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + tmp);
    out << "iteration,objective,primal_residual,dual_residual,"
        << extra_header << "\n";
    out.precision(17);
    for (const auto& row : report.trace)
      out << row.iteration << ',' << row.objective << ','
          << row.primal_residual << ',' << row.dual_residual << ','
          << row.extra << "\n";
    if (!out) throw std::runtime_error("write_trace_csv: write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_trace_csv: rename failed for " + path);
}

}  // namespace ssimopt
