#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssimopt/admm.hpp"
#include "ssimopt/corpus.hpp"

namespace ssimopt {

enum class Task { sparse_approx, tikhonov, denoise, zoom, deblur };
enum class Method { ssim, l2_baseline };

struct RegMatchTarget {
  enum class Kind { none, l0_per_block, tv_total };
  Kind kind = Kind::none;
  double value = 0.0;
};

struct ExperimentSpec {
  Task task = Task::denoise;
  Method method = Method::ssim;
  double sigma = 5.0;       // blur kernel standard deviation
  std::size_t factor = 4;   // zoom factor
  double lambda = 0.1;
  RegMatchTarget target;    // when set, overrides lambda via matching
  BlockScheme scheme;
  std::uint64_t seed = 1;
  double rho = 1.0;
  double mu = 1.0;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
  int max_iters = 500;
  SsimConstants constants = SsimConstants::defaults();
};

// Each runner fills SolveReport.image with the reconstruction (block /
// global means restored where the solver works mean-free) and the
// mssim / tv / l0 summary fields against the given reference (the input
// itself when no separate reference applies).

// SSIM-l1 sparse coding of per-block DCT coefficients; the l2_baseline
// method is one-shot soft thresholding of the coefficients.
SolveReport run_sparse_approx(const Image& y, const ExperimentSpec& spec);

// T + lambda |Ax|^2 with A = identity (ridge-type recovery).
SolveReport run_tikhonov(const Image& y, const ExperimentSpec& spec);

// Blockwise MT + lambda TV; reference is the clean image used for the
// reported MSSIM (pass y_noisy again when no clean image exists).
SolveReport run_denoise(const Image& y_noisy, const Image& reference,
                        const ExperimentSpec& spec);

// MT(S x, y) + lambda TV with S = blur(sigma = factor/2) + decimation.
SolveReport run_zoom(const Image& y_low, const ExperimentSpec& spec,
                     const Image& reference = {});

// MT(B x, y) + lambda TV with B = Gaussian blur of spec.sigma.
SolveReport run_deblur(const Image& y_blurred, const ExperimentSpec& spec,
                       const Image& reference = {});

// Bisection on lambda so that the (non-increasing) measure lands within
// rel_tol of target; ties resolved toward the largest lambda.  Throws
// std::runtime_error when the target stays unreachable within max_steps.
double match_regularization(const std::function<double(double)>& measure,
                            double target, double rel_tol, double lambda_lo,
                            double lambda_hi, int max_steps = 60);

struct SweepRow {
  double target = 0.0;
  double mssim_ssim = 0.0;
  double mssim_l2 = 0.0;
  bool ok = false;
  std::string error;
};

// Runs both methods at each regularization target; failures are recorded
// per row and the sweep continues.
std::vector<SweepRow> sweep(const Image& input, const Image& reference,
                            ExperimentSpec spec,
                            const std::vector<double>& targets);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);

Image upsample_nearest(const Image& low, std::size_t factor);

}  // namespace ssimopt
