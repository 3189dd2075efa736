#include "ssimopt/apps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ssimopt {
namespace {

Image as_image(const Vec& v, std::size_t rows, std::size_t cols) {
  Image img(rows, cols);
  img.data = v;
  return img;
}

double block_mean(const Vec& v) {
  double s = 0.0;
  for (double vi : v) s += vi;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Shifts each block so its mean equals the stored one (the solvers work
// mean-free; the report promises exact restoration).
void restore_block_means(Image& img, const std::vector<BlockRect>& rects,
                         const Vec& means) {
  for (std::size_t b = 0; b < rects.size(); ++b) {
    Vec v = extract_block(img, rects[b]);
    const double shift = means[b] - block_mean(v);
    for (auto& vi : v) vi += shift;
    insert_block(img, rects[b], v);
  }
}

void finalize(SolveReport& r, Image recon, const Image& ref,
              const BlockScheme& scheme, const SsimConstants& k) {
  r.tv_value = tv_seminorm(recon);
  if (ref.size() > 0 && ref.same_shape(recon))
    r.mssim_value = mssim(recon, ref, scheme, k);
  r.image = std::move(recon);
}

std::size_t count_nonzero(const Vec& v) {
  std::size_t n = 0;
  for (double vi : v) n += vi != 0.0;
  return n;
}

// min_x T(x, cb) + lambda |x|_1 by two-block splitting with the identity
// operator; z is returned as the (exactly sparse) solution.
struct BlockSolve {
  Vec x, z;
  bool converged = false;
};

BlockSolve l1_t_block(const Vec& cb, double lambda, double rho, double c,
                      int max_iters, const Vec* warm) {
  const std::size_t n = cb.size();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  BlockSolve out;
  NewtonProblem np{make_identity(n), cb, Vec(n, 0.0), rho / 2.0, c};
  NewtonOptions nopts;
  nopts.tol = 1e-10 * sqrt_n;

  Vec x = warm ? *warm : cb;
  Vec z = soft_threshold(x, lambda / rho);
  Vec u(n, 0.0);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) np.anchor[i] = z[i] - u[i];
    x = newton_solve(np, std::move(x), nopts).solution;
    Vec zu(n);
    for (std::size_t i = 0; i < n; ++i) zu[i] = x[i] + u[i];
    Vec z_new = soft_threshold(zu, lambda / rho);
    for (std::size_t i = 0; i < n; ++i) u[i] += x[i] - z_new[i];
    const double primal = dist2(x, z_new);
    const double dual = rho * dist2(z_new, z);
    z = std::move(z_new);
    const double eps = 1e-9 * sqrt_n +
                       1e-7 * std::max(norm2(x), norm2(z));
    if (primal <= eps && dual <= eps) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.z = std::move(z);
  return out;
}

// Largest soft-threshold level keeping exactly k coefficients (unique
// whenever the k-th and (k+1)-th magnitudes differ).
double st_lambda_for_k(const Vec& cb, std::size_t k) {
  const std::size_t n = cb.size();
  if (k >= n) return 0.0;
  Vec mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::fabs(cb[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  if (k == 0) return mags[0];
  if (mags[k - 1] <= mags[k] || mags[k - 1] == 0.0)
    throw std::runtime_error(
        "match_regularization: target l0 unreachable (tied coefficients)");
  return 0.5 * (mags[k - 1] + mags[k]);
}

// Bisection on lambda until the SSIM-l1 block solution has exactly k
// nonzeros; ties resolved toward the smallest such lambda.
Vec l1_t_block_match_l0(const Vec& cb, std::size_t k, double rho, double c,
                        int max_iters, std::size_t block_index) {
  const std::size_t n = cb.size();
  double max_mag = 0.0;
  for (double v : cb) max_mag = std::max(max_mag, std::fabs(v));
  const double nsq = norm_sq(cb);
  if (nsq <= 0.0) {
    if (k == 0) return Vec(n, 0.0);
    throw std::runtime_error("sparse_approx: target l0 unreachable on flat "
                             "block " + std::to_string(block_index));
  }
  // lambda above |grad T(0)|_inf = 2 max|c| / |c|^2 zeroes the block
  double lo = 0.0, hi = 2.02 * max_mag / nsq;

  Vec warm = cb;
  Vec best;
  bool found = false;
  // the count can skip k entirely; remember the sparsest admissible
  // fallback (largest count <= k) so the method never gets an extra
  // coefficient over the baseline
  Vec under;
  std::size_t under_l0 = 0;
  bool have_under = false;
  for (int step = 0; step < 60 && hi - lo > 1e-12 * hi; ++step) {
    const double mid = 0.5 * (lo + hi);
    BlockSolve s = l1_t_block(cb, mid, rho, c, max_iters, &warm);
    warm = s.x;
    const std::size_t l0 = count_nonzero(s.z);
    if (l0 == k) {
      best = s.z;
      found = true;
      hi = mid;  // smallest matching lambda keeps the shrinkage bias low
    } else if (l0 > k) {
      lo = mid;
    } else {
      if (!have_under || l0 > under_l0) {
        under = s.z;
        under_l0 = l0;
        have_under = true;
      }
      hi = mid;
    }
  }
  if (found) return best;
  if (have_under) return under;
  throw std::runtime_error("sparse_approx: target l0 unreachable on block " +
                           std::to_string(block_index));
}

// Expands [lo, hi] until measure(hi) dips below target (measure is
// non-increasing in lambda).
void bracket_target(const std::function<double(double)>& measure,
                    double target, double& lo, double& hi) {
  for (int i = 0; i < 40; ++i) {
    if (measure(hi) <= target) return;
    lo = hi;
    hi *= 4.0;
  }
  throw std::runtime_error("match_regularization: failed to bracket target");
}

}  // namespace

double match_regularization(const std::function<double(double)>& measure,
                            double target, double rel_tol, double lambda_lo,
                            double lambda_hi, int max_steps) {
  if (target <= 0.0)
    throw std::invalid_argument("match_regularization: target <= 0");
  double lo = lambda_lo, hi = lambda_hi;
  for (int step = 0; step < max_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double v = measure(mid);
    if (std::fabs(v - target) <= rel_tol * target) return mid;
    if (v > target)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("match_regularization: target unreachable after " +
                           std::to_string(max_steps) + " steps");
}

Image upsample_nearest(const Image& low, std::size_t factor) {
  Image out(low.rows * factor, low.cols * factor);
  for (std::size_t r = 0; r < out.rows; ++r)
    for (std::size_t c = 0; c < out.cols; ++c)
      out.at(r, c) = low.at(r / factor, c / factor);
  return out;
}

SolveReport run_sparse_approx(const Image& y, const ExperimentSpec& spec) {
  const auto rects = block_rects(y.rows, y.cols, spec.scheme);
  const MapPtr dct = make_block_dct(y.rows, y.cols, spec.scheme);

  // subtract block means; the DCT then sees the zero-mean regime
  Image meanless = y;
  Vec means(rects.size());
  for (std::size_t b = 0; b < rects.size(); ++b) {
    Vec v = extract_block(y, rects[b]);
    means[b] = block_mean(v);
    for (auto& vi : v) vi -= means[b];
    insert_block(meanless, rects[b], v);
  }
  const Image coeffs = as_image(dct->adjoint(meanless.data), y.rows, y.cols);

  const bool match =
      spec.target.kind == RegMatchTarget::Kind::l0_per_block;
  const auto k_target = static_cast<std::size_t>(spec.target.value);
  if (match && spec.target.value > static_cast<double>(rects[0].size()))
    throw std::invalid_argument("sparse_approx: l0 target above block size");

  SolveReport report;
  Image sol(y.rows, y.cols);
  std::size_t total_l0 = 0;
  for (std::size_t b = 0; b < rects.size(); ++b) {
    const Vec cb = extract_block(coeffs, rects[b]);
    const double c =
        norm_sq(cb) > 0.0 ? 0.0 : spec.constants.aggregated_c(cb.size());
    Vec xb;
    if (spec.method == Method::l2_baseline) {
      const double lam = match ? st_lambda_for_k(cb, k_target) : spec.lambda;
      xb = soft_threshold(cb, lam);
    } else if (match) {
      xb = l1_t_block_match_l0(cb, k_target, spec.rho, c, spec.max_iters, b);
    } else {
      xb = l1_t_block(cb, spec.lambda, spec.rho, c, spec.max_iters, nullptr).z;
    }
    total_l0 += count_nonzero(xb);
    insert_block(sol, rects[b], xb);
  }

  Image recon = as_image(dct->apply(sol.data), y.rows, y.cols);
  restore_block_means(recon, rects, means);

  report.solution = std::move(sol.data);
  report.converged = true;
  report.l0_count = static_cast<double>(total_l0);
  report.data_mean = image_mean(y);
  finalize(report, std::move(recon), y, spec.scheme, spec.constants);
  return report;
}

SolveReport run_tikhonov(const Image& y, const ExperimentSpec& spec) {
  const std::size_t n = y.size();
  if (spec.method == Method::l2_baseline) {
    // min |x-y|^2 + lambda |x|^2 in closed form
    SolveReport report;
    Image recon(y.rows, y.cols);
    for (std::size_t i = 0; i < n; ++i)
      recon.data[i] = y.data[i] / (1.0 + spec.lambda);
    report.solution = recon.data;
    report.converged = true;
    report.data_mean = image_mean(y);
    finalize(report, std::move(recon), y, spec.scheme, spec.constants);
    return report;
  }

  SplitProblem sp;
  sp.phi = make_identity(n);
  sp.y = y.data;
  sp.reg = Regularizer::tikhonov;
  sp.tik_a = make_identity(n);
  sp.lambda = spec.lambda;
  sp.rho = spec.rho;
  sp.rows = y.rows;
  sp.cols = y.cols;
  sp.constants = spec.constants;

  AdmmOptions opts;
  opts.eps_abs = spec.eps_abs;
  opts.eps_rel = spec.eps_rel;
  opts.max_iters = spec.max_iters;
  SolveReport report = admm3_solve(sp, opts);

  Image recon(y.rows, y.cols);
  const double sol_mean = block_mean(report.solution);
  for (std::size_t i = 0; i < n; ++i)
    recon.data[i] = report.solution[i] - sol_mean + report.data_mean;
  finalize(report, std::move(recon), y, spec.scheme, spec.constants);
  return report;
}

namespace {

SolveReport denoise_once(const Image& y_noisy, const Image& reference,
                         const ExperimentSpec& spec, double lambda,
                         int max_iters) {
  SplitProblem sp;
  sp.phi = make_identity(y_noisy.size());
  sp.y = y_noisy.data;
  sp.reg = Regularizer::tv;
  sp.lambda = lambda;
  sp.rho = spec.rho;
  if (spec.method == Method::l2_baseline) {
    // min |X-Y|_F^2 + lambda TV(X): same splitting skeleton with the
    // quadratic fidelity; rho keeps the inner Chambolle level moderate,
    // where the dual iteration converges well
    sp.quadratic_fidelity = true;
    sp.center_data = false;
    sp.rho = std::clamp(4.0 * lambda, 1e-3, 16.0);
  } else {
    // spec.rho is the per-block penalty; the blockwise x-update scales
    // it by N, so the consensus penalty is rho/N
    const double n_blocks =
        static_cast<double>(spec.scheme.blocks_down(y_noisy.rows) *
                            spec.scheme.blocks_across(y_noisy.cols));
    sp.rho = spec.rho / n_blocks;
  }
  sp.rows = y_noisy.rows;
  sp.cols = y_noisy.cols;
  sp.blockwise = spec.method != Method::l2_baseline;
  sp.scheme = spec.scheme;
  sp.constants = spec.constants;

  AdmmOptions opts;
  opts.eps_abs = spec.eps_abs;
  opts.eps_rel = spec.eps_rel;
  opts.max_iters = max_iters;
  if (reference.same_shape(y_noisy)) opts.reference = reference;
  SolveReport report = admm3_solve(sp, opts);
  Image recon = report.image;
  finalize(report, std::move(recon), reference, spec.scheme, spec.constants);
  return report;
}

}  // namespace

SolveReport run_denoise(const Image& y_noisy, const Image& reference,
                        const ExperimentSpec& spec) {
  double lambda = spec.lambda;
  if (spec.target.kind == RegMatchTarget::Kind::tv_total) {
    const int match_iters = std::min(spec.max_iters, 150);
    auto measure = [&](double lam) {
      return denoise_once(y_noisy, reference, spec, lam, match_iters)
          .tv_value;
    };
    double lo = 1e-6, hi = 0.05;
    bracket_target(measure, spec.target.value, lo, hi);
    lambda = match_regularization(measure, spec.target.value, 0.004, lo, hi);
  }
  return denoise_once(y_noisy, reference, spec, lambda, spec.max_iters);
}

namespace {

SolveReport restore_once(const Image& y, const Image& reference,
                         const ExperimentSpec& spec, MapPtr phi,
                         std::size_t rows, std::size_t cols, const Vec& x0,
                         double lambda, int max_iters) {
  SplitProblem sp;
  sp.phi = std::move(phi);
  sp.y = y.data;
  sp.reg = Regularizer::tv;
  sp.lambda = lambda;
  sp.rho = spec.rho;
  sp.mu = spec.mu;
  sp.rows = rows;
  sp.cols = cols;
  sp.y_rows = y.rows;
  sp.y_cols = y.cols;
  sp.blockwise = true;  // MT fidelity on the data grid, means kept
  sp.scheme = spec.scheme;
  sp.constants = spec.constants;
  sp.quadratic_fidelity = spec.method == Method::l2_baseline;

  AdmmOptions opts;
  opts.eps_abs = spec.eps_abs;
  opts.eps_rel = spec.eps_rel;
  opts.max_iters = max_iters;
  if (!x0.empty()) opts.x0 = x0;
  if (reference.size() == rows * cols) opts.reference = reference;
  SolveReport report = admm4_solve(sp, opts);

  Image recon = report.image;
  if (reference.size() > 0) {
    finalize(report, std::move(recon), reference, spec.scheme,
             spec.constants);
  } else {
    // no high-resolution reference: report data-space agreement
    report.tv_value = tv_seminorm(recon);
    report.mssim_value =
        mssim(as_image(sp.phi->apply(report.solution), y.rows, y.cols), y,
              spec.scheme, spec.constants);
    report.image = std::move(recon);
  }
  return report;
}

SolveReport restore_matched(const Image& y, const Image& reference,
                            const ExperimentSpec& spec, const MapPtr& phi,
                            std::size_t rows, std::size_t cols,
                            const Vec& x0) {
  double lambda = spec.lambda;
  if (spec.target.kind == RegMatchTarget::Kind::tv_total) {
    // matching must run the full budget: the TV of a truncated run can
    // drift far from its converged value
    auto measure = [&](double lam) {
      return restore_once(y, reference, spec, phi, rows, cols, x0, lam,
                          spec.max_iters)
          .tv_value;
    };
    double lo = 1e-6, hi = 0.05;
    bracket_target(measure, spec.target.value, lo, hi);
    lambda = match_regularization(measure, spec.target.value, 0.004, lo, hi);
  }
  return restore_once(y, reference, spec, phi, rows, cols, x0, lambda,
                      spec.max_iters);
}

}  // namespace

SolveReport run_zoom(const Image& y_low, const ExperimentSpec& spec,
                     const Image& reference) {
  if (spec.factor < 2)
    throw std::invalid_argument("zoom: factor must be at least 2");
  const std::size_t rows = y_low.rows * spec.factor;
  const std::size_t cols = y_low.cols * spec.factor;
  const MapPtr phi = make_blur_subsample(
      rows, cols, static_cast<double>(spec.factor) / 2.0, spec.factor);
  const Vec x0 = upsample_nearest(y_low, spec.factor).data;
  return restore_matched(y_low, reference, spec, phi, rows, cols, x0);
}

SolveReport run_deblur(const Image& y_blurred, const ExperimentSpec& spec,
                       const Image& reference) {
  if (spec.sigma <= 0.0)
    throw std::invalid_argument("deblur: sigma must be positive");
  const MapPtr phi =
      make_gaussian_blur(y_blurred.rows, y_blurred.cols, spec.sigma);
  return restore_matched(y_blurred, reference, spec, phi, y_blurred.rows,
                         y_blurred.cols, {});
}

std::vector<SweepRow> sweep(const Image& input, const Image& reference,
                            ExperimentSpec spec,
                            const std::vector<double>& targets) {
  std::vector<SweepRow> rows;
  rows.reserve(targets.size());
  for (double target : targets) {
    SweepRow row;
    row.target = target;
    try {
      if (spec.task == Task::sparse_approx)
        spec.target = {RegMatchTarget::Kind::l0_per_block, target};
      else if (spec.task == Task::tikhonov)
        spec.lambda = target;
      else
        spec.target = {RegMatchTarget::Kind::tv_total, target};

      auto run_one = [&](Method m) {
        spec.method = m;
        switch (spec.task) {
          case Task::sparse_approx:
            return run_sparse_approx(input, spec);
          case Task::tikhonov:
            return run_tikhonov(input, spec);
          case Task::denoise:
            return run_denoise(input, reference, spec);
          case Task::zoom:
            return run_zoom(input, spec, reference);
          case Task::deblur:
            return run_deblur(input, spec, reference);
        }
        throw std::logic_error("sweep: unknown task");
      };
      SolveReport rs = run_one(Method::ssim);
      SolveReport rb = run_one(Method::l2_baseline);
      row.mssim_ssim = reference.same_shape(rs.image)
                           ? mssim(rs.image, reference, spec.scheme,
                                   spec.constants)
                           : rs.mssim_value;
      row.mssim_l2 = reference.same_shape(rb.image)
                         ? mssim(rb.image, reference, spec.scheme,
                                 spec.constants)
                         : rb.mssim_value;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + tmp);
    out << "target,mssim_ssim,mssim_l2,ok,error\n";
    out.precision(17);
    for (const auto& row : rows)
      out << row.target << ',' << row.mssim_ssim << ',' << row.mssim_l2 << ','
          << (row.ok ? 1 : 0) << ',' << row.error << "\n";
    if (!out) throw std::runtime_error("write_sweep_csv: write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_sweep_csv: rename failed for " + path);
}

}  // namespace ssimopt
