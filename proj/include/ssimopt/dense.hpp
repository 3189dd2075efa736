#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ssimopt/kernels.hpp"

namespace ssimopt {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return kernels::dot(a.data(), b.data(), a.size());
}
inline double norm_sq(const Vec& a) {
  return kernels::sumsq(a.data(), a.size());
}
double norm2(const Vec& a);
inline double dist_sq(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dist_sq: size mismatch");
  return kernels::diff_sumsq(a.data(), b.data(), a.size());
}
double dist2(const Vec& a, const Vec& b);

// Row-major dense matrix; only what the Newton and feasibility paths need.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  Vec matvec(const Vec& x) const;
  Vec matvec_t(const Vec& x) const;  // transpose apply
  static Mat identity(std::size_t n);
  double frobenius() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec data_;
};

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

// Solves a x = b with partial-pivot LU.  Throws std::runtime_error on a
// numerically singular pivot.
Vec lu_solve(Mat a, Vec b);

// Largest singular value via power iteration on a^T a.
double opnorm2(const Mat& a, int iters = 200);

// Spectral norm of the inverse (1/sigma_min), via power iteration with
// LU-backed solves.  Throws if the matrix is singular.
double inv_opnorm2(const Mat& a, int iters = 200);

// Conjugate gradient for SPD systems given as a matvec callback.
// Returns the achieved residual norm.
double cg_solve(const std::function<Vec(const Vec&)>& apply_a, const Vec& b,
                Vec& x, double tol, int max_iters);

}  // namespace ssimopt
