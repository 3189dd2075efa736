#include "ssimopt/dense.hpp"

#include <cmath>
#include <random>

namespace ssimopt {

double norm2(const Vec& a) { return std::sqrt(norm_sq(a)); }
double dist2(const Vec& a, const Vec& b) { return std::sqrt(dist_sq(a, b)); }

Vec Mat::matvec(const Vec& x) const {
  if (x.size() != cols_) throw std::invalid_argument("matvec: size mismatch");
  Vec y(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    y[i] = kernels::dot(row(i), x.data(), cols_);
  return y;
}

Vec Mat::matvec_t(const Vec& x) const {
  if (x.size() != rows_)
    throw std::invalid_argument("matvec_t: size mismatch");
  Vec y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    kernels::axpy(x[i], row(i), y.data(), cols_);
  return y;
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Mat::frobenius() const {
  return std::sqrt(kernels::sumsq(data_.data(), data_.size()));
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: mismatch");
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) kernels::axpy(aik, b.row(k), c.row(i), b.cols());
    }
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Vec lu_solve(Mat a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw std::invalid_argument("lu_solve: dimensions");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-300) throw std::runtime_error("lu_solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    const double inv_piv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) * inv_piv;
      if (m == 0.0) continue;
      a(i, k) = 0.0;
      kernels::axpy(-m, a.row(k) + k + 1, a.row(i) + k + 1, n - k - 1);
      b[i] -= m * b[k];
    }
  }
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    s -= kernels::dot(a.row(ii) + ii + 1, x.data() + ii + 1, n - ii - 1);
    x[ii] = s / a(ii, ii);
  }
  return x;
}

double opnorm2(const Mat& a, int iters) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec v(a.cols());
  for (auto& vi : v) vi = dist(rng);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = a.matvec_t(a.matvec(v));
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    kernels::scale(1.0 / nw, w.data(), w.size());
    lambda = nw;
    v = std::move(w);
  }
  return std::sqrt(lambda);
}

double inv_opnorm2(const Mat& a, int iters) {
  if (a.rows() == 0) return 0.0;
  std::mt19937_64 rng(54321);
  std::normal_distribution<double> dist(0.0, 1.0);
  const Mat at = transpose(a);
  Vec v(a.rows());
  for (auto& vi : v) vi = dist(rng);
  double lambda = 0.0;
  // power iteration on (a a^T)^{-1} through two triangular-ish solves
  for (int it = 0; it < iters; ++it) {
    Vec w = lu_solve(at, lu_solve(a, v));
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    kernels::scale(1.0 / nw, w.data(), w.size());
    lambda = nw;
    v = std::move(w);
  }
  return std::sqrt(lambda);
}

double cg_solve(const std::function<Vec(const Vec&)>& apply_a, const Vec& b,
                Vec& x, double tol, int max_iters) {
  if (x.size() != b.size()) x.assign(b.size(), 0.0);
  Vec r = apply_a(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  Vec p = r;
  double rs = norm_sq(r);
  const double stop = tol * tol;
  for (int it = 0; it < max_iters && rs > stop; ++it) {
    Vec ap = apply_a(p);
    const double alpha = rs / dot(p, ap);
    kernels::axpy(alpha, p.data(), x.data(), x.size());
    kernels::axpy(-alpha, ap.data(), r.data(), r.size());
    const double rs_new = norm_sq(r);
    const double beta = rs_new / rs;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    rs = rs_new;
  }
  return std::sqrt(rs);
}

}  // namespace ssimopt
