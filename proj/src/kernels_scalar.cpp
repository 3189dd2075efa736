#include "kernels_internal.hpp"

#include <cmath>

namespace ssimopt::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sumsq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double diff_sumsq_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void lincomb_scalar(double a, const double* x, double b, const double* y,
                    double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void soft_threshold_scalar(const double* v, double tau, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = v[i];
    if (t > tau)
      out[i] = t - tau;
    else if (t < -tau)
      out[i] = t + tau;
    else
      out[i] = 0.0;
  }
}

double hypot_sum_scalar(const double* gx, const double* gy, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
  return acc;
}

}  // namespace

const Table& scalar_table() {
  static const Table t{dot_scalar,     sum_scalar,
                       sumsq_scalar,   diff_sumsq_scalar,
                       axpy_scalar,    scale_scalar,
                       lincomb_scalar, soft_threshold_scalar,
                       hypot_sum_scalar};
  return t;
}

}  // namespace ssimopt::kernels::detail
