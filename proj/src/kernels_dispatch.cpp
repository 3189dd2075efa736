#include "ssimopt/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace ssimopt::kernels {
namespace {

const detail::Table* g_table = nullptr;
Isa g_isa = Isa::scalar;

bool avx2_available() {
#if SSIMOPT_HAVE_AVX2
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

void select(Isa isa) {
#if SSIMOPT_HAVE_AVX2
  if (isa == Isa::avx2) {
    g_table = &detail::avx2_table();
    g_isa = Isa::avx2;
    return;
  }
#endif
  g_table = &detail::scalar_table();
  g_isa = Isa::scalar;
}

void init() {
  if (g_table) return;
  const char* env = std::getenv("SSIMOPT_ISA");
  if (env && std::strcmp(env, "scalar") == 0) {
    select(Isa::scalar);
  } else if (env && std::strcmp(env, "avx2") == 0 && avx2_available()) {
    select(Isa::avx2);
  } else {
    select(avx2_available() ? Isa::avx2 : Isa::scalar);
  }
}

}  // namespace

Isa active() {
  init();
  return g_isa;
}

bool force(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) return false;
  select(isa);
  return true;
}

void reset() {
  g_table = nullptr;
  init();
}

double dot(const double* a, const double* b, std::size_t n) {
  init();
  return g_table->dot(a, b, n);
}
double sum(const double* a, std::size_t n) {
  init();
  return g_table->sum(a, n);
}
double sumsq(const double* a, std::size_t n) {
  init();
  return g_table->sumsq(a, n);
}
double diff_sumsq(const double* a, const double* b, std::size_t n) {
  init();
  return g_table->diff_sumsq(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  init();
  g_table->axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) {
  init();
  g_table->scale(alpha, x, n);
}
void lincomb(double a, const double* x, double b, const double* y, double* out,
             std::size_t n) {
  init();
  g_table->lincomb(a, x, b, y, out, n);
}
void soft_threshold(const double* v, double tau, double* out, std::size_t n) {
  init();
  g_table->soft_threshold(v, tau, out, n);
}
double hypot_sum(const double* gx, const double* gy, std::size_t n) {
  init();
  return g_table->hypot_sum(gx, gy, n);
}

}  // namespace ssimopt::kernels
