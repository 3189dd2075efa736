#pragma once

#include <cstddef>

// Low-level arithmetic kernels used by the per-block inner loops.
// A scalar reference implementation always exists; on x86 an AVX2
// variant is selected at runtime.  The two are equivalence-tested.
namespace ssimopt::kernels {

enum class Isa { scalar, avx2 };

// Currently active instruction set.
Isa active();

// Force a specific implementation (tests); returns false if the ISA is
// unavailable on this machine.
bool force(Isa isa);

// Re-run detection (honours the SSIMOPT_ISA environment variable,
// values "scalar" or "avx2").
void reset();

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
// sum of (a[i]-b[i])^2
double diff_sumsq(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
// out = a*x + b*y
void lincomb(double a, const double* x, double b, const double* y,
             double* out, std::size_t n);

void soft_threshold(const double* v, double tau, double* out, std::size_t n);

// sum of sqrt(gx[i]^2 + gy[i]^2)
double hypot_sum(const double* gx, const double* gy, std::size_t n);

}  // namespace ssimopt::kernels
