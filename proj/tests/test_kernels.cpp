#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ssimopt/kernels.hpp"

using namespace ssimopt;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed,
                               double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 7, 8, 15, 16, 64, 257, 1000};

}  // namespace

TEST_CASE("scalar reductions match straightforward loops") {
  kernels::force(kernels::Isa::scalar);
  for (std::size_t n : kLengths) {
    auto a = random_vec(n, 11 + n);
    auto b = random_vec(n, 23 + n);
    double dot = 0.0, sum = 0.0, sumsq = 0.0, dss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      sum += a[i];
      sumsq += a[i] * a[i];
      dss += (a[i] - b[i]) * (a[i] - b[i]);
    }
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));
    CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(tol));
    CHECK(kernels::sum(a.data(), n) == doctest::Approx(sum).epsilon(tol));
    CHECK(kernels::sumsq(a.data(), n) == doctest::Approx(sumsq).epsilon(tol));
    CHECK(kernels::diff_sumsq(a.data(), b.data(), n) ==
          doctest::Approx(dss).epsilon(tol));
  }
  kernels::reset();
}

TEST_CASE("scalar vector updates match straightforward loops") {
  kernels::force(kernels::Isa::scalar);
  for (std::size_t n : kLengths) {
    auto x = random_vec(n, 31 + n);
    auto y = random_vec(n, 47 + n);

    auto y_ref = y;
    for (std::size_t i = 0; i < n; ++i) y_ref[i] += 0.37 * x[i];
    auto y_got = y;
    kernels::axpy(0.37, x.data(), y_got.data(), n);
    CHECK(y_got == y_ref);

    auto s_ref = x;
    for (auto& v : s_ref) v *= -1.25;
    auto s_got = x;
    kernels::scale(-1.25, s_got.data(), n);
    CHECK(s_got == s_ref);

    std::vector<double> lc_ref(n), lc_got(n);
    for (std::size_t i = 0; i < n; ++i) lc_ref[i] = 0.4 * x[i] - 1.1 * y[i];
    kernels::lincomb(0.4, x.data(), -1.1, y.data(), lc_got.data(), n);
    CHECK(lc_got == lc_ref);
  }
  kernels::reset();
}

TEST_CASE("scalar soft threshold and hypot_sum oracles") {
  kernels::force(kernels::Isa::scalar);
  auto v = random_vec(100, 3);
  std::vector<double> out(100);
  kernels::soft_threshold(v.data(), 0.5, out.data(), 100);
  for (std::size_t i = 0; i < 100; ++i) {
    const double m = std::fabs(v[i]) - 0.5;
    const double want = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
    CHECK(out[i] == want);
  }
  // exactly-at-threshold values map to zero
  double at = 0.5;
  double r;
  kernels::soft_threshold(&at, 0.5, &r, 1);
  CHECK(r == 0.0);

  auto gx = random_vec(64, 5);
  auto gy = random_vec(64, 6);
  double want = 0.0;
  for (std::size_t i = 0; i < 64; ++i)
    want += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
  CHECK(kernels::hypot_sum(gx.data(), gy.data(), 64) ==
        doctest::Approx(want).epsilon(1e-12));
  kernels::reset();
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::force(kernels::Isa::avx2)) {
    MESSAGE("avx2 unavailable on this machine; skipping");
    kernels::reset();
    return;
  }
  for (std::size_t n : kLengths) {
    auto a = random_vec(n, 101 + n);
    auto b = random_vec(n, 211 + n);
    // throw in signed zeros and exact threshold hits
    if (n >= 4) {
      a[0] = 0.0;
      a[1] = -0.0;
      a[2] = 0.3;
      a[3] = -0.3;
    }

    kernels::force(kernels::Isa::avx2);
    const double dot_v = kernels::dot(a.data(), b.data(), n);
    const double sum_v = kernels::sum(a.data(), n);
    const double sumsq_v = kernels::sumsq(a.data(), n);
    const double dss_v = kernels::diff_sumsq(a.data(), b.data(), n);
    const double hyp_v = n ? kernels::hypot_sum(a.data(), b.data(), n) : 0.0;
    std::vector<double> st_v(n), ax_v = b, lc_v(n);
    kernels::soft_threshold(a.data(), 0.3, st_v.data(), n);
    kernels::axpy(0.77, a.data(), ax_v.data(), n);
    kernels::lincomb(1.3, a.data(), -0.2, b.data(), lc_v.data(), n);

    kernels::force(kernels::Isa::scalar);
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));
    CHECK(dot_v == doctest::Approx(kernels::dot(a.data(), b.data(), n)).epsilon(tol));
    CHECK(sum_v == doctest::Approx(kernels::sum(a.data(), n)).epsilon(tol));
    CHECK(sumsq_v == doctest::Approx(kernels::sumsq(a.data(), n)).epsilon(tol));
    CHECK(dss_v ==
          doctest::Approx(kernels::diff_sumsq(a.data(), b.data(), n)).epsilon(tol));
    if (n)
      CHECK(hyp_v ==
            doctest::Approx(kernels::hypot_sum(a.data(), b.data(), n)).epsilon(tol));
    std::vector<double> st_s(n), ax_s = b, lc_s(n);
    kernels::soft_threshold(a.data(), 0.3, st_s.data(), n);
    kernels::axpy(0.77, a.data(), ax_s.data(), n);
    kernels::lincomb(1.3, a.data(), -0.2, b.data(), lc_s.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(st_v[i] == doctest::Approx(st_s[i]).epsilon(1e-15));
      CHECK(ax_v[i] == doctest::Approx(ax_s[i]).epsilon(1e-15));
      CHECK(lc_v[i] == doctest::Approx(lc_s[i]).epsilon(1e-15));
    }
  }
  kernels::reset();
}

TEST_CASE("force and reset control the active ISA") {
  CHECK(kernels::force(kernels::Isa::scalar));
  CHECK(kernels::active() == kernels::Isa::scalar);
  if (kernels::force(kernels::Isa::avx2))
    CHECK(kernels::active() == kernels::Isa::avx2);
  kernels::reset();
  const auto detected = kernels::active();
  CHECK((detected == kernels::Isa::scalar || detected == kernels::Isa::avx2));
}
