#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "ssimopt/metrics.hpp"
#include "ssimopt/pgm.hpp"

using namespace ssimopt;

namespace {

Vec random_vec(std::size_t n, std::uint64_t seed, double lo = -1.0,
               double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

Image random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Image img(rows, cols);
  img.data = random_vec(rows * cols, seed, 0.0, 1.0);
  return img;
}

}  // namespace

TEST_CASE("center removes the mean") {
  const Vec v{1.0, 2.0, 3.0, 6.0};
  auto [c, mean] = center(v);
  CHECK(mean == doctest::Approx(3.0));
  CHECK(c[0] == doctest::Approx(-2.0));
  CHECK(c[3] == doctest::Approx(3.0));
  double s = 0.0;
  for (double x : c) s += x;
  CHECK(std::fabs(s) < 1e-14);
  CHECK_THROWS_AS(center(Vec{}), std::invalid_argument);
}

TEST_CASE("ssim_full against hand-computed statistics") {
  // x = {1,2,3,4}, y = {2,2,4,4}: mu_x=2.5 mu_y=3, var_x=1.25 var_y=1,
  // cov=1
  const Vec x{1, 2, 3, 4}, y{2, 2, 4, 4};
  const auto k = SsimConstants::defaults();
  const double lum = (2 * 2.5 * 3 + k.c1) / (2.5 * 2.5 + 9 + k.c1);
  const double cs = (2 * 1 + k.c2) / (1.25 + 1 + k.c2);
  CHECK(ssim_full(x, y, k) == doctest::Approx(lum * cs).epsilon(1e-12));
  CHECK(ssim_full(x, x, k) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ssim_full(Vec{1.0}, Vec{1.0}, k), std::invalid_argument);
}

TEST_CASE("T is the exact complement of the simplified similarity") {
  for (int trial = 0; trial < 200; ++trial) {
    auto [x, mx] = center(random_vec(16, 1000 + trial));
    auto [y, my] = center(random_vec(16, 2000 + trial));
    const double t = dissim_T(x, y, 0.0);
    const double s = ssim_simplified(x, y, 0.0);
    CHECK(t + s == 1.0);  // exact by construction
    CHECK(t >= 0.0);
    CHECK(t <= 2.0);
  }
  // antipodal pair attains the upper bound
  const Vec a{1.0, -2.0, 0.5};
  Vec b = a;
  for (auto& v : b) v = -v;
  CHECK(dissim_T(a, b, 0.0) == doctest::Approx(2.0));
  CHECK(dissim_T(a, a, 0.0) == 0.0);
  CHECK_THROWS_AS(dissim_T(Vec{0.0}, Vec{0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("grad_T matches central differences") {
  const auto phi = make_dense([] {
    Mat m(5, 3);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& v : m.data()) v = d(rng);
    return m;
  }());
  const Vec y = random_vec(5, 17);
  const Vec x = random_vec(3, 18);
  const Vec g = grad_T(*phi, x, y, 1e-3);
  const double h = 1e-6;
  for (std::size_t i = 0; i < 3; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (dissim_T(phi->apply(xp), y, 1e-3) -
                       dissim_T(phi->apply(xm), y, 1e-3)) /
                      (2 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("block partition covers the image with truncated edges") {
  BlockScheme scheme{8, 8};
  const auto rects = block_rects(20, 13, scheme);
  CHECK(rects.size() == 3 * 2);
  std::size_t total = 0;
  for (const auto& r : rects) {
    CHECK(r.r0 + r.height <= 20);
    CHECK(r.c0 + r.width <= 13);
    total += r.size();
  }
  CHECK(total == 20 * 13);

  // extract/insert round trip
  Image img = random_image(20, 13, 4);
  Image copy(20, 13);
  for (const auto& r : rects) insert_block(copy, r, extract_block(img, r));
  CHECK(copy.data == img.data);
}

TEST_CASE("mssim equals the average of centered block similarities") {
  const auto k = SsimConstants::defaults();
  BlockScheme scheme{4, 4};
  Image x = random_image(8, 8, 21), y = random_image(8, 8, 22);
  double acc = 0.0;
  for (const auto& r : block_rects(8, 8, scheme)) {
    auto [xc, mx] = center(extract_block(x, r));
    auto [yc, my] = center(extract_block(y, r));
    acc += ssim_simplified(xc, yc, k.aggregated_c(r.size()));
  }
  CHECK(mssim(x, y, scheme, k) == doctest::Approx(acc / 4.0).epsilon(1e-14));
  CHECK(mssim(x, x, scheme, k) == doctest::Approx(1.0));
}

TEST_CASE("mt_fidelity averages raw-block dissimilarities") {
  const auto k = SsimConstants::defaults();
  BlockScheme scheme{4, 4};
  Image x = random_image(8, 4, 31), y = random_image(8, 4, 32);
  double acc = 0.0;
  for (const auto& r : block_rects(8, 4, scheme))
    acc += dissim_T(extract_block(x, r), extract_block(y, r),
                    k.aggregated_c(r.size()));
  CHECK(mt_fidelity(x, y, scheme, k) == doctest::Approx(acc / 2.0).epsilon(1e-14));
  // flat blocks fall back to the aggregated constant instead of 0/0
  Image z(8, 4, 0.0);
  CHECK_NOTHROW(mt_fidelity(z, z, scheme, k));
  CHECK(mt_fidelity(z, z, scheme, k) == 0.0);
}

TEST_CASE("ssim_map tiles per-block values") {
  const auto k = SsimConstants::defaults();
  BlockScheme scheme{4, 4};
  Image x = random_image(8, 8, 41), y = random_image(8, 8, 42);
  const Image map = ssim_map(x, y, scheme, k);
  for (const auto& r : block_rects(8, 8, scheme)) {
    const double v = map.at(r.r0, r.c0);
    for (std::size_t i = 0; i < r.height; ++i)
      for (std::size_t j = 0; j < r.width; ++j)
        CHECK(map.at(r.r0 + i, r.c0 + j) == v);
  }
  double mean = 0.0;
  for (const auto& r : block_rects(8, 8, scheme)) mean += map.at(r.r0, r.c0);
  CHECK(mssim(x, y, scheme, k) == doctest::Approx(mean / 4.0).epsilon(1e-14));
}

TEST_CASE("linear maps satisfy the adjoint identity") {
  struct Probe {
    MapPtr map;
    const char* name;
  };
  BlockScheme scheme{4, 4};
  const std::vector<Probe> probes{
      {make_identity(12), "identity"},
      {make_block_dct(8, 8, scheme), "block_dct"},
      {make_gaussian_blur(8, 6, 1.2), "gaussian_blur"},
      {make_blur_subsample(8, 8, 1.0, 2), "blur_subsample"},
      {make_difference_1d(9), "difference_1d"},
      {make_composed({make_gaussian_blur(8, 8, 0.8),
                      make_blur_subsample(8, 8, 1.0, 2)}),
       "composed"},
  };
  for (const auto& p : probes) {
    CAPTURE(p.name);
    const Vec x = random_vec(p.map->in_dim(), 51);
    const Vec y = random_vec(p.map->out_dim(), 52);
    CHECK(dot(p.map->apply(x), y) ==
          doctest::Approx(dot(x, p.map->adjoint(y))).epsilon(1e-11));
    // gram is adjoint-of-apply
    const Vec g = p.map->gram(x);
    const Vec g2 = p.map->adjoint(p.map->apply(x));
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(g[i] == doctest::Approx(g2[i]).epsilon(1e-12));
  }
}

TEST_CASE("block DCT is orthonormal") {
  BlockScheme scheme{4, 4};
  const auto dct = make_block_dct(8, 8, scheme);
  const Vec x = random_vec(64, 61);
  const Vec round_trip = dct->apply(dct->adjoint(x));
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(round_trip[i] == doctest::Approx(x[i]).epsilon(1e-12));
  CHECK(norm_sq(dct->adjoint(x)) == doctest::Approx(norm_sq(x)).epsilon(1e-12));
}

TEST_CASE("to_dense matches the matrix-free action") {
  const auto blur = make_gaussian_blur(5, 4, 0.9);
  const Mat m = to_dense(*blur);
  const Vec x = random_vec(20, 71);
  const Vec a = blur->apply(x);
  const Vec b = m.matvec(x);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
  // unit-sum rows: blurring a constant returns the constant
  const Vec ones(20, 1.0);
  for (double v : blur->apply(ones)) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("dense solvers agree with known answers") {
  Mat a(2, 2);
  a(0, 0) = 3;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  const Vec x = lu_solve(a, Vec{9, 8});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(3.0));

  Vec cg_x;
  cg_solve([&](const Vec& v) { return a.matvec(v); }, Vec{9, 8}, cg_x, 1e-12,
           100);
  CHECK(cg_x[0] == doctest::Approx(2.0));
  CHECK(cg_x[1] == doctest::Approx(3.0));

  // opnorm of a symmetric matrix is its largest eigenvalue magnitude
  const double lam = (5.0 + std::sqrt(5.0)) / 2.0;
  CHECK(opnorm2(a) == doctest::Approx(lam).epsilon(1e-6));
  CHECK(inv_opnorm2(a) ==
        doctest::Approx(1.0 / ((5.0 - std::sqrt(5.0)) / 2.0)).epsilon(1e-6));

  Mat s(2, 2);  // singular
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  CHECK_THROWS_AS(lu_solve(s, Vec{1, 1}), std::runtime_error);
}

TEST_CASE("psnr oracle") {
  Image a(2, 2, 0.5), b(2, 2, 0.5);
  b.at(0, 0) = 0.6;  // mse = 0.01/4
  CHECK(psnr(a, b) == doctest::Approx(-10.0 * std::log10(0.0025)).epsilon(1e-12));
}

TEST_CASE("pgm round trip and atomic write") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ssimopt_core_test";
  fs::create_directories(dir);
  const std::string path = (dir / "img.pgm").string();

  Image img = random_image(9, 7, 81);
  write_pgm(path, img);
  const Image back = read_pgm(path);
  REQUIRE(back.same_shape(img));
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(std::fabs(back.data[i] - img.data[i]) <= 0.5 / 255.0 + 1e-12);

  // quantization is stable: a second round trip is exact
  write_pgm(path, back);
  CHECK(read_pgm(path).data == back.data);

  // no stray temp files remain next to the output
  std::size_t entries = 0;
  for (auto const& e : fs::directory_iterator(dir)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);

  CHECK_THROWS(read_pgm((dir / "missing.pgm").string()));
  fs::remove_all(dir);
}
