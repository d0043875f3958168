#include <doctest.h>

#include <random>
#include <vector>

#include "thzbeam/kernels.hpp"

using thzbeam::simd::cxd;

namespace {

std::vector<cxd> random_vec(std::size_t n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<cxd> v(n);
  for (cxd& x : v) x = {dist(gen), dist(gen)};
  return v;
}

}  // namespace

TEST_CASE("scalar kernels basic identities") {
  const auto& k = thzbeam::simd::scalar_kernels();
  std::vector<cxd> a{{1, 0}, {0, 1}};
  std::vector<cxd> b{{2, 0}, {0, 2}};
  CHECK(k.dot(a.data(), b.data(), 2) == cxd{0, 0});  // 2 + (j)(2j) = 2 - 2
  CHECK(k.cdot(a.data(), b.data(), 2) == cxd{4, 0});
  CHECK(k.norm_sq(a.data(), 2) == doctest::Approx(2.0));
}

TEST_CASE("avx2 variants match scalar reference") {
  const auto* avx2 = thzbeam::simd::avx2_kernels();
  if (!avx2) return;  // host without AVX2
  const auto& ref = thzbeam::simd::scalar_kernels();
  // odd and even lengths to cover the remainder loops
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 33u, 256u}) {
    auto a = random_vec(n, 11 + static_cast<std::uint32_t>(n));
    auto b = random_vec(n, 29 + static_cast<std::uint32_t>(n));
    CAPTURE(n);
    CHECK(std::abs(avx2->dot(a.data(), b.data(), n) -
                   ref.dot(a.data(), b.data(), n)) < 1e-12 * (1.0 + double(n)));
    CHECK(std::abs(avx2->cdot(a.data(), b.data(), n) -
                   ref.cdot(a.data(), b.data(), n)) < 1e-12 * (1.0 + double(n)));
    CHECK(avx2->norm_sq(a.data(), n) ==
          doctest::Approx(ref.norm_sq(a.data(), n)).epsilon(1e-12));

    const cxd alpha{0.3, -0.7};
    auto y1 = random_vec(n, 5);
    auto y2 = y1;
    ref.axpy(alpha, a.data(), y1.data(), n);
    avx2->axpy(alpha, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(y1[i] - y2[i]) < 1e-13);
  }
}

TEST_CASE("avx2 matvec matches scalar") {
  const auto* avx2 = thzbeam::simd::avx2_kernels();
  if (!avx2) return;
  const std::size_t rows = 5, cols = 9;
  auto a = random_vec(rows * cols, 101);
  auto x = random_vec(cols, 102);
  std::vector<cxd> y1(rows), y2(rows);
  thzbeam::simd::scalar_kernels().matvec(a.data(), rows, cols, x.data(),
                                         y1.data());
  avx2->matvec(a.data(), rows, cols, x.data(), y2.data());
  for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(y1[r] - y2[r]) < 1e-12);
}

TEST_CASE("kernel selection override") {
  const auto& def = thzbeam::simd::active_kernels();
  thzbeam::simd::select_kernels(&thzbeam::simd::scalar_kernels());
  CHECK(std::string(thzbeam::simd::active_kernels().name) == "scalar");
  thzbeam::simd::select_kernels(nullptr);
  CHECK(std::string(thzbeam::simd::active_kernels().name) ==
        std::string(def.name));
}
