#include <doctest.h>

#include <cmath>

#include "thzbeam/mathcore.hpp"

using namespace thzbeam;

TEST_CASE("derive_stream determinism and distinctness") {
  RandomDraws a(derive_stream(7, 0));
  RandomDraws b(derive_stream(7, 0));
  bool identical = true;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() != b.next_u64()) identical = false;
  CHECK(identical);

  RandomDraws c(derive_stream(7, 0));
  RandomDraws d(derive_stream(7, 1));
  bool differs = false;
  for (int i = 0; i < 100; ++i)
    if (c.next_u64() != d.next_u64()) differs = true;
  CHECK(differs);
}

TEST_CASE("uniform draws stay in range") {
  RandomDraws rng(derive_stream(3, 3));
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sample_gmm statistics") {
  const int n = 100000;

  SUBCASE("single-component zero mean") {
    GmmParams p{1.0, 0.0, 0.1, 0.1};
    RandomDraws rng(derive_stream(11, 0));
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sample_gmm(p, rng);
    mean /= n;
    CHECK(std::abs(mean) < 0.005);
  }

  SUBCASE("equal components collapse to one Gaussian") {
    GmmParams p{0.5, 0.5, 0.2, 0.2};
    RandomDraws rng(derive_stream(12, 0));
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_gmm(p, rng);
      sq += x * x;
    }
    CHECK(sq / n == doctest::Approx(0.04).epsilon(0.1));
  }

  SUBCASE("mixture variance is the weighted component variance") {
    // 0.5 * 0.1^2 + 0.5 * 0.3^2 = 0.05
    GmmParams p{0.5, 0.5, 0.1, 0.3};
    RandomDraws rng(derive_stream(13, 0));
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_gmm(p, rng);
      sq += x * x;
    }
    CHECK(sq / n == doctest::Approx(0.05).epsilon(0.1));
  }

  SUBCASE("rejects non-positive sigma") {
    GmmParams p{0.5, 0.5, 0.0, 0.3};
    RandomDraws rng(derive_stream(14, 0));
    CHECK_THROWS(sample_gmm(p, rng));
  }
}

TEST_CASE("frobenius norm") {
  CHECK(ComplexMatrix(3, 2).frobenius_norm() == 0.0);
  CHECK(ComplexMatrix::identity(4).frobenius_norm() == doctest::Approx(2.0));
  ComplexMatrix m(1, 2);
  m(0, 0) = 3.0;
  m(0, 1) = cxd{0.0, 4.0};
  CHECK(m.frobenius_norm() == doctest::Approx(5.0));
}

namespace {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
  RandomDraws rng(derive_stream(seed, 0));
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = cxd{rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return m;
}

}  // namespace

TEST_CASE("right pseudo-inverse") {
  SUBCASE("identity") {
    const ComplexMatrix inv = right_pseudo_inverse(ComplexMatrix::identity(3));
    CHECK((inv - ComplexMatrix::identity(3)).frobenius_norm() < 1e-12);
  }

  SUBCASE("random wide matrix gives a right inverse") {
    const ComplexMatrix m = random_matrix(2, 3, 77);
    const ComplexMatrix prod = m * right_pseudo_inverse(m);
    CHECK((prod - ComplexMatrix::identity(2)).frobenius_norm() < 1e-10);
  }

  SUBCASE("duplicated rows are rejected") {
    ComplexMatrix m = random_matrix(2, 3, 78);
    for (std::size_t c = 0; c < 3; ++c) m(1, c) = m(0, c);
    CHECK_THROWS_AS((void)right_pseudo_inverse(m), RankDeficientError);
  }

  SUBCASE("residual property across sizes") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const std::size_t u = 2 + seed % 3;
      const ComplexMatrix m = random_matrix(u, u + 3, 100 + seed);
      const ComplexMatrix prod = m * right_pseudo_inverse(m);
      CHECK((prod - ComplexMatrix::identity(u)).frobenius_norm() <
            1e-8 * m.frobenius_norm());
    }
  }
}

TEST_CASE("matrix product against naive loops") {
  const ComplexMatrix a = random_matrix(3, 4, 200);
  const ComplexMatrix b = random_matrix(4, 5, 201);
  const ComplexMatrix c = a * b;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      cxd acc{0, 0};
      for (std::size_t k = 0; k < 4; ++k) acc += a(i, k) * b(k, j);
      CHECK(std::abs(c(i, j) - acc) < 1e-13);
    }
}
