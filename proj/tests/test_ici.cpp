#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <vector>

#include "thzbeam/ici.hpp"

using namespace thzbeam;

namespace {

// independent oracle: the leakage coefficients over one period are the DFT
// bins of the unit-modulus sequence e^{j 2 pi eps n / K} / K, so their
// magnitude multiset and the Parseval sum follow from the DFT directly
std::vector<double> dft_magnitudes(int k, double eps) {
  std::vector<double> mags(k);
  for (int i = 0; i < k; ++i) {
    cxd acc{0.0, 0.0};
    for (int n = 0; n < k; ++n)
      acc += std::polar(1.0 / k, 2.0 * std::numbers::pi * n * (eps - i) / k);
    mags[i] = std::abs(acc);
  }
  return mags;
}

}  // namespace

TEST_CASE("zero CFO is the unit impulse") {
  const IciProfile p = IciProfile::cfo(64, 0.0);
  CHECK(std::abs(p.at(0) - cxd{1.0, 0.0}) < 1e-12);
  for (int i = 1 - 64; i <= 63; ++i) {
    if (i == 0) continue;
    CHECK(std::abs(p.at(i)) < 1e-12);
  }
}

TEST_CASE("cfo leakage magnitude at the carrier") {
  const IciProfile p = IciProfile::cfo(64, 0.1);
  CHECK(std::abs(p.at(0)) == doctest::Approx(0.9836355933123416).epsilon(1e-10));
}

TEST_CASE("parseval over one period") {
  for (int k : {8, 16, 64})
    for (double eps : {0.05, 0.1, 0.3}) {
      const IciProfile p = IciProfile::cfo(k, eps);
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += std::norm(p.at(i));
      CAPTURE(k);
      CAPTURE(eps);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    }

  SUBCASE("magnitudes match the DFT-of-exponential oracle") {
    const int k = 8;
    const double eps = 0.3;
    const IciProfile p = IciProfile::cfo(k, eps);
    std::vector<double> got(k);
    for (int i = 0; i < k; ++i) got[i] = std::abs(p.at(i));
    std::vector<double> expected = dft_magnitudes(k, eps);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < k; ++i)
      CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("cfo reflection identity |S_i(eps)| = |S_{-i}(-eps)|") {
  const int k = 16;
  for (double eps : {0.1, 0.35, 0.7}) {
    const IciProfile pos = IciProfile::cfo(k, eps);
    const IciProfile neg = IciProfile::cfo(k, -eps);
    for (int i = 1; i < k; ++i)
      CHECK(std::abs(pos.at(i)) ==
            doctest::Approx(std::abs(neg.at(-i))).epsilon(1e-12));
  }
}

TEST_CASE("scalar profile") {
  SUBCASE("zero leakage equals none mode") {
    const IciProfile s = IciProfile::scalar(64, 0.0);
    const IciProfile n = IciProfile::none(64);
    for (int i = 1 - 64; i <= 63; ++i)
      CHECK(std::abs(s.at(i) - n.at(i)) == 0.0);
  }

  SUBCASE("uniform off-carrier weight") {
    const IciProfile p = IciProfile::scalar(64, 0.3);
    CHECK(p.weight(0) == 1.0);
    for (int i = 1 - 64; i <= 63; ++i) {
      if (i == 0) continue;
      CHECK(p.weight(i) == doctest::Approx(0.09).epsilon(1e-15));
    }
  }
}

TEST_CASE("none profile shape") {
  const IciProfile p = IciProfile::none(8);
  CHECK(p.at(0) == cxd{1.0, 0.0});
  for (int i = 1; i < 8; ++i) {
    CHECK(p.at(i) == cxd{0.0, 0.0});
    CHECK(p.at(-i) == cxd{0.0, 0.0});
  }
}

TEST_CASE("profile csv dump") {
  const IciProfile p = IciProfile::cfo(8, 0.1);
  p.write_csv("ici_dump_test.csv");
  std::ifstream in("ici_dump_test.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1 + 15);
}
