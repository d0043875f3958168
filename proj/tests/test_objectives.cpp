#include <doctest.h>

#include <cmath>

#include "thzbeam/objectives.hpp"

using namespace thzbeam;

namespace {

ChannelRealization make_channel(int users, int nt, int k_count) {
  ChannelRealization h;
  h.config.num_users = users;
  h.config.tx_antennas = nt;
  h.config.num_subcarriers = k_count;
  h.slices.assign(k_count, ComplexMatrix(users, nt));
  return h;
}

ChannelRealization random_channel(int users, int nt, int k_count,
                                  std::uint64_t seed) {
  ChannelRealization h = make_channel(users, nt, k_count);
  RandomDraws rng(derive_stream(seed, 0));
  for (int k = 0; k < k_count; ++k)
    for (int q = 0; q < users; ++q)
      for (int n = 0; n < nt; ++n)
        h.at(k)(q, n) = cxd{rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return h;
}

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
  RandomDraws rng(derive_stream(seed, 1));
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = cxd{rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return m;
}

DigitalStack random_stack(int k_count, std::size_t rows, std::size_t cols,
                          std::uint64_t seed) {
  DigitalStack f;
  for (int k = 0; k < k_count; ++k)
    f.push_back(random_matrix(rows, cols, seed + 100 * k));
  return f;
}

// ---- naive reference implementations, written independently as straight
// ---- translations of the rate/interference definitions

cxd naive_link(const ChannelRealization& h, const ComplexMatrix& w,
               const DigitalStack& f, int q, int u, int k) {
  cxd acc{0, 0};
  for (std::size_t n = 0; n < w.rows(); ++n)
    for (std::size_t m = 0; m < w.cols(); ++m)
      acc += h.at(k)(q, n) * w(n, m) * f[k](m, u);
  return acc;
}

double naive_cell_interference(const ChannelRealization& h,
                               const ComplexMatrix& w, const DigitalStack& f,
                               const IciProfile& ici, int q, int k) {
  double acc = 0.0;
  for (int u = 0; u < h.num_users(); ++u)
    for (int i = 0; i < h.num_subcarriers(); ++i) {
      if (u == q && i == k) continue;
      acc += ici.weight(i - k) * std::norm(naive_link(h, w, f, q, u, i));
    }
  return acc;
}

double naive_rate(const ChannelRealization& h, const ComplexMatrix& w,
                  const DigitalStack& f, const IciProfile& ici, double psi,
                  int q, int k) {
  const double signal = ici.weight(0) * std::norm(naive_link(h, w, f, q, q, k));
  return std::log2(1.0 + signal / (naive_cell_interference(h, w, f, ici, q, k) + psi));
}

double naive_sum_rate(const ChannelRealization& h, const ComplexMatrix& w,
                      const DigitalStack& f, const IciProfile& ici,
                      double psi) {
  double acc = 0.0;
  for (int q = 0; q < h.num_users(); ++q)
    for (int k = 0; k < h.num_subcarriers(); ++k)
      acc += naive_rate(h, w, f, ici, psi, q, k);
  return acc / h.num_users();
}

double naive_total_interference(const ChannelRealization& h,
                                const ComplexMatrix& w, const DigitalStack& f,
                                const IciProfile& ici) {
  double acc = 0.0;
  for (int q = 0; q < h.num_users(); ++q)
    for (int k = 0; k < h.num_subcarriers(); ++k)
      acc += naive_cell_interference(h, w, f, ici, q, k);
  return acc;
}

}  // namespace

TEST_CASE("per-user rate hand examples") {
  SUBCASE("all-scalar instance with unit everything") {
    ChannelRealization h = make_channel(1, 1, 1);
    h.at(0)(0, 0) = 1.0;
    ComplexMatrix w(1, 1);
    w(0, 0) = 1.0;
    DigitalStack f{ComplexMatrix(1, 1)};
    f[0](0, 0) = 1.0;
    const double rate =
        per_user_rate(h, w, f, IciProfile::none(1), 1.0, 0, 0);
    CHECK(rate == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("impulse profile leaves only noise in the denominator") {
    ChannelRealization h = random_channel(1, 4, 3, 17);
    const ComplexMatrix w = random_matrix(4, 2, 18);
    const DigitalStack f = random_stack(3, 2, 1, 19);
    const double psi = 0.25;
    const auto links = link_matrix(h, w, f);
    for (int k = 0; k < 3; ++k) {
      const double expected =
          std::log2(1.0 + std::norm(links[k](0, 0)) / psi);
      CHECK(per_user_rate(h, w, f, IciProfile::none(3), psi, 0, k) ==
            doctest::Approx(expected).epsilon(1e-13));
    }
  }

  SUBCASE("two-subcarrier scalar leakage") {
    // |h[k] W f[k]|^2 = 1 on both subcarriers, S = 0.1, psi = 0.1
    ChannelRealization h = make_channel(1, 1, 2);
    h.at(0)(0, 0) = 1.0;
    h.at(1)(0, 0) = 1.0;
    ComplexMatrix w(1, 1);
    w(0, 0) = 1.0;
    DigitalStack f(2, ComplexMatrix(1, 1));
    f[0](0, 0) = 1.0;
    f[1](0, 0) = 1.0;
    const double rate =
        per_user_rate(h, w, f, IciProfile::scalar(2, 0.1), 0.1, 0, 0);
    CHECK(rate == doctest::Approx(3.334984247712809).epsilon(1e-12));
  }
}

TEST_CASE("sum rate") {
  SUBCASE("zero channel gives zero rate") {
    ChannelRealization h = make_channel(2, 4, 2);
    const ComplexMatrix w = random_matrix(4, 2, 21);
    const DigitalStack f = random_stack(2, 2, 2, 22);
    CHECK(sum_rate(h, w, f, IciProfile::scalar(2, 0.2), 0.5) == 0.0);
  }

  SUBCASE("user-symmetric instance collapses to the per-user sum") {
    ChannelRealization h = make_channel(2, 3, 2);
    const ChannelRealization base = random_channel(1, 3, 2, 23);
    for (int k = 0; k < 2; ++k)
      for (int n = 0; n < 3; ++n) {
        h.at(k)(0, n) = base.at(k)(0, n);
        h.at(k)(1, n) = base.at(k)(0, n);
      }
    ComplexMatrix w = random_matrix(3, 2, 24);
    DigitalStack f(2, ComplexMatrix(2, 2));
    const ComplexMatrix col = random_matrix(2, 1, 25);
    for (int k = 0; k < 2; ++k)
      for (int m = 0; m < 2; ++m) {
        f[k](m, 0) = col(m, 0);
        f[k](m, 1) = col(m, 0);
      }
    const IciProfile ici = IciProfile::scalar(2, 0.15);
    const double total = sum_rate(h, w, f, ici, 0.3);
    double user0 = 0.0;
    for (int k = 0; k < 2; ++k)
      user0 += per_user_rate(h, w, f, ici, 0.3, 0, k);
    CHECK(total == doctest::Approx(user0).epsilon(1e-13));
  }

  SUBCASE("invariant under user relabeling") {
    ChannelRealization h = random_channel(3, 4, 2, 31);
    const ComplexMatrix w = random_matrix(4, 3, 32);
    const DigitalStack f = random_stack(2, 3, 3, 33);
    const IciProfile ici = IciProfile::scalar(2, 0.2);
    const double before = sum_rate(h, w, f, ici, 0.4);

    // swap users 0 and 2 in H rows and F columns
    ChannelRealization hp = h;
    DigitalStack fp = f;
    for (int k = 0; k < 2; ++k) {
      for (int n = 0; n < 4; ++n)
        std::swap(hp.at(k)(0, n), hp.at(k)(2, n));
      for (int m = 0; m < 3; ++m) std::swap(fp[k](m, 0), fp[k](m, 2));
    }
    CHECK(sum_rate(hp, w, fp, ici, 0.4) ==
          doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("interference power") {
  SUBCASE("impulse profile with one user is zero") {
    ChannelRealization h = random_channel(1, 4, 3, 41);
    const ComplexMatrix w = random_matrix(4, 2, 42);
    const DigitalStack f = random_stack(3, 2, 1, 43);
    CHECK(interference_power(h, w, f, IciProfile::none(3)) == 0.0);
  }

  SUBCASE("unit-gain two-subcarrier counting") {
    ChannelRealization h = make_channel(1, 1, 2);
    h.at(0)(0, 0) = 1.0;
    h.at(1)(0, 0) = 1.0;
    ComplexMatrix w(1, 1);
    w(0, 0) = 1.0;
    DigitalStack f(2, ComplexMatrix(1, 1));
    f[0](0, 0) = 1.0;
    f[1](0, 0) = 1.0;
    const double s = 0.25;
    CHECK(interference_power(h, w, f, IciProfile::scalar(2, s)) ==
          doctest::Approx(2.0 * s * s).epsilon(1e-15));
  }

  SUBCASE("strictly increasing in the scalar leakage") {
    ChannelRealization h = random_channel(2, 4, 3, 44);
    const ComplexMatrix w = random_matrix(4, 2, 45);
    const DigitalStack f = random_stack(3, 2, 2, 46);
    CHECK(interference_power(h, w, f, IciProfile::scalar(3, 0.1)) <
          interference_power(h, w, f, IciProfile::scalar(3, 0.3)));
  }
}

TEST_CASE("library matches the naive reference bit-for-bit scale") {
  for (std::uint64_t seed = 60; seed < 66; ++seed) {
    const int users = 1 + int(seed % 2);
    const int k_count = 2 + int(seed % 3);
    ChannelRealization h = random_channel(users, 4, k_count, seed);
    const ComplexMatrix w = random_matrix(4, 2, seed + 7);
    const DigitalStack f = random_stack(k_count, 2, users, seed + 13);
    const IciProfile ici = IciProfile::scalar(k_count, 0.2);
    const double psi = 0.3;
    CAPTURE(seed);
    CHECK(std::abs(sum_rate(h, w, f, ici, psi) -
                   naive_sum_rate(h, w, f, ici, psi)) < 1e-12);
    CHECK(std::abs(interference_power(h, w, f, ici) -
                   naive_total_interference(h, w, f, ici)) < 1e-12);
    for (int q = 0; q < users; ++q)
      CHECK(std::abs(per_user_rate(h, w, f, ici, psi, q, 0) -
                     naive_rate(h, w, f, ici, psi, q, 0)) < 1e-12);
  }
}

TEST_CASE("interference gradient") {
  SUBCASE("vanishes when all links vanish") {
    ChannelRealization h = random_channel(2, 4, 2, 71);
    const ComplexMatrix w = random_matrix(4, 2, 72);
    DigitalStack f(2, ComplexMatrix(2, 2));  // zero digital precoder
    const ComplexMatrix g =
        grad_interference(h, w, f, IciProfile::scalar(2, 0.3));
    CHECK(g.frobenius_norm() == 0.0);
  }

  SUBCASE("matches central finite differences") {
    for (std::uint64_t seed = 80; seed < 84; ++seed) {
      ChannelRealization h = random_channel(2, 4, 3, seed);
      const ComplexMatrix w = random_matrix(4, 2, seed + 5);
      const DigitalStack f = random_stack(3, 2, 2, seed + 9);
      const IciProfile ici = IciProfile::scalar(3, 0.25);
      const ComplexMatrix analytic = grad_interference(h, w, f, ici);
      ComplexMatrix fd = grad_objective_fd(ObjectiveKind::NegativeInterference,
                                           h, w, f, ici, 1.0, 1e-5);
      double max_rel = 0.0;
      for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t m = 0; m < 2; ++m) {
          const double denom = std::max(std::abs(analytic(n, m)), 1e-9);
          max_rel = std::max(max_rel,
                             std::abs(analytic(n, m) + fd(n, m)) / denom);
        }
      CAPTURE(seed);
      CHECK(max_rel < 1e-6);
    }
  }

  SUBCASE("quadratic homogeneity in the leakage magnitude") {
    ChannelRealization h = random_channel(2, 4, 2, 91);
    const ComplexMatrix w = random_matrix(4, 2, 92);
    const DigitalStack f = random_stack(2, 2, 2, 93);
    // scaling every off-carrier |S| by 2 scales off-carrier weights by 4;
    // isolate the leakage terms by differencing against the impulse part
    const ComplexMatrix g1 = grad_interference(h, w, f, IciProfile::scalar(2, 0.1));
    const ComplexMatrix g2 = grad_interference(h, w, f, IciProfile::scalar(2, 0.2));
    const ComplexMatrix g0 = grad_interference(h, w, f, IciProfile::scalar(2, 0.0));
    const ComplexMatrix lhs = (g2 - g0);
    const ComplexMatrix rhs = (g1 - g0) * cxd{4.0, 0.0};
    CHECK((lhs - rhs).frobenius_norm() < 1e-12 * (1.0 + rhs.frobenius_norm()));
  }
}

TEST_CASE("finite-difference gradient conventions") {
  SUBCASE("constant objective has zero gradient") {
    ChannelRealization h = make_channel(1, 4, 2);  // zero channel
    const ComplexMatrix w = random_matrix(4, 2, 95);
    const DigitalStack f = random_stack(2, 2, 1, 96);
    const ComplexMatrix g =
        grad_objective_fd(ObjectiveKind::SumRateWithIci, h, w, f,
                          IciProfile::scalar(2, 0.2), 1.0, 1e-5);
    CHECK(g.frobenius_norm() < 1e-9);
  }

  SUBCASE("|x|^2 probe recovers x (Wirtinger convention)") {
    // with h = [1, 0]^T users and f = [1, 1], total interference = |W|^2
    ChannelRealization h = make_channel(2, 1, 1);
    h.at(0)(0, 0) = 1.0;
    ComplexMatrix w(1, 1);
    w(0, 0) = cxd{0.3, -0.4};
    DigitalStack f{ComplexMatrix(1, 2)};
    f[0](0, 0) = 1.0;
    f[0](0, 1) = 1.0;
    const IciProfile ici = IciProfile::none(1);
    CHECK(interference_power(h, w, f, ici) ==
          doctest::Approx(std::norm(w(0, 0))).epsilon(1e-14));
    const ComplexMatrix g = grad_objective_fd(
        ObjectiveKind::NegativeInterference, h, w, f, ici, 1.0, 1e-6);
    CHECK(std::abs(-g(0, 0) - w(0, 0)) < 1e-8);
  }

  SUBCASE("rejects non-positive step") {
    ChannelRealization h = random_channel(1, 4, 1, 97);
    const ComplexMatrix w = random_matrix(4, 1, 98);
    const DigitalStack f = random_stack(1, 1, 1, 99);
    CHECK_THROWS(grad_objective_fd(ObjectiveKind::SumRateWithIci, h, w, f,
                                   IciProfile::none(1), 1.0, 0.0));
  }
}

TEST_CASE("interference plus noise power") {
  ChannelRealization h = random_channel(2, 4, 3, 101);
  const ComplexMatrix w = random_matrix(4, 2, 102);
  const DigitalStack f = random_stack(3, 2, 2, 103);
  const IciProfile ici = IciProfile::scalar(3, 0.2);

  SUBCASE("zero noise weight reduces to the leaked power") {
    CHECK(interference_noise_power(h, w, f, ici, 0.0) ==
          doctest::Approx(interference_power(h, w, f, ici)).epsilon(1e-14));
  }

  SUBCASE("noise term is psi times the hybrid power") {
    double hybrid_power = 0.0;
    for (int k = 0; k < 3; ++k) {
      const ComplexMatrix p = w * f[k];
      for (std::size_t i = 0; i < p.size(); ++i)
        hybrid_power += std::norm(p.data()[i]);
    }
    const double psi = 0.7;
    CHECK(interference_noise_power(h, w, f, ici, psi) ==
          doctest::Approx(interference_power(h, w, f, ici) +
                          psi * hybrid_power)
              .epsilon(1e-13));
  }

  SUBCASE("gradient matches central finite differences") {
    const double psi = 0.4;
    const ComplexMatrix analytic = grad_interference_noise(h, w, f, ici, psi);
    ComplexMatrix probe = w;
    double worst = 0.0;
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t m = 0; m < 2; ++m) {
        const cxd c0 = probe(n, m);
        const double step = 1e-6 * std::max(std::abs(c0), 1.0);
        auto ev = [&](cxd v) {
          probe(n, m) = v;
          const double val = interference_noise_power(h, probe, f, ici, psi);
          probe(n, m) = c0;
          return val;
        };
        const double d_re =
            (ev(c0 + cxd{step, 0}) - ev(c0 - cxd{step, 0})) / (2 * step);
        const double d_im =
            (ev(c0 + cxd{0, step}) - ev(c0 - cxd{0, step})) / (2 * step);
        const cxd fd = cxd{d_re, d_im} * 0.5;
        worst = std::max(worst, std::abs(fd - analytic(n, m)));
      }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("zero-leakage profiles give identical rates") {
  ChannelRealization h = random_channel(2, 4, 4, 55);
  const ComplexMatrix w = random_matrix(4, 2, 56);
  const DigitalStack f = random_stack(4, 2, 2, 57);
  const double psi = 0.2;
  const double none = sum_rate(h, w, f, IciProfile::none(4), psi);
  const double cfo0 = sum_rate(h, w, f, IciProfile::cfo(4, 0.0), psi);
  const double scalar0 = sum_rate(h, w, f, IciProfile::scalar(4, 0.0), psi);
  CHECK(std::abs(none - cfo0) < 1e-12);
  CHECK(std::abs(none - scalar0) < 1e-12);
}

TEST_CASE("noise model conversion") {
  CHECK(NoiseModel::from_snr_db(10.0).psi == doctest::Approx(0.1));
  CHECK(NoiseModel{0.01}.snr_db() == doctest::Approx(20.0));
}
