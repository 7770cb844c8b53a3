#include <doctest.h>

#include <random>

#include "auctionab/alloc.hpp"

using namespace auctionab;

namespace {

PositionWeights random_weights(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& v : w) v = u(rng);
  std::sort(w.begin(), w.end(), std::greater<>());
  return PositionWeights(w);
}

}  // namespace

TEST_SUITE("alloc") {
  TEST_CASE("multi-unit allocation values") {
    CHECK(multi_unit_alloc(1, 3, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(multi_unit_alloc(5, 5, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(multi_unit_alloc(2, 3, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(multi_unit_alloc(1, 4, 0.0) == 0.0);
    CHECK(multi_unit_alloc(3, 4, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(multi_unit_alloc(0, 3, 0.5), ArgumentError);
    CHECK_THROWS_AS(multi_unit_alloc(4, 3, 0.5), ArgumentError);
    CHECK_THROWS_AS(multi_unit_alloc(1, 3, 1.5), ArgumentError);
  }

  TEST_CASE("multi-unit allocation derivatives") {
    CHECK(multi_unit_alloc_deriv(1, 2, 0.7) == doctest::Approx(1.0));
    CHECK(multi_unit_alloc_deriv(1, 4, 0.5) == doctest::Approx(0.75));
    CHECK(multi_unit_alloc_deriv(2, 3, 0.5) == doctest::Approx(1.0));
    // 0^0 = 1 at the endpoints.
    CHECK(multi_unit_alloc_deriv(1, 2, 0.0) == doctest::Approx(1.0));
    CHECK(multi_unit_alloc_deriv(2, 3, 1.0) == doctest::Approx(0.0));
    CHECK(multi_unit_alloc_deriv(2, 3, 0.0) == doctest::Approx(2.0));
  }

  TEST_CASE("derivative matches finite differences on a 1e4 grid") {
    constexpr int kPoints = 10000;
    constexpr double h = 1e-6;
    for (int n : {2, 3, 5, 8, 16, 33, 64}) {
      for (int k = 1; k <= n; ++k) {
        double worst = 0.0;
        for (int i = 0; i < kPoints; ++i) {
          const double q = static_cast<double>(i) / (kPoints - 1);
          double fd;
          if (q < h) {
            fd = (-3.0 * multi_unit_alloc(k, n, q) + 4.0 * multi_unit_alloc(k, n, q + h) - multi_unit_alloc(k, n, q + 2 * h)) / (2 * h);
          } else if (q > 1.0 - h) {
            fd = (3.0 * multi_unit_alloc(k, n, q) - 4.0 * multi_unit_alloc(k, n, q - h) + multi_unit_alloc(k, n, q - 2 * h)) / (2 * h);
          } else {
            fd = (multi_unit_alloc(k, n, q + h) - multi_unit_alloc(k, n, q - h)) / (2 * h);
          }
          worst = std::max(worst, std::abs(fd - multi_unit_alloc_deriv(k, n, q)));
        }
        INFO("n=" << n << " k=" << k);
        CHECK(worst <= 1e-6 * n);
      }
    }
  }

  TEST_CASE("log-space binomials agree with exact ones near the switch") {
    for (int k = 1; k <= 51; k += 5) {
      for (double q : {0.1, 0.5, 0.93}) {
        // n = 51 uses log-space; compare with the complement sum identity.
        const double direct = multi_unit_alloc(k, 51, q);
        const double lower = k > 1 ? multi_unit_alloc(k - 1, 51, q) : 0.0;
        const double term = detail::binomial(50, k - 1) * std::pow(q, 51 - k) * std::pow(1 - q, k - 1);
        CHECK(direct - lower == doctest::Approx(term).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("allocation is nondecreasing in k and in q") {
    for (int n : {2, 7, 40, 100}) {
      for (double q = 0.0; q <= 1.0; q += 0.01) {
        for (int k = 1; k < n; ++k) CHECK(multi_unit_alloc(k, n, q) <= multi_unit_alloc(k + 1, n, q) + 1e-14);
      }
    }
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
      const int n = 2 + static_cast<int>(rng() % 63);
      const auto rule = AllocationRule::position(random_weights(n, rng));
      double prev = -1.0;
      for (int i = 0; i <= 1000; ++i) {
        const double x = rule.x(i / 1000.0);
        CHECK(x >= prev - 1e-14);
        CHECK(x >= -1e-15);
        CHECK(x <= 1.0 + 1e-12);
        prev = x;
      }
    }
  }

  TEST_CASE("marginal weights") {
    const auto half = marginal_weights(PositionWeights({1.0, 0.5}));
    CHECK(half[0] == 0.0);
    CHECK(half[1] == 0.5);
    CHECK(half[2] == 0.5);

    const auto ku = marginal_weights(k_unit_weights(3, 6));
    for (int k = 0; k <= 6; ++k) CHECK(ku[k] == (k == 3 ? 1.0 : 0.0));

    const auto three = marginal_weights(PositionWeights({1.0, 0.5, 0.0}));
    CHECK(three.values().isApprox(Eigen::Vector4d(0.0, 0.5, 0.5, 0.0)));

    CHECK_THROWS_AS(PositionWeights({0.5, 0.7}), ArgumentError);
    CHECK_THROWS_AS(PositionWeights({1.2, 0.7}), ArgumentError);
    CHECK_THROWS_AS(PositionWeights({1.0}), ArgumentError);
    CHECK_THROWS_AS(MarginalWeights(Eigen::Vector3d(0.5, 0.6, 0.0)), ArgumentError);
  }

  TEST_CASE("cumulative sums invert the marginal weights") {
    // Dyadic weights make every difference and sum exact.
    const PositionWeights w({1.0, 0.75, 0.5, 0.5, 0.125, 0.0});
    CHECK(cumulative_weights(marginal_weights(w)) == w);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
      const auto r = random_weights(2 + static_cast<int>(rng() % 63), rng);
      const auto back = cumulative_weights(marginal_weights(r));
      for (int k = 1; k <= r.n(); ++k) CHECK(std::abs(back[k] - r[k]) <= 1e-15);
    }
  }

  TEST_CASE("position allocation") {
    const auto stair = AllocationRule::position(uniform_stair_weights(8));
    CHECK(stair.x(0.37) == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(stair.xprime(0.37) == doctest::Approx(1.0).epsilon(1e-13));
    for (double q : {0.0, 0.2, 0.9, 1.0}) {
      CHECK(position_alloc(k_unit_weights(3, 7), q) == doctest::Approx(multi_unit_alloc(3, 7, q)).epsilon(1e-14));
      CHECK(position_alloc_deriv(k_unit_weights(3, 7), q) == doctest::Approx(multi_unit_alloc_deriv(3, 7, q)).epsilon(1e-13));
    }
    CHECK(position_alloc(PositionWeights({1.0, 0.5}), 0.5) == doctest::Approx(0.75));
    const auto never = AllocationRule::position(never_serve_weights(5));
    CHECK(never.x(0.4) == 0.0);
    CHECK(never.xprime(0.4) == 0.0);
  }

  TEST_CASE("mixtures") {
    const auto a = AllocationRule::multi_unit(1, 5);
    const auto b = AllocationRule::position(uniform_stair_weights(5));
    for (double q = 0.0; q <= 1.0; q += 0.125) {
      CHECK(mixture(a, b, 0.0).x(q) == a.x(q));
      CHECK(mixture(a, b, 1.0).x(q) == b.x(q));
      const auto c = mixture(a, b, 0.3);
      CHECK(c.x(q) == doctest::Approx(0.7 * a.x(q) + 0.3 * b.x(q)));
      CHECK(c.xprime(q) == doctest::Approx(0.7 * a.xprime(q) + 0.3 * b.xprime(q)));
    }
    const auto a2 = AllocationRule::multi_unit(1, 2);
    const auto b2 = AllocationRule::position(uniform_stair_weights(2));
    CHECK(mixture(a2, b2, 0.5).x(0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(mixture(a, AllocationRule::multi_unit(1, 4), 0.5), ArgumentError);
    CHECK_THROWS_AS(mixture(a, b, 1.5), ArgumentError);
    // Flattened marginals of a mixture.
    const auto wbar = mixture(AllocationRule::multi_unit(1, 4), AllocationRule::multi_unit(3, 4), 0.25).marginals();
    CHECK(wbar[1] == doctest::Approx(0.75));
    CHECK(wbar[3] == doctest::Approx(0.25));
  }

  TEST_CASE("universal B weights") {
    CHECK(universal_b(4).values() == std::vector<double>{1.0, 0.5, 0.5, 0.0});
    CHECK(marginal_weights(universal_b(4)).values().isApprox((Eigen::VectorXd(5) << 0, 0.5, 0, 0.5, 0).finished()));
    CHECK(universal_b(3).values() == std::vector<double>{1.0, 0.5, 0.0});
    const auto m8 = marginal_weights(universal_b(8));
    CHECK(m8[1] == 0.5);
    CHECK(m8[7] == 0.5);
    CHECK_THROWS_AS(universal_b(2), ArgumentError);
  }

  TEST_CASE("maximum slope") {
    CHECK(max_slope(AllocationRule::multi_unit(1, 6), 101) == doctest::Approx(5.0));
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 2 + static_cast<int>(rng() % 63);
      CHECK(max_slope(AllocationRule::position(random_weights(n, rng)), 2001) <= n);
    }
    const double s = max_slope(AllocationRule::multi_unit(16, 32), 1001);
    CHECK(s >= 31.0 / std::sqrt(2.0 * M_PI * 15.0));
    CHECK(s <= 31.0 / std::sqrt(M_PI * 15.0));
    CHECK(s == doctest::Approx(4.478397890925407).epsilon(1e-9));
    CHECK_THROWS_AS(max_slope(AllocationRule::multi_unit(1, 6), 1), ArgumentError);
  }

  TEST_CASE("presets and descriptions round-trip") {
    CHECK(parse_weights("one-unit", 4) == k_unit_weights(1, 4));
    CHECK(parse_weights("k-unit:3", 4) == k_unit_weights(3, 4));
    CHECK(parse_weights("uniform-stair", 5) == uniform_stair_weights(5));
    CHECK(parse_weights("universal-b", 5) == universal_b(5));
    CHECK(parse_weights("1,0.5,0.25", 3).values() == std::vector<double>{1.0, 0.5, 0.25});
    CHECK_THROWS_AS(parse_weights("nonsense", 4), FormatError);
    CHECK_THROWS_AS(parse_weights("1,0.5", 3), FormatError);
    CHECK(parse_rule("k-unit:2", 5).multi_unit_count() == 2);

    const auto mix = mixture(AllocationRule::multi_unit(1, 6), AllocationRule::position(PositionWeights({1, 0.75, 0.5, 0.5, 0.25, 0})), 0.001);
    const auto back = parse_rule(mix.describe(), 6);
    CHECK(back.describe() == mix.describe());
    for (double q : {0.1, 0.6, 0.99}) CHECK(back.xprime(q) == doctest::Approx(mix.xprime(q)).epsilon(1e-14));
  }
}
