#include <doctest.h>

#include <fstream>
#include <random>

#include "auctionab/dist.hpp"

using namespace auctionab;

TEST_SUITE("dist") {
  TEST_CASE("quantile values") {
    const auto u = ValueDistribution::uniform();
    const auto b = ValueDistribution::beta22();
    CHECK(quantile_value(u, 0.25) == 0.25);
    CHECK(quantile_value(b, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(quantile_value(b, 0.15625) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(quantile_value(b, 0.0) == 0.0);
    CHECK(quantile_value(b, 1.0) == 1.0);
    CHECK_THROWS_AS(b.value(1.2), ArgumentError);
  }

  TEST_CASE("Beta(2,2) quantile inverts the CDF") {
    const auto b = ValueDistribution::beta22();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double v = u(rng);
      CHECK(std::abs(b.value(b.cdf(v)) - v) <= 1e-10);
    }
  }

  TEST_CASE("tabulated distributions") {
    const auto t = ValueDistribution::tabulated({{0.0, 0.1}, {0.5, 0.3}, {1.0, 0.9}});
    CHECK(t.value(0.25) == doctest::Approx(0.2));
    CHECK(t.value(0.75) == doctest::Approx(0.6));
    CHECK(t.value_deriv(0.75) == doctest::Approx(1.2));
    CHECK(t.cdf(0.6) == doctest::Approx(0.75));
    CHECK_THROWS_AS(ValueDistribution::tabulated({{0.0, 0.5}, {1.0, 0.2}}), ArgumentError);
    CHECK_THROWS_AS(ValueDistribution::tabulated({{0.1, 0.1}, {1.0, 0.2}}), ArgumentError);

    const std::string path = "dist_test_table.csv";
    {
      std::ofstream out(path);
      out << "q,v\n0,0\n0.5,0.25\n1,1\n";
    }
    const auto loaded = distribution_by_name(path);
    CHECK(loaded.value(0.75) == doctest::Approx(0.625));
    CHECK_THROWS_AS(distribution_by_name("lognormal"), FormatError);
  }

  TEST_CASE("revenue curve") {
    const auto u = ValueDistribution::uniform();
    const auto b = ValueDistribution::beta22();
    CHECK(revenue_curve(u, 0.5) == 0.25);
    CHECK(revenue_curve(b, 1.0) == 0.0);
    CHECK(revenue_curve(u, 0.0) == 0.0);
    CHECK(revenue_curve(b, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(revenue_curve_deriv(u, 0.3) == doctest::Approx(1.0 - 2 * 0.3));
  }

  TEST_CASE("expected revenue of simple rules") {
    const QuantileGrid grid(10000);
    const auto u = ValueDistribution::uniform();
    const auto b = ValueDistribution::beta22();
    CHECK(true_revenue(u, AllocationRule::multi_unit(1, 2), grid) == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    for (int n : {2, 5, 9}) {
      CHECK(std::abs(true_revenue(b, AllocationRule::multi_unit(n, n), grid)) <= 1e-12);
      CHECK(true_revenue(b, AllocationRule::position(never_serve_weights(n)), grid) == 0.0);
    }
    // Quadrature oracle values.
    CHECK(true_revenue(b, AllocationRule::multi_unit(1, 4), grid) == doctest::Approx(0.14320679320587257).epsilon(1e-6));
    CHECK(true_revenue(b, AllocationRule::multi_unit(2, 4), grid) == doctest::Approx(0.21358641358502828).epsilon(1e-6));
    CHECK(true_revenue(b, AllocationRule::multi_unit(1, 2), grid) == doctest::Approx(0.18571428571846454).epsilon(1e-6));
  }

  TEST_CASE("both revenue forms agree") {
    const QuantileGrid grid(10000);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 2 + static_cast<int>(rng() % 15);
      std::vector<double> w(static_cast<std::size_t>(n));
      for (auto& v : w) v = u(rng);
      std::sort(w.begin(), w.end(), std::greater<>());
      const auto rule = AllocationRule::position(PositionWeights(w));
      for (const auto& dist : {ValueDistribution::uniform(), ValueDistribution::beta22()}) {
        INFO("n=" << n << " dist=" << dist.name());
        CHECK(std::abs(true_revenue(dist, rule, grid) - true_revenue_by_parts(dist, rule, grid)) <= 1e-4);
      }
    }
  }

  TEST_CASE("revenue equivalence across marginal weights") {
    const QuantileGrid grid(10000);
    const auto b = ValueDistribution::beta22();
    const PositionWeights w({1.0, 0.8, 0.55, 0.3, 0.3, 0.1});
    const auto wbar = marginal_weights(w);
    double sum = 0.0;
    for (int k = 1; k <= w.n(); ++k) sum += wbar[k] * true_revenue(b, AllocationRule::multi_unit(k, w.n()), grid);
    CHECK(std::abs(true_revenue(b, AllocationRule::position(w), grid) - sum) <= 1e-6);
  }

  TEST_CASE("expected value and welfare") {
    const QuantileGrid grid(10000);
    CHECK(expected_value(ValueDistribution::uniform(), grid) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(expected_value(ValueDistribution::beta22(), grid) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(expected_value(ValueDistribution::constant(0.3), grid) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(true_welfare(ValueDistribution::beta22(), AllocationRule::position(uniform_stair_weights(8)), grid) ==
          doctest::Approx(11.0 / 35.0).epsilon(1e-7));
  }

  TEST_CASE("order statistics") {
    const auto u2 = order_statistic_means(ValueDistribution::uniform(), 2, 200000, 1);
    CHECK(std::abs(u2.mean[0] - 2.0 / 3.0) <= 4 * u2.std_error[0]);
    CHECK(std::abs(u2.mean[1] - 1.0 / 3.0) <= 4 * u2.std_error[1]);
    const auto u3 = order_statistic_means(ValueDistribution::uniform(), 3, 200000, 2);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(u3.mean[k] - (3.0 - k) / 4.0) <= 4 * u3.std_error[k]);
    const auto c = order_statistic_means(ValueDistribution::constant(0.4), 5, 10000, 3);
    for (int k = 0; k < 5; ++k) CHECK(c.mean[k] == doctest::Approx(0.4));
    const auto again = order_statistic_means(ValueDistribution::uniform(), 3, 200000, 2);
    CHECK(again.mean == u3.mean);
  }

  TEST_CASE("multi-unit revenue matches order statistics") {
    const QuantileGrid grid(10000);
    const auto b = ValueDistribution::beta22();
    for (int n = 2; n <= 6; ++n) {
      const auto os = order_statistic_means(b, n, 100000, 100 + n);
      for (int k = 1; k < n; ++k) {
        const double lhs = n * true_revenue(b, AllocationRule::multi_unit(k, n), grid);
        INFO("n=" << n << " k=" << k);
        CHECK(std::abs(lhs - k * os.mean[k]) <= 3.0 * k * os.std_error[k]);
      }
    }
  }
}
