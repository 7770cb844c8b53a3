#include <doctest.h>

#include <cmath>

#include "auctionab/bounds.hpp"
#include "auctionab/harness.hpp"

using namespace auctionab;

TEST_SUITE("bounds") {
  TEST_CASE("single-unit bound arithmetic") {
    const auto x = AllocationRule::multi_unit(1, 2);
    const auto in = make_bound_inputs(x, x, 100);
    CHECK(in.sup_yprime == doctest::Approx(1.0));
    CHECK(in.ratio_up == doctest::Approx(1.0));
    CHECK(in.ratio_down == doctest::Approx(1.0));
    // Log argument floored at e.
    CHECK(bound_allpay_k(in) == doctest::Approx(4.0));
    CHECK(bound_general_y(in) == doctest::Approx(4.0 * std::sqrt(2.0 * std::log(2.0)) + 0.01));
    CHECK(bound_expected_value(in) == doctest::Approx(4.719640090061898));
  }

  TEST_CASE("closed-form bounds") {
    CHECK(bound_ideal_ab(1.0, 100, 1.0) == doctest::Approx(0.1));
    CHECK(bound_ideal_ab(0.01, 100, 1.0) == doctest::Approx(1.0));
    CHECK(bound_mixture(0.01, 10000, 8, 7.0) == doctest::Approx(1.9085018178235174));
    CHECK(bound_mixture_multiunit(0.01, 10000, 8, 7.0) == doctest::Approx(18.716912837470193));
    CHECK(bound_universal(std::exp(-1.0), 1600, 4) == doctest::Approx(20.0));
    CHECK(bound_universal(1.0, 1600, 4) == doctest::Approx(40.0 * 16 / 40.0));
    CHECK(bound_welfare(0.01, 10000, 8) == doctest::Approx(94.86321115227814));
    CHECK(bound_classifier(10000, 4, 0.1, 1.0, 0.05) == doctest::Approx(0.8995212603668259));
    CHECK(bound_classifier(10000, 4, 0.1, 1.0, 0.0) == 1.0);
    CHECK(bound_classifier_r(10000, 4, 0.1, 3, 0.05) == 1.0);
    CHECK(bound_classifier_r(1000000, 4, 0.1, 3, 0.05) == doctest::Approx(3 * std::exp(-1e6 * 0.0025 / (64 * std::log(120.0)))));
  }

  TEST_CASE("classifier bound squares when N doubles") {
    const double b1 = bound_classifier(5000, 4, 0.1, 1.5, 0.05);
    const double b2 = bound_classifier(10000, 4, 0.1, 1.5, 0.05);
    CHECK(b2 == doctest::Approx(b1 * b1).epsilon(1e-12));
    const double design = bound_classifier(10000, 8, 0.001, 1.0, 0.05);
    CHECK(design > 0.0);
    CHECK(design < 1.0);
  }

  TEST_CASE("bounds are nonnegative and nonincreasing in N") {
    const auto [a, b] = design_rules(1, 8);
    const auto c = mixture(a, b, 0.001);
    double prev_general = INFINITY, prev_k = INFINITY, prev_u = INFINITY, prev_w = INFINITY;
    for (std::size_t N : {10u, 100u, 1000u, 10000u, 100000u}) {
      const auto in = make_bound_inputs(c, AllocationRule::multi_unit(1, 8), N);
      const double g = bound_general_y(in);
      const double k = bound_allpay_k(in);
      const double u = bound_universal(0.001, N, 8);
      const double w = bound_welfare(0.001, N, 8);
      CHECK(g >= 0.0);
      CHECK(k >= 0.0);
      CHECK(g <= prev_general);
      CHECK(k <= prev_k);
      CHECK(u <= prev_u);
      CHECK(w <= prev_w);
      prev_general = g;
      prev_k = k;
      prev_u = u;
      prev_w = w;
    }
  }

  TEST_CASE("multi-unit bound is no larger than the general one") {
    for (int n : {3, 8, 32}) {
      for (int k = 1; k < n; ++k) {
        const auto y = AllocationRule::multi_unit(k, n);
        const auto x = mixture(AllocationRule::position(uniform_stair_weights(n)), y, 0.01);
        const auto in = make_bound_inputs(x, y, 1000);
        CHECK(bound_allpay_k(in) <= bound_general_y(in));
      }
    }
  }

  TEST_CASE("flat sources give infinite bounds") {
    const auto never = AllocationRule::position(never_serve_weights(3));
    const auto in = make_bound_inputs(never, AllocationRule::multi_unit(1, 3), 100);
    CHECK(std::isinf(in.ratio_down));
    CHECK(std::isinf(bound_general_y(in)));
    CHECK(std::isinf(bound_allpay_k(in)));
  }

  TEST_CASE("N to infinity") {
    CHECK(bound_mixture(0.01, 1000000000000ull, 8, 7.0) < 1e-3);
    CHECK(bound_welfare(0.01, 1000000000000ull, 8) < 1e-2);
    CHECK_THROWS_AS(bound_universal(0.0, 100, 4), ArgumentError);
  }
}
