#include <doctest.h>

#include <sstream>

#include "auctionab/equil.hpp"
#include "auctionab/harness.hpp"

using namespace auctionab;

namespace {

const QuantileGrid kGrid(10000);

BidCurve manual_curve(PaymentFormat format, const AllocationRule& rule, const QuantileGrid& grid, double (*b)(double)) {
  Eigen::ArrayXd bids(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) bids[i] = b(grid[i]);
  return BidCurve{format, rule, grid, bids};
}

double max_interior_error(const InvertedValues& inv, const ValueDistribution& dist) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < inv.q.size(); ++i) {
    if (inv.q[i] < 0.01 || inv.q[i] > 0.99 || !inv.defined[i]) continue;
    worst = std::max(worst, std::abs(inv.value[i] - dist.value(inv.q[i])));
  }
  return worst;
}

}  // namespace

TEST_SUITE("equil") {
  TEST_CASE("all-pay bid curves") {
    const auto u = ValueDistribution::uniform();
    const auto stair = AllocationRule::position(uniform_stair_weights(5));
    const auto c = allpay_bid_curve(u, stair, kGrid);
    CHECK(c.bids[6000] == doctest::Approx(0.18).epsilon(1e-10));
    CHECK(c.bids[0] == 0.0);
    const auto never = allpay_bid_curve(u, AllocationRule::position(never_serve_weights(3)), kGrid);
    CHECK((never.bids == 0.0).all());
    // Two uniform bidders: b(1) = int_0^1 t dt = 1/2, and total revenue
    // n E[b] = 1/3.
    const auto two = allpay_bid_curve(u, AllocationRule::multi_unit(1, 2), kGrid);
    CHECK(two.bids[10000] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(2.0 * trapezoid(two.bids, kGrid) == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  }

  TEST_CASE("first-price bid curves") {
    const auto u = ValueDistribution::uniform();
    const auto c = firstprice_bid_curve(u, AllocationRule::multi_unit(1, 2), kGrid);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < kGrid.size(); ++i) worst = std::max(worst, std::abs(c.bids[i] - kGrid[i] / 2.0));
    CHECK(worst <= 1e-4);

    const auto k = ValueDistribution::constant(0.6);
    const auto kc = firstprice_bid_curve(k, AllocationRule::position(universal_b(5)), kGrid);
    CHECK((kc.bids <= 0.6).all());

    CHECK_THROWS_AS(firstprice_bid_curve(u, AllocationRule::position(never_serve_weights(3)), kGrid), DegenerateError);
  }

  TEST_CASE("bid curves are monotone and never overbid") {
    for (const auto& dist : {ValueDistribution::uniform(), ValueDistribution::beta22()}) {
      for (int design : {1, 2, 3}) {
        for (int n : {4, 32, 256}) {
          const auto [a, b] = design_rules(design, n);
          const auto rule = mixture(a, b, 0.001);
          const auto ap = allpay_bid_curve(dist, rule, kGrid);
          const auto fp = firstprice_bid_curve(dist, rule, kGrid);
          const Eigen::ArrayXd v = dist.value(kGrid.points());
          for (Eigen::Index i = 1; i < kGrid.size(); ++i) {
            REQUIRE(ap.bids[i] >= ap.bids[i - 1]);
            REQUIRE(fp.bids[i] >= fp.bids[i - 1]);
          }
          CHECK((fp.bids <= v).all());
        }
      }
    }
  }

  TEST_CASE("all-pay bids average to the revenue") {
    const auto dist = ValueDistribution::beta22();
    for (int design : {1, 2, 3}) {
      const auto [a, b] = design_rules(design, 8);
      const auto rule = mixture(a, b, 0.1);
      const auto curve = allpay_bid_curve(dist, rule, kGrid);
      CHECK(trapezoid(curve.bids, kGrid) == doctest::Approx(true_revenue(dist, rule, kGrid)).epsilon(1e-5));
    }
  }

  TEST_CASE("analytic inversions") {
    const auto x = AllocationRule::multi_unit(1, 2);  // x(q) = q
    const auto ap = invert_allpay(manual_curve(PaymentFormat::AllPay, x, kGrid, [](double q) { return q * q / 2; }), x);
    const auto fp = invert_firstprice(manual_curve(PaymentFormat::FirstPrice, x, kGrid, [](double q) { return q / 2; }), x);
    const auto zero = invert_allpay(manual_curve(PaymentFormat::AllPay, x, kGrid, [](double) { return 0.0; }), x);
    const auto flat = invert_firstprice(manual_curve(PaymentFormat::FirstPrice, x, kGrid, [](double) { return 0.3; }), x);
    for (Eigen::Index i = 0; i < kGrid.size(); ++i) {
      CHECK(ap.value[i] == doctest::Approx(kGrid[i]).epsilon(1e-9));
      CHECK(fp.value[i] == doctest::Approx(kGrid[i]).epsilon(1e-9));
      CHECK(zero.value[i] == 0.0);
      CHECK(flat.value[i] == doctest::Approx(0.3));
    }
    CHECK_THROWS_AS(invert_firstprice(manual_curve(PaymentFormat::AllPay, x, kGrid, [](double) { return 0.0; }), x), ArgumentError);
    CHECK_THROWS_AS(invert_allpay(manual_curve(PaymentFormat::FirstPrice, x, kGrid, [](double) { return 0.0; }), x), ArgumentError);
  }

  TEST_CASE("inversion reports gaps where the slope vanishes") {
    const auto x = AllocationRule::multi_unit(1, 40);  // x' = 39 q^38
    const auto curve = allpay_bid_curve(ValueDistribution::uniform(), x, kGrid);
    const auto inv = invert_allpay(curve, x);
    CHECK(inv.gap_count() > 0);
    CHECK_FALSE(inv.defined[0]);
    CHECK(std::isnan(inv.value[0]));
    CHECK(inv.defined[kGrid.size() - 1]);
  }

  TEST_CASE("round trip on Designs 1-3") {
    for (const auto& dist : {ValueDistribution::uniform(), ValueDistribution::beta22()}) {
      for (int design : {1, 2, 3}) {
        const auto [a, b] = design_rules(design, 8);
        const auto rule = mixture(a, b, 0.001);
        INFO("dist=" << dist.name() << " design=" << design);
        CHECK(max_interior_error(invert_allpay(allpay_bid_curve(dist, rule, kGrid), rule), dist) <= 5e-3);
        CHECK(max_interior_error(invert_firstprice(firstprice_bid_curve(dist, rule, kGrid), rule), dist) <= 5e-3);
      }
    }
  }

  TEST_CASE("sampling") {
    const auto curve = allpay_bid_curve(ValueDistribution::beta22(), AllocationRule::position(uniform_stair_weights(4)), kGrid);
    const auto one = sample_bids(curve, 1, 5);
    REQUIRE(one.size() == 1);
    CHECK((curve.bids == one.bids()[0]).any());

    const BidCurve flat{PaymentFormat::AllPay, curve.rule, kGrid, Eigen::ArrayXd::Constant(kGrid.size(), 0.25)};
    CHECK((sample_bids(flat, 100, 1).bids().array() == 0.25).all());

    const auto s1 = sample_bids(curve, 5000, 42);
    const auto s2 = sample_bids(curve, 5000, 42);
    CHECK(s1.bids() == s2.bids());
    CHECK(s1.bids() != sample_bids(curve, 5000, 43).bids());
    for (Eigen::Index i = 1; i < s1.size(); ++i) REQUIRE(s1.bids()[i] >= s1.bids()[i - 1]);

    CHECK(ks_distance(sample_bids(curve, 1000000, 7), curve) <= 2e-3);
    CHECK(std::isfinite(weighted_bid_error(s1, curve)));
  }

  TEST_CASE("empirical bid function") {
    const BidSample s(PaymentFormat::AllPay, AllocationRule::multi_unit(1, 2), std::vector<double>{0.9, 0.2, 0.5});
    CHECK(empirical_bid_function(s, 0.4) == 0.5);
    CHECK(empirical_bid_function(s, 0.0) == 0.2);
    CHECK(empirical_bid_function(s, 1.0) == 0.9);
    CHECK(empirical_bid_function(s, 0.7) == 0.9);
    CHECK_THROWS_AS(empirical_bid_function(s, -0.1), ArgumentError);
    CHECK_THROWS_AS(BidSample(PaymentFormat::AllPay, AllocationRule::multi_unit(1, 2), std::vector<double>{}), ArgumentError);
    CHECK_THROWS_AS(BidSample(PaymentFormat::AllPay, AllocationRule::multi_unit(1, 2), std::vector<double>{-1.0}), ArgumentError);
  }

  TEST_CASE("CSV and sidecar round trip") {
    const auto rule = mixture(AllocationRule::multi_unit(1, 6), AllocationRule::position(universal_b(6)), 0.2);
    const auto curve = firstprice_bid_curve(ValueDistribution::beta22(), rule, kGrid);
    const auto s = sample_bids(curve, 200, 3);
    const std::string path = "equil_test_bids.csv";
    save_bid_sample(path, s);
    const auto back = load_bid_sample(path);
    CHECK(back.bids() == s.bids());
    CHECK(back.format() == PaymentFormat::FirstPrice);
    CHECK(back.n() == 6);
    CHECK(back.rule().describe() == rule.describe());

    std::istringstream bad("bid\n0.1\nabc\n");
    CHECK_THROWS_AS(read_bids_csv(bad), FormatError);
    std::istringstream headerless("0.5\n0.25\n");
    CHECK(read_bids_csv(headerless).size() == 2);
    std::istringstream bad_side("{\"format\": \"dutch\", \"n\": 3, \"rule\": \"one-unit\"}");
    CHECK_THROWS_AS(read_sidecar(bad_side), FormatError);
  }
}
