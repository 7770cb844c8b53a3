#pragma once

// Counterfactual estimators: revenue of a target rule y, the expected value,
// and social welfare, all computed from sorted bids observed under a source
// rule x. Each estimator is a weighted sum of order statistics; the weight
// vectors are exposed so Monte Carlo loops can build them once per N.

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>

#include "auctionab/alloc.hpp"
#include "auctionab/bounds.hpp"
#include "auctionab/equil.hpp"

namespace auctionab {

// Z_y(q) = (1-q) y'(q)/x'(q) and Zbar(q) = 1/x'(q).
class ZFunction {
 public:
  ZFunction(AllocationRule y, AllocationRule x);

  // y'(q)/x'(q); 0 where both vanish. Throws DegenerateError where only x'
  // vanishes.
  double ratio(double q) const;
  double z(double q) const { return (1.0 - q) * ratio(q); }
  double zbar(double q) const;

  const AllocationRule& target() const { return y_; }
  const AllocationRule& source() const { return x_; }

 private:
  AllocationRule y_;
  AllocationRule x_;
};

// Clamp applied to every weight evaluation: [1/(2N), 1 - 1/(2N)].
double clamp_quantile(double q, std::size_t N);

// Revenue weights: estimate = weights . sorted_bids.
// All-pay: w_i = Z((i-1)/N) - Z(i/N). The ratio y'/x' is evaluated at the
// clamped quantile and the (1-q) factor at the true one, so y = x gives
// w_i = 1/N.
Eigen::VectorXd allpay_revenue_weights(const AllocationRule& x, const AllocationRule& y, std::size_t N);
// First-price: the integral of -x Z' over cell i, written by parts as
// [xZ]((i-1)/N) - [xZ](i/N) + int_cell (1-q) y'(q) dq. The cell integral
// uses Simpson's rule on 10 subintervals.
Eigen::VectorXd firstprice_revenue_weights(const AllocationRule& x, const AllocationRule& y, std::size_t N);
Eigen::VectorXd revenue_weights(PaymentFormat format, const AllocationRule& x, const AllocationRule& y, std::size_t N);

// Expected-value weights, boundary term folded into the last weight.
// All-pay: Zbar((i-1)/N) - Zbar(i/N), plus Zbar(1) on the largest bid.
Eigen::VectorXd allpay_value_weights(const AllocationRule& x, std::size_t N);
// First-price (experimental): mean of bids plus the same telescoping sum for
// H = x/x', with boundary H(1) b_N - H(0) b_1.
Eigen::VectorXd firstprice_value_weights(const AllocationRule& x, std::size_t N);
Eigen::VectorXd value_weights(PaymentFormat format, const AllocationRule& x, std::size_t N);

struct EstimateReport {
  double point = 0.0;
  std::optional<double> bound;
  std::optional<double> truth;
  PaymentFormat format = PaymentFormat::AllPay;
  int n = 0;
  std::size_t N = 0;
  std::string source;
  std::string target;
  std::string design = "custom";
  std::optional<double> eps;
  std::uint64_t seed = 0;

  std::optional<double> abs_error() const;
};

// "design,format,n,N,eps,seed,estimate,truth,abs_error,bound"
std::string report_csv_header();
std::string report_csv_row(const EstimateReport& report);

// Per-agent revenue of y from bids under x. `x` must be the rule that
// generated the sample. The attached bound is the multi-unit bound when y is
// a multi-unit rule and the general position-auction bound otherwise.
EstimateReport estimate_revenue_allpay(const BidSample& sample, const AllocationRule& x, const AllocationRule& y,
                                       const BoundConstants& constants = {});
EstimateReport estimate_revenue_firstprice(const BidSample& sample, const AllocationRule& x, const AllocationRule& y,
                                           const BoundConstants& constants = {});
EstimateReport estimate_revenue(const BidSample& sample, const AllocationRule& x, const AllocationRule& y,
                                const BoundConstants& constants = {});

// P_1, ..., P_{n-1}; entry k-1 holds P_k.
Eigen::VectorXd estimate_multiunit_revenues(const BidSample& sample, const AllocationRule& x);

EstimateReport estimate_expected_value(const BidSample& sample, const AllocationRule& x, const BoundConstants& constants = {});

// SW = w_1 vbar - sum_{k=1}^{n-1} (w_1 - w_{k+1}) P_k / k. The first-price
// path is experimental.
EstimateReport estimate_welfare(const BidSample& sample, const AllocationRule& x, const PositionWeights& w);

}  // namespace auctionab
