#pragma once

// A/B tests run by mixing candidate auctions into an incumbent: building the
// composite mechanism and deciding revenue comparisons from its bids.

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "auctionab/alloc.hpp"
#include "auctionab/dist.hpp"
#include "auctionab/equil.hpp"

namespace auctionab {

// Incumbent A and candidates B_i run with probabilities eps_i; eps is their
// sum and must lie in (0, 1].
struct ABDesign {
  AllocationRule a;
  std::vector<std::pair<double, AllocationRule>> bs;
  ValueDistribution dist = ValueDistribution::beta22();
  PaymentFormat format = PaymentFormat::AllPay;

  int n() const { return a.n(); }
  double eps() const;

  // r candidates each run with probability eps/r.
  static ABDesign even_split(AllocationRule a, const std::vector<AllocationRule>& candidates, double eps);
};

// C = (1 - eps) A + sum_i eps_i B_i.
AllocationRule build_test_mechanism(const ABDesign& design);

struct Comparison {
  int verdict;    // 1 if P_B1 - alpha P_B2 > 0, else 0
  double margin;  // P_B1 - alpha P_B2
};

// Margin exactly 0 classifies as 0, keeping the incumbent.
Comparison compare_revenues(const BidSample& sample, const AllocationRule& x, const AllocationRule& b1,
                            const AllocationRule& b2, double alpha = 1.0);
// Same decision from precomputed revenue weights.
Comparison compare_revenues(const Eigen::VectorXd& bids, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2, double alpha);

struct Selection {
  int index;                  // argmax of estimated revenue, lowest index on ties
  Eigen::VectorXd estimates;  // estimated revenue of each candidate
  double margin;              // best minus runner-up
};

// All candidates are estimated from the same sample.
Selection best_of_r(const BidSample& sample, const AllocationRule& x, const std::vector<AllocationRule>& candidates);
Selection best_of_r(const Eigen::VectorXd& bids, const std::vector<Eigen::VectorXd>& weights);

}  // namespace auctionab
