#include "auctionab/abtest.hpp"

#include <cmath>
#include <limits>

#include "auctionab/estim.hpp"

namespace auctionab {

namespace {

constexpr const char* kModule = "abtest";

}  // namespace

double ABDesign::eps() const {
  double total = 0.0;
  for (const auto& [weight, rule] : bs) total += weight;
  return total;
}

ABDesign ABDesign::even_split(AllocationRule a, const std::vector<AllocationRule>& candidates, double eps) {
  if (candidates.empty()) throw ArgumentError(kModule, "no candidate mechanisms");
  ABDesign d{std::move(a), {}};
  for (const auto& b : candidates) d.bs.emplace_back(eps / static_cast<double>(candidates.size()), b);
  return d;
}

AllocationRule build_test_mechanism(const ABDesign& design) {
  if (design.bs.empty()) throw ArgumentError(kModule, "no candidate mechanisms");
  const double eps = design.eps();
  if (!(eps > 0.0 && eps <= 1.0 + 1e-12)) throw ArgumentError(kModule, "total candidate weight must lie in (0,1]");
  std::vector<std::pair<double, AllocationRule>> parts;
  parts.emplace_back(std::max(0.0, 1.0 - eps), design.a);
  for (const auto& [weight, rule] : design.bs) {
    if (!(weight >= 0.0)) throw ArgumentError(kModule, "negative candidate weight");
    if (rule.n() != design.n()) throw ArgumentError(kModule, "candidate agent count differs from the incumbent's");
    parts.emplace_back(weight, rule);
  }
  return AllocationRule::mixture(std::move(parts));
}

Comparison compare_revenues(const Eigen::VectorXd& bids, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError(kModule, "alpha must be positive");
  const double margin = w1.dot(bids) - alpha * w2.dot(bids);
  return Comparison{margin > 0.0 ? 1 : 0, margin};
}

Comparison compare_revenues(const BidSample& sample, const AllocationRule& x, const AllocationRule& b1,
                            const AllocationRule& b2, double alpha) {
  const auto N = static_cast<std::size_t>(sample.size());
  return compare_revenues(sample.bids(), revenue_weights(sample.format(), x, b1, N), revenue_weights(sample.format(), x, b2, N), alpha);
}

Selection best_of_r(const Eigen::VectorXd& bids, const std::vector<Eigen::VectorXd>& weights) {
  if (weights.size() < 2) throw ArgumentError(kModule, "best_of_r needs at least 2 candidates");
  Selection s{0, Eigen::VectorXd(static_cast<Eigen::Index>(weights.size())), 0.0};
  for (std::size_t i = 0; i < weights.size(); ++i) s.estimates[static_cast<Eigen::Index>(i)] = weights[i].dot(bids);
  double runner_up = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < s.estimates.size(); ++i) {
    if (s.estimates[i] > s.estimates[s.index]) s.index = static_cast<int>(i);
  }
  for (Eigen::Index i = 0; i < s.estimates.size(); ++i) {
    if (i != s.index) runner_up = std::max(runner_up, s.estimates[i]);
  }
  s.margin = s.estimates[s.index] - runner_up;
  return s;
}

Selection best_of_r(const BidSample& sample, const AllocationRule& x, const std::vector<AllocationRule>& candidates) {
  const auto N = static_cast<std::size_t>(sample.size());
  std::vector<Eigen::VectorXd> weights;
  weights.reserve(candidates.size());
  for (const auto& c : candidates) weights.push_back(revenue_weights(sample.format(), x, c, N));
  return best_of_r(sample.bids(), weights);
}

}  // namespace auctionab
