#pragma once

// Position environments and their allocation rules in quantile space.
//
// Quantile q in [0,1] is the agent's rank in the value distribution
// (q = F(v)); an allocation rule x(q) is the probability that an agent at
// quantile q is served. Rank-by-bid position auctions are mixtures of
// highest-k-bids-win auctions, whose rules are binomial tail sums.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "auctionab/error.hpp"

namespace auctionab {

namespace detail {

// n up to this bound uses exact 64-bit binomial coefficients; above it,
// log-gamma.
inline constexpr int kExactBinomialLimit = 50;

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= kExactBinomialLimit) {
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return static_cast<double>(c);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

inline double log_binomial(int n, int k) {
  if (n <= kExactBinomialLimit) return std::log(binomial(n, k));
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// C(n, k) q^a (1-q)^b with 0^0 = 1; log-space above the exact limit.
template <typename Scalar>
Scalar binomial_term(int n, int k, int a, int b, Scalar q) {
  using std::exp;
  using std::log;
  using std::pow;
  if (n <= kExactBinomialLimit) return binomial(n, k) * pow(q, a) * pow(Scalar(1) - q, b);
  if ((a > 0 && q <= 0) || (b > 0 && q >= 1)) return Scalar(0);
  Scalar lg = log_binomial(n, k);
  if (a > 0) lg += a * log(q);
  if (b > 0) lg += b * log1p(-q);
  return exp(lg);
}

}  // namespace detail

// x^(k)(q): probability that quantile q is among the top k of n agents,
// sum_{i<k} C(n-1,i) q^{n-1-i} (1-q)^i.
template <typename Scalar>
Scalar multi_unit_alloc(int k, int n, Scalar q) {
  if (n < 1 || k < 1 || k > n) throw ArgumentError("alloc", "unit count k=" + std::to_string(k) + " outside 1..n=" + std::to_string(n));
  if (!(q >= 0 && q <= 1)) throw ArgumentError("alloc", "quantile outside [0,1]");
  if (k == n) return Scalar(1);
  Scalar sum(0);
  if (2 * (k - 1) <= n - 1) {
    for (int i = 0; i < k; ++i) sum += detail::binomial_term(n - 1, i, n - 1 - i, i, q);
  } else {
    // Upper tail is shorter: x = 1 - sum_{i >= k}.
    for (int i = k; i <= n - 1; ++i) sum += detail::binomial_term(n - 1, i, n - 1 - i, i, q);
    sum = Scalar(1) - sum;
  }
  if (sum < Scalar(0)) return Scalar(0);
  return sum < Scalar(1) ? sum : Scalar(1);
}

// x^(k)'(q) = (n-1) C(n-2,k-1) q^{n-1-k} (1-q)^{k-1}; zero for k = n.
template <typename Scalar>
Scalar multi_unit_alloc_deriv(int k, int n, Scalar q) {
  if (n < 1 || k < 1 || k > n) throw ArgumentError("alloc", "unit count k=" + std::to_string(k) + " outside 1..n=" + std::to_string(n));
  if (!(q >= 0 && q <= 1)) throw ArgumentError("alloc", "quantile outside [0,1]");
  if (k == n) return Scalar(0);
  return Scalar(n - 1) * detail::binomial_term(n - 2, k - 1, n - 1 - k, k - 1, q);
}

// Position weights 1 >= w_1 >= ... >= w_n >= 0, stored 1-based through
// operator[].
class PositionWeights {
 public:
  explicit PositionWeights(std::vector<double> w);

  int n() const { return static_cast<int>(w_.size()); }
  double operator[](int k) const { return w_[static_cast<std::size_t>(k - 1)]; }
  const std::vector<double>& values() const { return w_; }

  bool operator==(const PositionWeights&) const = default;

 private:
  std::vector<double> w_;
};

// Increments wbar[k] = w_k - w_{k+1} (wbar[0] = 1 - w_1, wbar[n] = w_n), a
// probability distribution over the number of units k = 0..n.
class MarginalWeights {
 public:
  explicit MarginalWeights(Eigen::VectorXd wbar);

  int n() const { return static_cast<int>(wbar_.size()) - 1; }
  double operator[](int k) const { return wbar_[k]; }
  const Eigen::VectorXd& values() const { return wbar_; }

 private:
  Eigen::VectorXd wbar_;
};

MarginalWeights marginal_weights(const PositionWeights& w);
// Inverse of marginal_weights: w_k = sum_{j>=k} wbar[j].
PositionWeights cumulative_weights(const MarginalWeights& wbar);

// Named environments.
PositionWeights k_unit_weights(int k, int n);
PositionWeights uniform_stair_weights(int n);  // w_k = (n-k)/(n-1)
PositionWeights universal_b(int n);             // w_1 = 1, w_k = 1/2 for 1 < k < n, w_n = 0
PositionWeights never_serve_weights(int n);

// Parses "one-unit", "k-unit:K", "uniform-stair", "universal-b",
// "never-serve", or a comma-separated decreasing list of n weights.
PositionWeights parse_weights(std::string_view text, int n);

double position_alloc(const PositionWeights& w, double q);
double position_alloc_deriv(const PositionWeights& w, double q);

// Immutable allocation rule. Copies share the underlying node.
class AllocationRule {
 public:
  struct Node;

  static AllocationRule multi_unit(int k, int n);
  static AllocationRule position(const PositionWeights& w);
  // Lazy convex combination; weights must be nonnegative and sum to 1.
  static AllocationRule mixture(std::vector<std::pair<double, AllocationRule>> parts);

  int n() const;
  double x(double q) const;
  double xprime(double q) const;
  Eigen::ArrayXd x(const Eigen::ArrayXd& q) const;
  Eigen::ArrayXd xprime(const Eigen::ArrayXd& q) const;

  // Equivalent marginal weights (flattens mixtures).
  MarginalWeights marginals() const;
  // Units k if this is a highest-k-bids-win rule (possibly written as a
  // position rule), otherwise 0.
  int multi_unit_count() const;
  std::string describe() const;

 private:
  explicit AllocationRule(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// x_C = (1 - eps) x_A + eps x_B.
AllocationRule mixture(const AllocationRule& a, const AllocationRule& b, double eps);

// Parses the same presets as parse_weights into a rule, plus the
// "mix(w*rule+...)" form produced by describe().
AllocationRule parse_rule(std::string_view text, int n);

// sup_q x'(q) over a uniform grid of `grid_size` points, together with the
// analytic maximizer (n-1-k)/(n-2) for multi-unit rules.
double max_slope(const AllocationRule& rule, int grid_size);

}  // namespace auctionab
