#pragma once

// Symmetric equilibrium bid curves of rank-by-bid position auctions, bid
// samples drawn from them, and the inverse map from bids back to values.

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "auctionab/alloc.hpp"
#include "auctionab/dist.hpp"

namespace auctionab {

enum class PaymentFormat { AllPay, FirstPrice };

std::string to_string(PaymentFormat format);
// Accepts "allpay", "all-pay", "firstprice", "first-price".
PaymentFormat parse_format(const std::string& text);

// Slopes below this are treated as zero when inverting bids to values.
inline constexpr double kSlopeEpsilon = 1e-9;

// Equilibrium bid b(q) at each grid quantile.
struct BidCurve {
  PaymentFormat format;
  AllocationRule rule;
  QuantileGrid grid;
  Eigen::ArrayXd bids;
};

// b(q) = int_0^q v dx. The integral is taken against the increments of x
// between grid points (trapezoidal in the measure dx), which is exact for
// piecewise-linear v and never needs x'.
BidCurve allpay_bid_curve(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid);

// b(q) = (1/x(q)) int_0^q v dx, the solution of v = b + x b'/x' with
// b x -> 0 at q = 0. Where x(q) underflows the bid is continued by v(0).
// Throws DegenerateError if the rule never serves.
BidCurve firstprice_bid_curve(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid);

BidCurve bid_curve(PaymentFormat format, const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid);

// Values recovered from a bid curve. `defined[i]` is false where x'(q_i) is
// below kSlopeEpsilon; `value[i]` is NaN there.
struct InvertedValues {
  Eigen::ArrayXd q;
  Eigen::ArrayXd value;
  Eigen::Array<bool, Eigen::Dynamic, 1> defined;

  Eigen::Index gap_count() const { return defined.size() - defined.count(); }
};

// v = b'/x'.
InvertedValues invert_allpay(const BidCurve& curve, const AllocationRule& rule);
// v = b + x b'/x'.
InvertedValues invert_firstprice(const BidCurve& curve, const AllocationRule& rule);

// Sorted bids b_1 <= ... <= b_N from the equilibrium of an n-agent auction.
class BidSample {
 public:
  BidSample(PaymentFormat format, AllocationRule rule, std::vector<double> bids);
  BidSample(PaymentFormat format, AllocationRule rule, Eigen::VectorXd sorted_bids);

  PaymentFormat format() const { return format_; }
  int n() const { return rule_.n(); }
  const AllocationRule& rule() const { return rule_; }
  const Eigen::VectorXd& bids() const { return bids_; }
  Eigen::Index size() const { return bids_.size(); }

 private:
  PaymentFormat format_;
  AllocationRule rule_;
  Eigen::VectorXd bids_;
};

// N grid indices drawn uniformly with replacement, mapped through the curve
// and sorted. Deterministic in (curve, N, seed).
BidSample sample_bids(const BidCurve& curve, std::size_t N, std::uint64_t seed);

// Grid indices of N uniform draws in ascending order (counting sort).
std::vector<std::uint32_t> sample_grid_indices(Eigen::Index grid_points, std::size_t N, std::uint64_t seed);

// Step function: the i-th smallest bid on [(i-1)/N, i/N); the largest bid at
// q = 1.
double empirical_bid_function(const BidSample& sample, double q);

// sup_b |G_hat(b) - G(b)| between the sample's empirical CDF and the CDF of
// a uniform draw from the curve's grid bids.
double ks_distance(const BidSample& sample, const BidCurve& curve);

// sup_q sqrt(N) |b_hat(q) - b(q)| / x'(q) over grid points with
// x' >= kSlopeEpsilon (all-pay weighting).
double weighted_bid_error(const BidSample& sample, const BidCurve& curve);

// One-column CSV with header "bid".
void write_bids_csv(std::ostream& out, const BidSample& sample);
std::vector<double> read_bids_csv(std::istream& in);
std::vector<double> read_bids_csv(const std::string& path);

// JSON sidecar: {"format": ..., "n": ..., "rule": ..., "count": ...}.
void write_sidecar(std::ostream& out, const BidSample& sample);
struct SidecarInfo {
  PaymentFormat format;
  int n;
  std::string rule;
};
SidecarInfo read_sidecar(std::istream& in);
SidecarInfo read_sidecar(const std::string& path);

// Loads bids from `csv_path` and metadata from `csv_path + ".json"`.
BidSample load_bid_sample(const std::string& csv_path);
void save_bid_sample(const std::string& csv_path, const BidSample& sample);

}  // namespace auctionab
