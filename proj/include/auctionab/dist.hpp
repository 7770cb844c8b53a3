#pragma once

// Value distributions in quantile space and the quadrature oracles built on
// them: revenue curves, expected revenue of an allocation rule at
// equilibrium, expected value and welfare.

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "auctionab/alloc.hpp"

namespace auctionab {

// Uniform partition q_0 = 0 < q_1 < ... < q_m = 1.
class QuantileGrid {
 public:
  explicit QuantileGrid(int m);

  int m() const { return m_; }
  Eigen::Index size() const { return q_.size(); }
  double step() const { return 1.0 / m_; }
  double operator[](Eigen::Index i) const { return q_[i]; }
  const Eigen::ArrayXd& points() const { return q_; }

 private:
  int m_;
  Eigen::ArrayXd q_;
};

// Value as a function of quantile, v(q) = F^{-1}(q), on [0,1].
class ValueDistribution {
 public:
  enum class Kind { Uniform01, Beta22, Tabulated };

  static ValueDistribution uniform();
  // Beta(2,2): F(v) = 3v^2 - 2v^3.
  static ValueDistribution beta22();
  // Monotone linear interpolation through (q, v) knots. The knots must start
  // at q = 0, end at q = 1, be strictly increasing in q and nondecreasing in
  // v, with v in [0,1].
  static ValueDistribution tabulated(std::vector<std::pair<double, double>> knots);
  static ValueDistribution constant(double c);

  Kind kind() const { return kind_; }
  std::string name() const;

  double value(double q) const;
  // dv/dq. For Beta22, 1/f(v(q)) with q clamped to [delta, 1 - delta] since
  // the density vanishes at the endpoints.
  double value_deriv(double q, double delta = 1e-5) const;
  double cdf(double v) const;

  Eigen::ArrayXd value(const Eigen::ArrayXd& q) const;

 private:
  ValueDistribution(Kind kind, std::vector<std::pair<double, double>> knots)
      : kind_(kind), knots_(std::make_shared<const std::vector<std::pair<double, double>>>(std::move(knots))) {}

  Kind kind_;
  std::shared_ptr<const std::vector<std::pair<double, double>>> knots_;
};

ValueDistribution distribution_by_name(const std::string& name);
// Two-column CSV of q,v pairs; an optional non-numeric header line is skipped.
ValueDistribution load_tabulated_csv(const std::string& path);

inline double quantile_value(const ValueDistribution& dist, double q) { return dist.value(q); }

// R(q) = v(q)(1 - q).
double revenue_curve(const ValueDistribution& dist, double q);
// R'(q) = v'(q)(1 - q) - v(q).
double revenue_curve_deriv(const ValueDistribution& dist, double q, double delta = 1e-5);

// Per-agent revenue E_q[R(q) x'(q)], trapezoidal rule on the grid.
double true_revenue(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid);
// The same quantity through -E_q[R'(q) x(q)].
double true_revenue_by_parts(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid);
// Per-agent welfare E_q[v(q) x(q)].
double true_welfare(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid);
// E_q[v(q)].
double expected_value(const ValueDistribution& dist, const QuantileGrid& grid);

// Trapezoidal integral of samples f on the grid.
double trapezoid(const Eigen::ArrayXd& f, const QuantileGrid& grid);

struct OrderStatistics {
  Eigen::VectorXd mean;        // mean[k-1] = E[k-th highest of n values]
  Eigen::VectorXd std_error;   // Monte Carlo standard error of each mean
};

// Monte Carlo means of the sorted values of n i.i.d. draws. Deterministic in
// (seed, trials); trial t uses derive_seed(seed, t).
OrderStatistics order_statistic_means(const ValueDistribution& dist, int n, std::size_t trials, std::uint64_t seed);

}  // namespace auctionab
