#include "auctionab/dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "auctionab/rng.hpp"

namespace auctionab {

namespace {

constexpr const char* kModule = "dist";

double beta22_cdf(double v) { return v * v * (3.0 - 2.0 * v); }

// Inverts F(v) = 3v^2 - 2v^3 by bisection.
double beta22_quantile(double q) {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (beta22_cdf(mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

QuantileGrid::QuantileGrid(int m) : m_(m) {
  if (m < 1) throw ArgumentError(kModule, "quantile grid needs m >= 1");
  q_ = Eigen::ArrayXd::LinSpaced(m + 1, 0.0, 1.0);
  q_[m] = 1.0;
}

ValueDistribution ValueDistribution::uniform() { return ValueDistribution(Kind::Uniform01, {}); }

ValueDistribution ValueDistribution::beta22() { return ValueDistribution(Kind::Beta22, {}); }

ValueDistribution ValueDistribution::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ArgumentError(kModule, "tabulated quantile function needs at least 2 knots");
  if (knots.front().first != 0.0 || knots.back().first != 1.0) throw ArgumentError(kModule, "tabulated knots must span q = 0 to q = 1");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [q, v] = knots[i];
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError(kModule, "tabulated value outside [0,1]");
    if (i > 0 && !(q > knots[i - 1].first)) throw ArgumentError(kModule, "tabulated quantiles must be strictly increasing");
    if (i > 0 && v < knots[i - 1].second) throw ArgumentError(kModule, "tabulated values must be nondecreasing");
  }
  return ValueDistribution(Kind::Tabulated, std::move(knots));
}

ValueDistribution ValueDistribution::constant(double c) { return tabulated({{0.0, c}, {1.0, c}}); }

std::string ValueDistribution::name() const {
  switch (kind_) {
    case Kind::Uniform01:
      return "uniform";
    case Kind::Beta22:
      return "beta22";
    case Kind::Tabulated:
      return "tabulated";
  }
  return "unknown";
}

double ValueDistribution::value(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError(kModule, "quantile " + std::to_string(q) + " outside [0,1]");
  switch (kind_) {
    case Kind::Uniform01:
      return q;
    case Kind::Beta22:
      return beta22_quantile(q);
    case Kind::Tabulated: {
      const auto& k = *knots_;
      auto it = std::upper_bound(k.begin(), k.end(), q, [](double x, const auto& knot) { return x < knot.first; });
      if (it == k.end()) return k.back().second;
      const auto& right = *it;
      const auto& left = *(it - 1);
      const double t = (q - left.first) / (right.first - left.first);
      return left.second + t * (right.second - left.second);
    }
  }
  return 0.0;
}

Eigen::ArrayXd ValueDistribution::value(const Eigen::ArrayXd& q) const {
  Eigen::ArrayXd out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = value(q[i]);
  return out;
}

double ValueDistribution::value_deriv(double q, double delta) const {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError(kModule, "quantile outside [0,1]");
  switch (kind_) {
    case Kind::Uniform01:
      return 1.0;
    case Kind::Beta22: {
      const double qc = std::clamp(q, delta, 1.0 - delta);
      const double v = beta22_quantile(qc);
      return 1.0 / (6.0 * v * (1.0 - v));
    }
    case Kind::Tabulated: {
      const auto& k = *knots_;
      auto it = std::upper_bound(k.begin(), k.end(), q, [](double x, const auto& knot) { return x < knot.first; });
      if (it == k.end()) --it;
      const auto& left = *(it - 1);
      return (it->second - left.second) / (it->first - left.first);
    }
  }
  return 0.0;
}

double ValueDistribution::cdf(double v) const {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  switch (kind_) {
    case Kind::Uniform01:
      return v;
    case Kind::Beta22:
      return beta22_cdf(v);
    case Kind::Tabulated: {
      // Largest q with v(q) <= v.
      const auto& k = *knots_;
      double q = 0.0;
      for (std::size_t i = 1; i < k.size(); ++i) {
        const auto [q0, v0] = k[i - 1];
        const auto [q1, v1] = k[i];
        if (v >= v1) {
          q = q1;
        } else if (v >= v0) {
          q = v1 > v0 ? q0 + (v - v0) / (v1 - v0) * (q1 - q0) : q1;
          break;
        } else {
          break;
        }
      }
      return q;
    }
  }
  return 0.0;
}

ValueDistribution distribution_by_name(const std::string& name) {
  if (name == "uniform") return ValueDistribution::uniform();
  if (name == "beta22") return ValueDistribution::beta22();
  if (name.ends_with(".csv")) return load_tabulated_csv(name);
  throw FormatError(kModule, "unknown value distribution '" + name + "'");
}

ValueDistribution load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(kModule, "cannot open '" + path + "'");
  std::vector<std::pair<double, double>> knots;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string a;
    std::string b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) throw FormatError(kModule, "expected two columns in '" + path + "'");
    try {
      knots.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      if (!first) throw FormatError(kModule, "non-numeric row in '" + path + "': " + line);
    }
    first = false;
  }
  try {
    return ValueDistribution::tabulated(std::move(knots));
  } catch (const ArgumentError& e) {
    throw FormatError(kModule, e.what());
  }
}

double revenue_curve(const ValueDistribution& dist, double q) { return dist.value(q) * (1.0 - q); }

double revenue_curve_deriv(const ValueDistribution& dist, double q, double delta) {
  return dist.value_deriv(q, delta) * (1.0 - q) - dist.value(q);
}

double trapezoid(const Eigen::ArrayXd& f, const QuantileGrid& grid) {
  if (f.size() != grid.size()) throw ArgumentError(kModule, "integrand size does not match grid");
  return grid.step() * (f.sum() - 0.5 * (f[0] + f[f.size() - 1]));
}

double true_revenue(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid) {
  const auto& q = grid.points();
  const Eigen::ArrayXd integrand = dist.value(q) * (1.0 - q) * rule.xprime(q);
  return trapezoid(integrand, grid);
}

double true_revenue_by_parts(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid) {
  // R(0) = R(1) = 0, so -E[R' x] = -E[R' (x - x(0))]; subtracting x(0)
  // removes the integrable endpoint singularity of R' for Beta22.
  const auto& q = grid.points();
  const double delta = 1.0 / (10.0 * grid.m());
  const double x0 = rule.x(0.0);
  Eigen::ArrayXd integrand(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) integrand[i] = -revenue_curve_deriv(dist, q[i], delta) * (rule.x(q[i]) - x0);
  return trapezoid(integrand, grid);
}

double true_welfare(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid) {
  const auto& q = grid.points();
  return trapezoid(dist.value(q) * rule.x(q), grid);
}

double expected_value(const ValueDistribution& dist, const QuantileGrid& grid) {
  return trapezoid(dist.value(grid.points()), grid);
}

OrderStatistics order_statistic_means(const ValueDistribution& dist, int n, std::size_t trials, std::uint64_t seed) {
  if (n < 1) throw ArgumentError(kModule, "order statistics need n >= 1");
  if (trials < 2) throw ArgumentError(kModule, "order statistics need at least 2 trials");
  constexpr std::size_t kChunk = 4096;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(n);
  std::vector<double> draw(static_cast<std::size_t>(n));
  for (std::size_t start = 0, chunk = 0; start < trials; start += kChunk, ++chunk) {
    Engine eng = make_engine(derive_seed(seed, chunk));
    const std::size_t end = std::min(trials, start + kChunk);
    for (std::size_t t = start; t < end; ++t) {
      for (auto& v : draw) v = dist.value(uniform01(eng));
      std::sort(draw.begin(), draw.end(), std::greater<>());
      for (int k = 0; k < n; ++k) {
        sum[k] += draw[static_cast<std::size_t>(k)];
        sum_sq[k] += draw[static_cast<std::size_t>(k)] * draw[static_cast<std::size_t>(k)];
      }
    }
  }
  const double t = static_cast<double>(trials);
  OrderStatistics out;
  out.mean = sum / t;
  const Eigen::VectorXd var = ((sum_sq / t).array() - out.mean.array().square()).max(0.0) * (t / (t - 1.0));
  out.std_error = (var.array() / t).sqrt();
  return out;
}

}  // namespace auctionab
