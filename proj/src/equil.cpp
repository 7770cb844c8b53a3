#include "auctionab/equil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "auctionab/rng.hpp"

namespace auctionab {

namespace {

constexpr const char* kModule = "equil";

// Below this, x(q) is treated as underflowed in the first-price ratio.
constexpr double kTinyAllocation = 1e-300;

// Cumulative int_0^{q_j} v dx using increments of x between grid points.
Eigen::ArrayXd cumulative_stieltjes(const Eigen::ArrayXd& v, const Eigen::ArrayXd& x) {
  Eigen::ArrayXd s(v.size());
  s[0] = 0.0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    const double dx = std::max(0.0, x[j] - x[j - 1]);
    s[j] = s[j - 1] + 0.5 * (v[j] + v[j - 1]) * dx;
  }
  return s;
}

// Central differences in the interior, second-order one-sided stencils at
// the ends.
Eigen::ArrayXd finite_difference(const Eigen::ArrayXd& f, double h) {
  const Eigen::Index m = f.size();
  Eigen::ArrayXd d(m);
  if (m < 3) {
    d.setConstant(m == 2 ? (f[1] - f[0]) / h : 0.0);
    return d;
  }
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (Eigen::Index i = 1; i + 1 < m; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
  return d;
}

}  // namespace

std::string to_string(PaymentFormat format) { return format == PaymentFormat::AllPay ? "allpay" : "firstprice"; }

PaymentFormat parse_format(const std::string& text) {
  if (text == "allpay" || text == "all-pay") return PaymentFormat::AllPay;
  if (text == "firstprice" || text == "first-price") return PaymentFormat::FirstPrice;
  throw FormatError(kModule, "unknown payment format '" + text + "'");
}

BidCurve allpay_bid_curve(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid) {
  const auto& q = grid.points();
  const Eigen::ArrayXd bids = cumulative_stieltjes(dist.value(q), rule.x(q));
  return BidCurve{PaymentFormat::AllPay, rule, grid, bids};
}

BidCurve firstprice_bid_curve(const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid) {
  const auto& q = grid.points();
  const Eigen::ArrayXd v = dist.value(q);
  const Eigen::ArrayXd x = rule.x(q);
  if (!(x[x.size() - 1] > 0.0)) throw DegenerateError(kModule, "first-price bids undefined: allocation rule never serves", 1.0);
  const Eigen::ArrayXd s = cumulative_stieltjes(v, x);
  Eigen::ArrayXd bids(q.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double b = x[j] > kTinyAllocation ? s[j] / x[j] : v[0];
    bids[j] = std::min(b, v[j]);
    if (j > 0) bids[j] = std::max(bids[j], bids[j - 1]);
  }
  return BidCurve{PaymentFormat::FirstPrice, rule, grid, bids};
}

BidCurve bid_curve(PaymentFormat format, const ValueDistribution& dist, const AllocationRule& rule, const QuantileGrid& grid) {
  return format == PaymentFormat::AllPay ? allpay_bid_curve(dist, rule, grid) : firstprice_bid_curve(dist, rule, grid);
}

InvertedValues invert_allpay(const BidCurve& curve, const AllocationRule& rule) {
  if (curve.format != PaymentFormat::AllPay) throw ArgumentError(kModule, "invert_allpay needs an all-pay bid curve");
  const auto& q = curve.grid.points();
  const Eigen::ArrayXd bprime = finite_difference(curve.bids, curve.grid.step());
  const Eigen::ArrayXd xprime = rule.xprime(q);
  InvertedValues out{q, Eigen::ArrayXd(q.size()), Eigen::Array<bool, Eigen::Dynamic, 1>(q.size())};
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    out.defined[i] = xprime[i] >= kSlopeEpsilon;
    out.value[i] = out.defined[i] ? bprime[i] / xprime[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

InvertedValues invert_firstprice(const BidCurve& curve, const AllocationRule& rule) {
  if (curve.format != PaymentFormat::FirstPrice) throw ArgumentError(kModule, "invert_firstprice needs a first-price bid curve");
  const auto& q = curve.grid.points();
  const Eigen::ArrayXd bprime = finite_difference(curve.bids, curve.grid.step());
  const Eigen::ArrayXd x = rule.x(q);
  const Eigen::ArrayXd xprime = rule.xprime(q);
  InvertedValues out{q, Eigen::ArrayXd(q.size()), Eigen::Array<bool, Eigen::Dynamic, 1>(q.size())};
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    out.defined[i] = xprime[i] >= kSlopeEpsilon;
    out.value[i] = out.defined[i] ? curve.bids[i] + x[i] * bprime[i] / xprime[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Samples

BidSample::BidSample(PaymentFormat format, AllocationRule rule, std::vector<double> bids)
    : format_(format), rule_(std::move(rule)) {
  if (bids.empty()) throw ArgumentError(kModule, "empty bid sample");
  for (double b : bids) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ArgumentError(kModule, "bids must be finite and nonnegative");
  }
  std::sort(bids.begin(), bids.end());
  bids_ = Eigen::Map<const Eigen::VectorXd>(bids.data(), static_cast<Eigen::Index>(bids.size()));
}

BidSample::BidSample(PaymentFormat format, AllocationRule rule, Eigen::VectorXd sorted_bids)
    : format_(format), rule_(std::move(rule)), bids_(std::move(sorted_bids)) {
  if (bids_.size() == 0) throw ArgumentError(kModule, "empty bid sample");
  for (Eigen::Index i = 0; i < bids_.size(); ++i) {
    if (!(bids_[i] >= 0.0) || !std::isfinite(bids_[i])) throw ArgumentError(kModule, "bids must be finite and nonnegative");
    if (i > 0 && bids_[i] < bids_[i - 1]) throw ArgumentError(kModule, "bid sample is not sorted");
  }
}

std::vector<std::uint32_t> sample_grid_indices(Eigen::Index grid_points, std::size_t N, std::uint64_t seed) {
  if (N < 1) throw ArgumentError(kModule, "sample size must be at least 1");
  Engine eng = make_engine(seed);
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(grid_points), 0);
  for (std::size_t i = 0; i < N; ++i) ++counts[uniform_index(eng, static_cast<std::uint64_t>(grid_points))];
  std::vector<std::uint32_t> idx;
  idx.reserve(N);
  for (std::size_t j = 0; j < counts.size(); ++j) idx.insert(idx.end(), counts[j], static_cast<std::uint32_t>(j));
  return idx;
}

BidSample sample_bids(const BidCurve& curve, std::size_t N, std::uint64_t seed) {
  const auto idx = sample_grid_indices(curve.bids.size(), N, seed);
  Eigen::VectorXd bids(static_cast<Eigen::Index>(N));
  // Bid curves are nondecreasing, so ascending indices give sorted bids.
  for (std::size_t i = 0; i < N; ++i) bids[static_cast<Eigen::Index>(i)] = curve.bids[idx[i]];
  return BidSample(curve.format, curve.rule, std::move(bids));
}

double empirical_bid_function(const BidSample& sample, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError(kModule, "quantile outside [0,1]");
  const Eigen::Index N = sample.size();
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(q * static_cast<double>(N))), N - 1);
  return sample.bids()[i];
}

double ks_distance(const BidSample& sample, const BidCurve& curve) {
  // Both CDFs are step functions with atoms among the grid bids (the curve
  // is nondecreasing), so the supremum is attained at an atom.
  const auto& b = curve.bids;
  const auto& s = sample.bids();
  const double m1 = static_cast<double>(b.size());
  const double N = static_cast<double>(s.size());
  double sup = 0.0;
  Eigen::Index si = 0;
  Eigen::Index j = 0;
  while (j < b.size()) {
    const double atom = b[j];
    while (j < b.size() && b[j] <= atom) ++j;
    while (si < s.size() && s[si] <= atom) ++si;
    sup = std::max(sup, std::abs(static_cast<double>(si) / N - static_cast<double>(j) / m1));
  }
  return sup;
}

double weighted_bid_error(const BidSample& sample, const BidCurve& curve) {
  const auto& q = curve.grid.points();
  const double rootN = std::sqrt(static_cast<double>(sample.size()));
  double sup = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double slope = curve.rule.xprime(q[i]);
    if (slope < kSlopeEpsilon) continue;
    sup = std::max(sup, rootN * std::abs(empirical_bid_function(sample, q[i]) - curve.bids[i]) / slope);
  }
  return sup;
}

// ---------------------------------------------------------------------------
// I/O

void write_bids_csv(std::ostream& out, const BidSample& sample) {
  out << "bid\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < sample.size(); ++i) out << sample.bids()[i] << '\n';
}

std::vector<double> read_bids_csv(std::istream& in) {
  std::vector<double> bids;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "bid") continue;
    }
    try {
      std::size_t used = 0;
      bids.push_back(std::stod(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw FormatError(kModule, "bad bid on line " + std::to_string(line_no) + ": '" + line + "'");
    }
  }
  if (bids.empty()) throw FormatError(kModule, "bid CSV contains no bids");
  return bids;
}

std::vector<double> read_bids_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(kModule, "cannot open '" + path + "'");
  return read_bids_csv(in);
}

void write_sidecar(std::ostream& out, const BidSample& sample) {
  nlohmann::json j;
  j["format"] = to_string(sample.format());
  j["n"] = sample.n();
  j["rule"] = sample.rule().describe();
  j["count"] = sample.size();
  out << j.dump(2) << '\n';
}

SidecarInfo read_sidecar(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    return SidecarInfo{parse_format(j.at("format").get<std::string>()), j.at("n").get<int>(), j.at("rule").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(kModule, std::string("bad sidecar: ") + e.what());
  }
}

SidecarInfo read_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(kModule, "cannot open '" + path + "'");
  return read_sidecar(in);
}

BidSample load_bid_sample(const std::string& csv_path) {
  const auto info = read_sidecar(csv_path + ".json");
  return BidSample(info.format, parse_rule(info.rule, info.n), read_bids_csv(csv_path));
}

void save_bid_sample(const std::string& csv_path, const BidSample& sample) {
  std::ofstream csv(csv_path);
  if (!csv) throw FormatError(kModule, "cannot write '" + csv_path + "'");
  write_bids_csv(csv, sample);
  std::ofstream side(csv_path + ".json");
  if (!side) throw FormatError(kModule, "cannot write '" + csv_path + ".json'");
  write_sidecar(side, sample);
}

}  // namespace auctionab
