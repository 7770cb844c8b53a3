#include "auctionab/estim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace auctionab {

namespace {

constexpr const char* kModule = "estim";
constexpr int kSimpsonPanels = 10;

void check_sample(const BidSample& sample, const AllocationRule& x) {
  if (sample.n() != x.n()) throw ArgumentError(kModule, "source rule agent count differs from the sample's");
}

void check_N(std::size_t N) {
  if (N < 1) throw ArgumentError(kModule, "sample size must be at least 1");
}

double grid_point(std::size_t i, std::size_t N) { return static_cast<double>(i) / static_cast<double>(N); }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

EstimateReport base_report(const BidSample& sample, const AllocationRule& x, std::string target) {
  EstimateReport r;
  r.format = sample.format();
  r.n = sample.n();
  r.N = static_cast<std::size_t>(sample.size());
  r.source = x.describe();
  r.target = std::move(target);
  return r;
}

double revenue_bound(const AllocationRule& x, const AllocationRule& y, std::size_t N, const BoundConstants& c) {
  const auto in = make_bound_inputs(x, y, N);
  return y.multi_unit_count() > 0 ? bound_allpay_k(in, c) : bound_general_y(in, c);
}

}  // namespace

ZFunction::ZFunction(AllocationRule y, AllocationRule x) : y_(std::move(y)), x_(std::move(x)) {
  if (y_.n() != x_.n()) throw ArgumentError(kModule, "source and target rules have different agent counts");
}

double ZFunction::ratio(double q) const {
  const double xp = x_.xprime(q);
  const double yp = y_.xprime(q);
  if (xp > 0.0) return yp / xp;
  if (yp == 0.0) return 0.0;
  throw DegenerateError(kModule, "source allocation rule is flat where the target is not", q);
}

double ZFunction::zbar(double q) const {
  const double xp = x_.xprime(q);
  if (!(xp > 0.0)) throw DegenerateError(kModule, "source allocation rule is flat, 1/x' undefined", q);
  return 1.0 / xp;
}

double clamp_quantile(double q, std::size_t N) {
  const double lo = 0.5 / static_cast<double>(N);
  return std::clamp(q, lo, 1.0 - lo);
}

Eigen::VectorXd allpay_revenue_weights(const AllocationRule& x, const AllocationRule& y, std::size_t N) {
  check_N(N);
  const ZFunction zf(y, x);
  Eigen::VectorXd z(static_cast<Eigen::Index>(N) + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double t = grid_point(i, N);
    z[static_cast<Eigen::Index>(i)] = (1.0 - t) * zf.ratio(clamp_quantile(t, N));
  }
  return z.head(z.size() - 1) - z.tail(z.size() - 1);
}

Eigen::VectorXd firstprice_revenue_weights(const AllocationRule& x, const AllocationRule& y, std::size_t N) {
  check_N(N);
  const ZFunction zf(y, x);
  Eigen::VectorXd xz(static_cast<Eigen::Index>(N) + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double t = grid_point(i, N);
    const double xt = x.x(t);
    xz[static_cast<Eigen::Index>(i)] = xt == 0.0 ? 0.0 : xt * (1.0 - t) * zf.ratio(clamp_quantile(t, N));
  }
  // (1-q) y'(q) on a grid refined kSimpsonPanels times.
  const std::size_t fine = N * kSimpsonPanels;
  Eigen::VectorXd g(static_cast<Eigen::Index>(fine) + 1);
  for (std::size_t j = 0; j <= fine; ++j) {
    const double q = grid_point(j, fine);
    g[static_cast<Eigen::Index>(j)] = (1.0 - q) * y.xprime(q);
  }
  const double h = 1.0 / static_cast<double>(fine);
  Eigen::VectorXd w(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) {
    const auto base = static_cast<Eigen::Index>(i * kSimpsonPanels);
    double s = g[base] + g[base + kSimpsonPanels];
    for (int p = 1; p < kSimpsonPanels; ++p) s += (p % 2 == 1 ? 4.0 : 2.0) * g[base + p];
    const auto ii = static_cast<Eigen::Index>(i);
    w[ii] = xz[ii] - xz[ii + 1] + s * h / 3.0;
  }
  return w;
}

Eigen::VectorXd revenue_weights(PaymentFormat format, const AllocationRule& x, const AllocationRule& y, std::size_t N) {
  return format == PaymentFormat::AllPay ? allpay_revenue_weights(x, y, N) : firstprice_revenue_weights(x, y, N);
}

Eigen::VectorXd allpay_value_weights(const AllocationRule& x, std::size_t N) {
  check_N(N);
  const ZFunction zf(x, x);
  Eigen::VectorXd zbar(static_cast<Eigen::Index>(N) + 1);
  for (std::size_t i = 0; i <= N; ++i) zbar[static_cast<Eigen::Index>(i)] = zf.zbar(clamp_quantile(grid_point(i, N), N));
  Eigen::VectorXd w = zbar.head(zbar.size() - 1) - zbar.tail(zbar.size() - 1);
  w[w.size() - 1] += zbar[zbar.size() - 1];
  return w;
}

Eigen::VectorXd firstprice_value_weights(const AllocationRule& x, std::size_t N) {
  check_N(N);
  Eigen::VectorXd h(static_cast<Eigen::Index>(N) + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double t = grid_point(i, N);
    const double xt = x.x(t);
    if (xt == 0.0) {
      h[static_cast<Eigen::Index>(i)] = 0.0;
      continue;
    }
    const double qc = clamp_quantile(t, N);
    const double xp = x.xprime(qc);
    if (!(xp > 0.0)) throw DegenerateError(kModule, "source allocation rule is flat, x/x' undefined", qc);
    h[static_cast<Eigen::Index>(i)] = xt / xp;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), 1.0 / static_cast<double>(N));
  w += h.head(h.size() - 1) - h.tail(h.size() - 1);
  w[w.size() - 1] += h[h.size() - 1];
  w[0] -= h[0];
  return w;
}

Eigen::VectorXd value_weights(PaymentFormat format, const AllocationRule& x, std::size_t N) {
  return format == PaymentFormat::AllPay ? allpay_value_weights(x, N) : firstprice_value_weights(x, N);
}

std::optional<double> EstimateReport::abs_error() const {
  if (!truth) return std::nullopt;
  return std::abs(point - *truth);
}

std::string report_csv_header() { return "design,format,n,N,eps,seed,estimate,truth,abs_error,bound"; }

std::string report_csv_row(const EstimateReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::ostringstream os;
  os << r.design << ',' << to_string(r.format) << ',' << r.n << ',' << r.N << ',' << opt(r.eps) << ',' << r.seed << ','
     << format_number(r.point) << ',' << opt(r.truth) << ',' << opt(r.abs_error()) << ',' << opt(r.bound);
  return os.str();
}

EstimateReport estimate_revenue_allpay(const BidSample& sample, const AllocationRule& x, const AllocationRule& y,
                                       const BoundConstants& constants) {
  if (sample.format() != PaymentFormat::AllPay) throw ArgumentError(kModule, "all-pay estimator needs an all-pay sample");
  check_sample(sample, x);
  const auto N = static_cast<std::size_t>(sample.size());
  auto r = base_report(sample, x, y.describe());
  r.point = allpay_revenue_weights(x, y, N).dot(sample.bids());
  r.bound = revenue_bound(x, y, N, constants);
  return r;
}

EstimateReport estimate_revenue_firstprice(const BidSample& sample, const AllocationRule& x, const AllocationRule& y,
                                           const BoundConstants& constants) {
  if (sample.format() != PaymentFormat::FirstPrice) throw ArgumentError(kModule, "first-price estimator needs a first-price sample");
  check_sample(sample, x);
  const auto N = static_cast<std::size_t>(sample.size());
  auto r = base_report(sample, x, y.describe());
  r.point = firstprice_revenue_weights(x, y, N).dot(sample.bids());
  r.bound = revenue_bound(x, y, N, constants);
  return r;
}

EstimateReport estimate_revenue(const BidSample& sample, const AllocationRule& x, const AllocationRule& y,
                                const BoundConstants& constants) {
  return sample.format() == PaymentFormat::AllPay ? estimate_revenue_allpay(sample, x, y, constants)
                                                  : estimate_revenue_firstprice(sample, x, y, constants);
}

Eigen::VectorXd estimate_multiunit_revenues(const BidSample& sample, const AllocationRule& x) {
  check_sample(sample, x);
  const int n = sample.n();
  const auto N = static_cast<std::size_t>(sample.size());
  Eigen::VectorXd p(n - 1);
  for (int k = 1; k < n; ++k) p[k - 1] = revenue_weights(sample.format(), x, AllocationRule::multi_unit(k, n), N).dot(sample.bids());
  return p;
}

EstimateReport estimate_expected_value(const BidSample& sample, const AllocationRule& x, const BoundConstants& constants) {
  check_sample(sample, x);
  const auto N = static_cast<std::size_t>(sample.size());
  auto r = base_report(sample, x, "expected-value");
  r.point = value_weights(sample.format(), x, N).dot(sample.bids());
  if (sample.format() == PaymentFormat::AllPay) r.bound = bound_expected_value(make_bound_inputs(x, x, N), constants);
  return r;
}

EstimateReport estimate_welfare(const BidSample& sample, const AllocationRule& x, const PositionWeights& w) {
  check_sample(sample, x);
  const int n = sample.n();
  if (w.n() != n) throw ArgumentError(kModule, "welfare weights have the wrong length");
  const double vbar = estimate_expected_value(sample, x).point;
  const Eigen::VectorXd p = estimate_multiunit_revenues(sample, x);
  double sw = w[1] * vbar;
  for (int k = 1; k < n; ++k) sw -= (w[1] - w[k + 1]) * p[k - 1] / k;
  auto r = base_report(sample, x, "welfare:" + AllocationRule::position(w).describe());
  r.point = sw;
  return r;
}

}  // namespace auctionab
