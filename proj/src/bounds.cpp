#include "auctionab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace auctionab {

namespace {

constexpr const char* kModule = "bounds";
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_N(std::size_t N) {
  if (N < 1) throw ArgumentError(kModule, "sample size must be at least 1");
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError(kModule, "mixture weight must lie in (0,1]");
}

double n_log_n_root(int n) { return std::sqrt(n * std::log(static_cast<double>(n))); }

double root_N(std::size_t N) { return std::sqrt(static_cast<double>(N)); }

}  // namespace

std::string BoundConstants::describe() const {
  std::ostringstream os;
  os << "leading=" << leading << " order_one=" << order_one << " classifier=" << classifier << " ideal=" << ideal;
  return os.str();
}

BoundInputs make_bound_inputs(const AllocationRule& x, const AllocationRule& y, std::size_t N, int grid_points) {
  check_N(N);
  if (x.n() != y.n()) throw ArgumentError(kModule, "source and target rules have different agent counts");
  if (grid_points < 2) throw ArgumentError(kModule, "bound grid needs at least 2 points");
  const double lo = 0.5 / static_cast<double>(N);
  const double hi = 1.0 - lo;

  BoundInputs in;
  in.N = N;
  in.n = x.n();

  auto visit = [&](double q) {
    q = std::clamp(q, lo, hi);
    const double xp = x.xprime(q);
    const double yp = y.xprime(q);
    in.sup_xprime = std::max(in.sup_xprime, xp);
    in.sup_yprime = std::max(in.sup_yprime, yp);
    in.sup_inv_xprime = std::max(in.sup_inv_xprime, xp > 0.0 ? 1.0 / xp : kInf);
    if (yp >= 1.0) in.ratio_up = std::max(in.ratio_up, xp / yp);
    if (yp > 0.0) in.ratio_down = std::max(in.ratio_down, xp > 0.0 ? yp / xp : kInf);
  };
  for (int i = 0; i < grid_points; ++i) visit(static_cast<double>(i) / (grid_points - 1));
  // Peaks of multi-unit slopes sit at (n-1-k)/(n-2).
  const int n = x.n();
  if (n > 2) {
    for (const auto* rule : {&x, &y}) {
      const int k = rule->multi_unit_count();
      if (k >= 1 && k < n) visit(static_cast<double>(n - 1 - k) / (n - 2));
    }
  }
  return in;
}

double floored_log(double a) { return std::log(std::max(a, std::numbers::e)); }

double bound_allpay_k(const BoundInputs& in, const BoundConstants& c) {
  check_N(in.N);
  const double ratio = std::max(in.ratio_up, in.ratio_down);
  if (std::isinf(ratio)) return kInf;
  return c.leading / root_N(in.N) * in.sup_yprime * floored_log(ratio);
}

double bound_general_y(const BoundInputs& in, const BoundConstants& c) {
  check_N(in.N);
  const double ratio = std::max(in.ratio_up, in.ratio_down);
  if (std::isinf(ratio)) return kInf;
  return c.leading / root_N(in.N) * n_log_n_root(in.n) * in.sup_yprime * floored_log(ratio) + bound_bias(in, c);
}

double bound_bias(const BoundInputs& in, const BoundConstants& c) {
  check_N(in.N);
  if (std::isinf(in.ratio_down)) return kInf;
  return c.order_one / static_cast<double>(in.N) * in.sup_xprime * in.ratio_down;
}

double bound_ideal_ab(double eps, std::size_t N, double sup_yprime, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  return c.ideal * sup_yprime / (std::sqrt(eps) * root_N(N));
}

double bound_mixture(double eps, std::size_t N, int n, double sup_yprime, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  return c.order_one * n_log_n_root(n) * std::log(n / eps) * sup_yprime / root_N(N);
}

double bound_mixture_multiunit(double eps, std::size_t N, int n, double sup_yprime, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  return c.leading * std::log(n / eps) * sup_yprime / root_N(N);
}

double bound_universal(double eps, std::size_t N, int n, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  return c.leading * n * (n + std::log(1.0 / eps)) / root_N(N);
}

double bound_classifier(std::size_t N, int n, double eps, double alpha, double a, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  if (!(alpha > 0.0)) throw ArgumentError(kModule, "alpha must be positive");
  const double nd = n;
  const double exponent = c.classifier * static_cast<double>(N) * a * a / (alpha * alpha * nd * nd * nd * std::log(nd / eps));
  return std::min(1.0, std::exp(-exponent));
}

double bound_classifier_r(std::size_t N, int n, double eps, int r, double a, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  if (r < 2) throw ArgumentError(kModule, "need at least 2 candidates");
  const double nd = n;
  const double exponent = c.classifier * static_cast<double>(N) * a * a / (nd * nd * nd * std::log(r * nd / eps));
  return std::min(1.0, r * std::exp(-exponent));
}

double bound_expected_value(const BoundInputs& in, const BoundConstants& c) {
  check_N(in.N);
  if (std::isinf(in.sup_inv_xprime)) return kInf;
  return c.leading / root_N(in.N) * n_log_n_root(in.n) * floored_log(std::max(in.sup_xprime, in.sup_inv_xprime)) +
         c.order_one / static_cast<double>(in.N) * in.sup_xprime * in.sup_inv_xprime;
}

double bound_welfare(double eps, std::size_t N, int n, const BoundConstants& c) {
  check_N(N);
  check_eps(eps);
  const double nd = n;
  const double rn = root_N(N);
  return c.leading * nd * std::log(nd) * (nd + std::log(1.0 / eps)) / rn + c.leading * n_log_n_root(n) * std::log(nd / eps) / rn +
         c.order_one * nd / (eps * static_cast<double>(N));
}

}  // namespace auctionab
