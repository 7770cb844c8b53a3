#include "auctionab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "auctionab/estim.hpp"
#include "auctionab/rng.hpp"

namespace auctionab {

namespace {

constexpr const char* kModule = "harness";

// Runs body(t) for t in [0, count) on the worker pool. The first exception
// thrown by any worker is rethrown here.
template <class Body>
void parallel_for(std::size_t count, Body body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(worker_count(), static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t t; (t = next.fetch_add(1)) < count;) body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::pair<AllocationRule, AllocationRule> design_rules(int design, int n) {
  switch (design) {
    case 1:
      return {AllocationRule::multi_unit(1, n), AllocationRule::position(uniform_stair_weights(n))};
    case 2:
      return {AllocationRule::position(uniform_stair_weights(n)), AllocationRule::multi_unit(1, n)};
    case 3:
      return {AllocationRule::multi_unit(n - 1, n), AllocationRule::multi_unit(1, n)};
    default:
      throw ArgumentError(kModule, "unknown design " + std::to_string(design));
  }
}

std::pair<AllocationRule, AllocationRule> ExperimentSpec::rules() const {
  if (design == 0) {
    if (!custom_a || !custom_b) throw ArgumentError(kModule, "custom design needs both rules");
    return {*custom_a, *custom_b};
  }
  return design_rules(design, n);
}

void ExperimentSpec::validate() const {
  if (n < 2) throw ArgumentError(kModule, "need at least 2 agents");
  if (N < 1) throw ArgumentError(kModule, "sample size must be at least 1");
  if (trials < 1) throw ArgumentError(kModule, "need at least 1 trial");
  if (m < 2) throw ArgumentError(kModule, "grid needs m >= 2");
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError(kModule, "mixture weight must lie in (0,1]");
  const auto [a, b] = rules();
  if (a.n() != n || b.n() != n) throw ArgumentError(kModule, "design rules do not match n");
}

unsigned worker_count() {
  if (const char* env = std::getenv("AUCTIONAB_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MadResult run_design(const ExperimentSpec& spec) {
  spec.validate();
  const auto [a, b] = spec.rules();
  const AllocationRule c = mixture(a, b, spec.eps);
  const QuantileGrid grid(spec.m);
  const BidCurve curve = bid_curve(spec.format, spec.dist, c, grid);
  const double truth = true_revenue(spec.dist, b, grid);
  const Eigen::VectorXd w = revenue_weights(spec.format, c, b, spec.N);

  std::vector<double> estimates(spec.trials);
  parallel_for(spec.trials, [&](std::size_t t) {
    const auto idx = sample_grid_indices(curve.bids.size(), spec.N, derive_seed(spec.seed, t));
    double s = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) s += w[static_cast<Eigen::Index>(i)] * curve.bids[idx[i]];
    estimates[t] = s;
  });

  MadResult r;
  r.truth = truth;
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  double sum_est = 0.0;
  std::vector<double> rel(spec.trials);
  for (std::size_t t = 0; t < spec.trials; ++t) {
    const double e = std::abs(estimates[t] - truth);
    sum_abs += e;
    sum_sq += e * e;
    sum_est += estimates[t];
    rel[t] = truth > 0.0 ? e / truth : e;
  }
  const double T = static_cast<double>(spec.trials);
  r.raw_mad = sum_abs / T;
  r.mean_estimate = sum_est / T;
  r.median_rel_error = median(std::move(rel));
  if (spec.trials > 1 && r.raw_mad > 0.0) {
    const double var = std::max(0.0, (sum_sq / T - r.raw_mad * r.raw_mad) * T / (T - 1.0));
    r.mc_rel_error_estimate = std::sqrt(var / T) / r.raw_mad;
  }
  const double rootN = std::sqrt(static_cast<double>(spec.N));
  r.normalization_factor_used = rootN;
  r.normalized_mad = r.raw_mad * rootN;
  r.alt_normalized_mad = r.raw_mad * std::sqrt(static_cast<double>(spec.N) * spec.n);
  r.raw_bound = bound_general_y(make_bound_inputs(c, b, spec.N), spec.constants);
  r.bound = r.raw_bound * rootN;
  return r;
}

std::vector<SweepRow> epsilon_sweep(const ExperimentSpec& spec, const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw ArgumentError(kModule, "empty epsilon list");
  std::vector<SweepRow> rows;
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError(kModule, "sweep epsilon must lie in (0,1)");
    ExperimentSpec s = spec;
    s.eps = eps;
    const auto r = run_design(s);
    rows.push_back(SweepRow{eps, r.median_rel_error, r.raw_mad, r.truth});
  }
  return rows;
}

std::vector<TableCell> mad_table(const ExperimentSpec& base, const std::vector<int>& ns, const std::vector<std::size_t>& Ns) {
  std::vector<TableCell> cells;
  for (int n : ns) {
    for (std::size_t N : Ns) {
      ExperimentSpec s = base;
      s.n = n;
      s.N = N;
      cells.push_back(TableCell{n, N, run_design(s)});
    }
  }
  return cells;
}

void write_mad_header(std::ostream& out) {
  out << "# auctionab-mad v1\n"
      << "design,n,N,eps,trials,seed,raw_mad,norm_sqrtN_over_n,norm_sqrt_N_over_n_alt,bound\n";
}

void write_mad_row(std::ostream& out, const ExperimentSpec& spec, const MadResult& r) {
  const auto old = out.precision(10);
  out << (spec.design == 0 ? std::string("custom") : std::to_string(spec.design)) << ',' << spec.n << ',' << spec.N << ','
      << spec.eps << ',' << spec.trials << ',' << spec.seed << ',' << r.raw_mad << ',' << r.normalized_mad << ','
      << r.alt_normalized_mad << ',' << r.bound << '\n';
  out.precision(old);
}

void write_sweep(std::ostream& out, const ExperimentSpec& spec, const std::vector<SweepRow>& rows) {
  const auto old = out.precision(10);
  out << "# auctionab-sweep v1\n"
      << "design,n,N,trials,seed,eps,median_rel_error,raw_mad,truth\n";
  for (const auto& row : rows) {
    out << spec.design << ',' << spec.n << ',' << spec.N << ',' << spec.trials << ',' << spec.seed << ',' << row.eps << ','
        << row.median_rel_error << ',' << row.raw_mad << ',' << row.truth << '\n';
  }
  out.precision(old);
}

void write_table_grid(std::ostream& out, const std::vector<TableCell>& cells) {
  std::vector<std::size_t> Ns;
  std::map<int, std::vector<const TableCell*>> rows;
  for (const auto& c : cells) {
    if (std::find(Ns.begin(), Ns.end(), c.N) == Ns.end()) Ns.push_back(c.N);
    rows[c.n].push_back(&c);
  }
  const auto old = out.precision(4);
  out << "# auctionab-table v1 (normalized MAD, factor sqrt(N)/n on total revenue)\nn";
  for (auto N : Ns) out << ",N=" << N;
  out << ",bound\n" << std::fixed;
  for (const auto& [n, row] : rows) {
    out << n;
    for (const auto* c : row) out << ',' << c->result.normalized_mad;
    // The bound depends on N only through lower-order terms; report the
    // largest-N cell's value.
    out << ',' << row.back()->result.bound << '\n';
  }
  out.unsetf(std::ios::fixed);
  out.precision(old);
}

}  // namespace auctionab
