#pragma once

// Monte Carlo experiment runner for the three simulation designs: mean
// absolute deviation of the revenue estimator, epsilon sweeps, and the full
// (n, N) table.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "auctionab/alloc.hpp"
#include "auctionab/bounds.hpp"
#include "auctionab/dist.hpp"
#include "auctionab/equil.hpp"

namespace auctionab {

// Designs (A incumbent, B candidate):
//   1: A one-unit, B uniform-stair
//   2: A uniform-stair, B one-unit
//   3: A (n-1)-unit, B one-unit
// Design 0 uses custom_a and custom_b.
std::pair<AllocationRule, AllocationRule> design_rules(int design, int n);

struct ExperimentSpec {
  int design = 1;
  std::optional<AllocationRule> custom_a;
  std::optional<AllocationRule> custom_b;
  int n = 32;
  std::size_t N = 10000;
  double eps = 0.001;
  std::size_t trials = 1000;
  int m = 10000;
  ValueDistribution dist = ValueDistribution::beta22();
  PaymentFormat format = PaymentFormat::AllPay;
  std::uint64_t seed = 0;
  BoundConstants constants;

  std::pair<AllocationRule, AllocationRule> rules() const;
  void validate() const;
};

struct MadResult {
  double raw_mad = 0.0;               // mean |P_hat - P| of per-agent revenue
  double normalized_mad = 0.0;        // raw_mad * normalization_factor_used
  double normalization_factor_used = 0.0;  // sqrt(N): total-revenue MAD times sqrt(N)/n
  double alt_normalized_mad = 0.0;    // raw_mad * sqrt(N n): total-revenue MAD times sqrt(N/n)
  double mc_rel_error_estimate = 0.0; // standard error of raw_mad over raw_mad
  double truth = 0.0;                 // per-agent revenue of B by quadrature
  double mean_estimate = 0.0;
  double median_rel_error = 0.0;      // median |P_hat - P| / P
  double bound = 0.0;                 // general-target bound, same normalization
  double raw_bound = 0.0;
};

// Worker threads for Monte Carlo loops: AUCTIONAB_WORKERS if set, else the
// hardware concurrency.
unsigned worker_count();

// Trial t draws its sample with derive_seed(seed, t); per-trial errors are
// combined in trial order, so the result does not depend on the worker count.
MadResult run_design(const ExperimentSpec& spec);

struct SweepRow {
  double eps;
  double median_rel_error;
  double raw_mad;
  double truth;
};

std::vector<SweepRow> epsilon_sweep(const ExperimentSpec& spec, const std::vector<double>& eps_list);

struct TableCell {
  int n;
  std::size_t N;
  MadResult result;
};

std::vector<TableCell> mad_table(const ExperimentSpec& base, const std::vector<int>& ns, const std::vector<std::size_t>& Ns);

// Output formats. Each begins with a versioned "# auctionab-..." comment.
void write_mad_header(std::ostream& out);
void write_mad_row(std::ostream& out, const ExperimentSpec& spec, const MadResult& r);
void write_sweep(std::ostream& out, const ExperimentSpec& spec, const std::vector<SweepRow>& rows);
// Grid layout: one line per n, one column per N, bound last.
void write_table_grid(std::ostream& out, const std::vector<TableCell>& cells);

}  // namespace auctionab
