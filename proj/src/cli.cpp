#include "auctionab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "auctionab/abtest.hpp"
#include "auctionab/bounds.hpp"
#include "auctionab/estim.hpp"
#include "auctionab/harness.hpp"
#include "auctionab/rng.hpp"

namespace auctionab {

namespace {

constexpr const char* kModule = "cli";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::istringstream is(item);
    double v = 0.0;
    if (!(is >> v) || !is.eof()) throw FormatError(kModule, "bad list entry '" + item + "'");
    out.push_back(static_cast<T>(v));
  }
  if (out.empty()) throw FormatError(kModule, "empty list '" + text + "'");
  return out;
}

// Options shared by the Monte Carlo subcommands.
struct CommonOptions {
  std::string design = "1";
  std::string a;
  std::string b;
  int n = 32;
  double N = 10000;
  double eps = 0.001;
  double trials = 1000;
  int m = 10000;
  std::string dist = "beta22";
  std::string format = "allpay";
  std::uint64_t seed = 0;
  double leading = 40.0;
  double order_one = 1.0;
  double classifier = 1.0;

  void add_design(CLI::App* sub) {
    sub->add_option("--design", design, "1, 2, 3 or custom")->capture_default_str();
    sub->add_option("--a", a, "incumbent rule for a custom design");
    sub->add_option("--b", b, "candidate rule for a custom design");
  }
  void add_sampling(CLI::App* sub) {
    sub->add_option("--n", n, "agents")->capture_default_str();
    sub->add_option("--N", N, "bids per sample")->capture_default_str();
    sub->add_option("--eps", eps, "mixture weight of the candidate")->capture_default_str();
    sub->add_option("--trials", trials, "Monte Carlo replicates")->capture_default_str();
    sub->add_option("--m", m, "quantile grid intervals")->capture_default_str();
    sub->add_option("--dist", dist, "uniform, beta22 or a q,v CSV path")->capture_default_str();
    sub->add_option("--format", format, "allpay or firstprice")->capture_default_str();
  }
  void add_seed(CLI::App* sub) { sub->add_option("--seed", seed, "master seed")->required(); }
  void add_constants(CLI::App* sub) {
    sub->add_option("--leading-constant", leading, "constant of the sqrt(N) bound terms")->capture_default_str();
    sub->add_option("--order-one-constant", order_one, "O(1) constant of lower-order bound terms")->capture_default_str();
    sub->add_option("--classifier-constant", classifier, "constant in the classifier exponent")->capture_default_str();
  }

  BoundConstants constants() const {
    BoundConstants c;
    c.leading = leading;
    c.order_one = order_one;
    c.classifier = classifier;
    return c;
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    if (design == "custom") {
      if (a.empty() || b.empty()) throw ArgumentError(kModule, "custom design needs --a and --b");
      s.design = 0;
      s.custom_a = parse_rule(a, n);
      s.custom_b = parse_rule(b, n);
    } else if (design == "1" || design == "2" || design == "3") {
      s.design = std::stoi(design);
    } else {
      throw ArgumentError(kModule, "unknown design '" + design + "'");
    }
    s.n = n;
    s.N = to_count(N, "--N");
    s.eps = eps;
    s.trials = to_count(trials, "--trials");
    s.m = m;
    s.dist = distribution_by_name(dist);
    s.format = parse_format(format);
    s.seed = seed;
    s.constants = constants();
    return s;
  }

  static std::size_t to_count(double v, const char* flag) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) throw ArgumentError(kModule, std::string(flag) + " must be a positive integer");
    return static_cast<std::size_t>(v);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void run_bounds(std::ostream& out, const std::string& source, const std::string& target, int n, std::size_t N, double eps,
                double alpha, double gap, int r, const BoundConstants& c) {
  const AllocationRule x = parse_rule(source, n);
  const AllocationRule y = parse_rule(target, n);
  const auto in = make_bound_inputs(x, y, N);
  out << "# auctionab-bounds v1 (" << c.describe() << ")\n"
      << "bound,value\n";
  if (y.multi_unit_count() > 0) out << "allpay_k," << fmt(bound_allpay_k(in, c)) << '\n';
  out << "general_y," << fmt(bound_general_y(in, c)) << '\n'
      << "bias," << fmt(bound_bias(in, c)) << '\n'
      << "ideal_ab," << fmt(bound_ideal_ab(eps, N, in.sup_yprime, c)) << '\n'
      << "mixture," << fmt(bound_mixture(eps, N, n, in.sup_yprime, c)) << '\n'
      << "mixture_multiunit," << fmt(bound_mixture_multiunit(eps, N, n, in.sup_yprime, c)) << '\n'
      << "universal," << fmt(bound_universal(eps, N, n, c)) << '\n'
      << "classifier," << fmt(bound_classifier(N, n, eps, alpha, gap, c)) << '\n'
      << "classifier_r," << fmt(bound_classifier_r(N, n, eps, r, gap, c)) << '\n'
      << "expected_value," << fmt(bound_expected_value(make_bound_inputs(x, x, N), c)) << '\n'
      << "welfare," << fmt(bound_welfare(eps, N, n, c)) << '\n';
}

}  // namespace

std::vector<std::string> config_to_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(kModule, "cannot open config '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(kModule, path + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError(kModule, path + ":" + std::to_string(line_no) + ": empty key");
    if (value == "true") {
      args.push_back("--" + key);
    } else if (value != "false") {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

int cli_main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual revenue and welfare estimation for position auctions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string out_path;
  std::string config_path;
  app.add_option("--out", out_path, "write output to this file instead of stdout");
  app.add_option("--config", config_path, "key=value file mirroring the flags");

  CommonOptions common;

  auto* simulate = app.add_subcommand("simulate", "mean absolute deviation of one design");
  common.add_design(simulate);
  common.add_sampling(simulate);
  common.add_seed(simulate);
  common.add_constants(simulate);

  auto* sweep = app.add_subcommand("sweep", "median relative error across mixture weights");
  std::string eps_list = "0.001,0.01,0.05,0.1,0.2,0.3,0.5,0.7,0.9";
  common.add_design(sweep);
  common.add_sampling(sweep);
  common.add_seed(sweep);
  sweep->add_option("--eps-list", eps_list, "comma-separated mixture weights")->capture_default_str();

  auto* table = app.add_subcommand("table", "normalized MAD over a grid of n and N");
  std::string ns_text = "4,8,16,32,64,128,256,512,1024";
  std::string Ns_text = "2,10,100,1000,10000,100000";
  common.add_design(table);
  common.add_sampling(table);
  common.add_seed(table);
  common.add_constants(table);
  table->add_option("--ns", ns_text, "agent counts")->capture_default_str();
  table->add_option("--Ns", Ns_text, "sample sizes")->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "one estimate from a bid CSV");
  std::string bids_path;
  std::string source;
  std::string target = "one-unit";
  std::string quantity = "revenue";
  std::string truth_dist;
  std::optional<double> label_eps;
  estimate->add_option("--bids", bids_path, "bid CSV (header 'bid'); a .json sidecar supplies defaults")->required();
  estimate->add_option("--source", source, "rule that generated the bids");
  estimate->add_option("--target", target, "rule or position weights to evaluate")->capture_default_str();
  estimate->add_option("--quantity", quantity, "revenue, multiunit, expected-value or welfare")->capture_default_str();
  estimate->add_option("--truth-dist", truth_dist, "value distribution for a quadrature truth column");
  estimate->add_option("--label-eps", label_eps, "mixture weight recorded in the report");
  estimate->add_option("--n", common.n, "agents (overrides the sidecar)");
  estimate->add_option("--format", common.format, "allpay or firstprice (overrides the sidecar)");
  estimate->add_option("--seed", common.seed, "seed recorded in the report");
  estimate->add_option("--m", common.m, "grid intervals for the truth column")->capture_default_str();
  common.add_constants(estimate);

  auto* compare = app.add_subcommand("compare", "classify which of two candidates earns more");
  std::string incumbent = "uniform-stair";
  std::string b1 = "one-unit";
  std::string b2 = "k-unit:2";
  double alpha = 1.0;
  std::string compare_bids;
  compare->add_option("--incumbent", incumbent, "incumbent rule A")->capture_default_str();
  compare->add_option("--b1", b1, "candidate B1")->capture_default_str();
  compare->add_option("--b2", b2, "candidate B2")->capture_default_str();
  compare->add_option("--alpha", alpha, "threshold: decide P_B1 > alpha P_B2")->capture_default_str();
  compare->add_option("--bids", compare_bids, "decide from a bid CSV instead of simulating");
  common.add_sampling(compare);
  common.add_seed(compare);
  common.add_constants(compare);

  auto* bounds = app.add_subcommand("bounds", "table of applicable error bounds");
  std::string bsource = "uniform-stair";
  std::string btarget = "one-unit";
  double gap = 0.02;
  int r = 2;
  bounds->add_option("--source", bsource, "rule generating the bids")->capture_default_str();
  bounds->add_option("--target", btarget, "rule whose revenue is estimated")->capture_default_str();
  bounds->add_option("--n", common.n, "agents")->capture_default_str();
  bounds->add_option("--N", common.N, "bids")->capture_default_str();
  bounds->add_option("--eps", common.eps, "mixture weight")->capture_default_str();
  bounds->add_option("--alpha", alpha, "classifier threshold")->capture_default_str();
  bounds->add_option("--gap", gap, "true revenue gap for the classifier bounds")->capture_default_str();
  bounds->add_option("--r", r, "candidates for the r-way classifier")->capture_default_str();
  common.add_constants(bounds);

  // A config file is expanded into flags placed right after the
  // subcommand, so explicit flags (parsed later) take precedence.
  std::vector<std::string> args = raw_args;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        auto extra = config_to_args(args[i + 1]);
        std::size_t at = 0;
        while (at < args.size() && args[at] != "simulate" && args[at] != "sweep" && args[at] != "table" && args[at] != "estimate" &&
               args[at] != "compare" && args[at] != "bounds")
          ++at;
        at = at < args.size() ? at + 1 : args.size();
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
      } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
      }
      break;
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      err << "usage error: cannot write '" << out_path << "'\n";
      return 2;
    }
  }
  std::ostream& sink = out_path.empty() ? out : file;

  try {
    if (simulate->parsed()) {
      const auto spec = common.spec();
      const auto r = run_design(spec);
      write_mad_header(sink);
      write_mad_row(sink, spec, r);
    } else if (sweep->parsed()) {
      const auto spec = common.spec();
      write_sweep(sink, spec, epsilon_sweep(spec, parse_list<double>(eps_list)));
    } else if (table->parsed()) {
      const auto spec = common.spec();
      write_table_grid(sink, mad_table(spec, parse_list<int>(ns_text), parse_list<std::size_t>(Ns_text)));
    } else if (estimate->parsed()) {
      std::optional<SidecarInfo> side;
      try {
        side = read_sidecar(bids_path + ".json");
      } catch (const FormatError&) {
        // No sidecar; flags must supply everything.
      }
      const int n = estimate->count("--n") > 0 || !side ? common.n : side->n;
      const PaymentFormat format = estimate->count("--format") > 0 || !side ? parse_format(common.format) : side->format;
      if (source.empty() && !side) throw ArgumentError(kModule, "--source is required without a sidecar");
      const AllocationRule x = parse_rule(source.empty() ? side->rule : source, n);
      const BidSample sample(format, x, read_bids_csv(bids_path));
      const auto c = common.constants();
      std::optional<ValueDistribution> dist;
      if (!truth_dist.empty()) dist = distribution_by_name(truth_dist);
      const QuantileGrid grid(common.m);

      auto finish = [&](EstimateReport rep) {
        rep.seed = common.seed;
        rep.eps = label_eps;
        sink << report_csv_header() << ",target\n" << report_csv_row(rep) << ',' << rep.target << '\n';
      };
      if (quantity == "revenue") {
        const AllocationRule y = parse_rule(target, n);
        auto rep = estimate_revenue(sample, x, y, c);
        if (dist) rep.truth = true_revenue(*dist, y, grid);
        finish(rep);
      } else if (quantity == "expected-value") {
        auto rep = estimate_expected_value(sample, x, c);
        if (dist) rep.truth = expected_value(*dist, grid);
        finish(rep);
      } else if (quantity == "welfare") {
        const auto w = parse_weights(target, n);
        auto rep = estimate_welfare(sample, x, w);
        if (dist) rep.truth = true_welfare(*dist, AllocationRule::position(w), grid);
        finish(rep);
      } else if (quantity == "multiunit") {
        const Eigen::VectorXd p = estimate_multiunit_revenues(sample, x);
        sink << "k,estimate" << (dist ? ",truth" : "") << '\n';
        for (int k = 1; k < n; ++k) {
          sink << k << ',' << fmt(p[k - 1]);
          if (dist) sink << ',' << fmt(true_revenue(*dist, AllocationRule::multi_unit(k, n), grid));
          sink << '\n';
        }
      } else {
        throw ArgumentError(kModule, "unknown --quantity '" + quantity + "'");
      }
    } else if (compare->parsed()) {
      const int n = common.n;
      const AllocationRule a = parse_rule(incumbent, n);
      const AllocationRule rb1 = parse_rule(b1, n);
      const AllocationRule rb2 = parse_rule(b2, n);
      const auto format = parse_format(common.format);
      // C = (1 - 2 eps) A + eps B1 + eps B2.
      ABDesign design{a, {{common.eps, rb1}, {common.eps, rb2}}};
      design.format = format;
      const AllocationRule cmech = build_test_mechanism(design);
      const auto c = common.constants();
      if (!compare_bids.empty()) {
        const BidSample sample(format, cmech, read_bids_csv(compare_bids));
        const auto cmp = compare_revenues(sample, cmech, rb1, rb2, alpha);
        sink << "verdict,margin\n" << cmp.verdict << ',' << fmt(cmp.margin) << '\n';
      } else {
        const auto dist = distribution_by_name(common.dist);
        const QuantileGrid grid(common.m);
        const double p1 = true_revenue(dist, rb1, grid);
        const double p2 = true_revenue(dist, rb2, grid);
        const int truth = p1 - alpha * p2 > 0.0 ? 1 : 0;
        const double a_gap = std::abs(p1 - alpha * p2);
        const std::size_t N = CommonOptions::to_count(common.N, "--N");
        const std::size_t trials = CommonOptions::to_count(common.trials, "--trials");
        const BidCurve curve = bid_curve(format, dist, cmech, grid);
        const Eigen::VectorXd w1 = revenue_weights(format, cmech, rb1, N);
        const Eigen::VectorXd w2 = revenue_weights(format, cmech, rb2, N);
        std::size_t wrong = 0;
        Comparison first{};
        for (std::size_t t = 0; t < trials; ++t) {
          const auto sample = sample_bids(curve, N, derive_seed(common.seed, t));
          const auto cmp = compare_revenues(sample.bids(), w1, w2, alpha);
          if (t == 0) first = cmp;
          wrong += cmp.verdict != truth ? 1 : 0;
        }
        sink << "# auctionab-compare v1\n"
             << "n,N,eps,alpha,trials,seed,verdict,margin,true_verdict,abs_true_gap,misclassification_rate,bound\n"
             << n << ',' << N << ',' << common.eps << ',' << alpha << ',' << trials << ',' << common.seed << ',' << first.verdict << ','
             << fmt(first.margin) << ',' << truth << ',' << fmt(a_gap) << ',' << fmt(static_cast<double>(wrong) / trials) << ','
             << fmt(bound_classifier(N, n, 2.0 * common.eps, alpha, a_gap, c)) << '\n';
      }
    } else if (bounds->parsed()) {
      run_bounds(sink, bsource, btarget, common.n, CommonOptions::to_count(common.N, "--N"), common.eps, alpha, gap, r,
                 common.constants());
    }
  } catch (const DegenerateError& e) {
    err << "numeric failure in " << e.module() << " at quantile " << e.quantile() << ": " << e.what() << '\n';
    return 1;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace auctionab
