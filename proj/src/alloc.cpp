#include "auctionab/alloc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <variant>

namespace auctionab {

namespace {

constexpr const char* kModule = "alloc";

void check_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError(kModule, "quantile " + std::to_string(q) + " outside [0,1]");
}

// Row of binomial probabilities C(m, i) q^{m-i} (1-q)^i, i = 0..m, paired
// with fixed coefficients c_i; dot(q) returns sum_i c_i * term_i. Terms with
// zero coefficient are skipped.
class WeightedBinomialRow {
 public:
  WeightedBinomialRow(int m, Eigen::VectorXd coef) : m_(m), coef_(std::move(coef)), log_binom_(m + 1), binom_(m + 1) {
    for (int i = 0; i <= m; ++i) {
      log_binom_[i] = detail::log_binomial(m, i);
      binom_[i] = detail::binomial(m, i);
    }
  }

  double dot(double q) const {
    double sum = 0.0;
    if (m_ <= detail::kExactBinomialLimit) {
      for (int i = 0; i <= m_; ++i) {
        if (coef_[i] != 0.0) sum += coef_[i] * binom_[i] * std::pow(q, m_ - i) * std::pow(1.0 - q, i);
      }
      return sum;
    }
    const double lq = q > 0.0 ? std::log(q) : -INFINITY;
    const double l1q = q < 1.0 ? std::log1p(-q) : -INFINITY;
    for (int i = 0; i <= m_; ++i) {
      if (coef_[i] == 0.0) continue;
      const int a = m_ - i;
      const int b = i;
      if ((a > 0 && q <= 0.0) || (b > 0 && q >= 1.0)) continue;
      double lg = log_binom_[i];
      if (a > 0) lg += a * lq;
      if (b > 0) lg += b * l1q;
      sum += coef_[i] * std::exp(lg);
    }
    return sum;
  }

 private:
  int m_;
  Eigen::VectorXd coef_;
  Eigen::VectorXd log_binom_;
  Eigen::VectorXd binom_;
};

std::string format_weight(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Weights

PositionWeights::PositionWeights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.size() < 2) throw ArgumentError(kModule, "position environment needs at least 2 agents");
  double prev = 1.0;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    const double v = w_[k];
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError(kModule, "position weight w_" + std::to_string(k + 1) + " outside [0,1]");
    if (v > prev) throw ArgumentError(kModule, "position weights must be nonincreasing (w_" + std::to_string(k + 1) + ")");
    prev = v;
  }
}

MarginalWeights::MarginalWeights(Eigen::VectorXd wbar) : wbar_(std::move(wbar)) {
  if (wbar_.size() < 3) throw ArgumentError(kModule, "marginal weights need n >= 2");
  if ((wbar_.array() < 0.0).any()) throw ArgumentError(kModule, "negative marginal weight");
  if (std::abs(wbar_.sum() - 1.0) > 1e-12) throw ArgumentError(kModule, "marginal weights must sum to 1");
}

MarginalWeights marginal_weights(const PositionWeights& w) {
  const int n = w.n();
  Eigen::VectorXd wbar(n + 1);
  wbar[0] = 1.0 - w[1];
  for (int k = 1; k < n; ++k) wbar[k] = w[k] - w[k + 1];
  wbar[n] = w[n];
  return MarginalWeights(std::move(wbar));
}

PositionWeights cumulative_weights(const MarginalWeights& wbar) {
  const int n = wbar.n();
  std::vector<double> w(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int k = n; k >= 1; --k) {
    acc += wbar[k];
    w[static_cast<std::size_t>(k - 1)] = std::min(acc, 1.0);
  }
  return PositionWeights(std::move(w));
}

PositionWeights k_unit_weights(int k, int n) {
  if (n < 2 || k < 0 || k > n) throw ArgumentError(kModule, "k-unit environment needs 0 <= k <= n, n >= 2");
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::fill_n(w.begin(), k, 1.0);
  return PositionWeights(std::move(w));
}

PositionWeights uniform_stair_weights(int n) {
  if (n < 2) throw ArgumentError(kModule, "uniform-stair needs n >= 2");
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) w[static_cast<std::size_t>(k - 1)] = static_cast<double>(n - k) / (n - 1);
  return PositionWeights(std::move(w));
}

PositionWeights universal_b(int n) {
  if (n < 3) throw ArgumentError(kModule, "universal B test needs n >= 3");
  std::vector<double> w(static_cast<std::size_t>(n), 0.5);
  w.front() = 1.0;
  w.back() = 0.0;
  return PositionWeights(std::move(w));
}

PositionWeights never_serve_weights(int n) { return k_unit_weights(0, n); }

PositionWeights parse_weights(std::string_view text, int n) {
  auto need_n = [&] {
    if (n < 2) throw FormatError(kModule, "preset '" + std::string(text) + "' needs an agent count n >= 2");
  };
  if (text == "one-unit") {
    need_n();
    return k_unit_weights(1, n);
  }
  if (text == "uniform-stair") {
    need_n();
    return uniform_stair_weights(n);
  }
  if (text == "universal-b") {
    need_n();
    return universal_b(n);
  }
  if (text == "never-serve") {
    need_n();
    return never_serve_weights(n);
  }
  if (text.starts_with("k-unit:")) {
    need_n();
    auto digits = text.substr(7);
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) throw FormatError(kModule, "bad unit count in '" + std::string(text) + "'");
    if (k < 1 || k > n) throw FormatError(kModule, "unit count in '" + std::string(text) + "' outside 1..n");
    return k_unit_weights(k, n);
  }
  std::vector<double> w;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      w.push_back(v);
    } catch (const std::exception&) {
      throw FormatError(kModule, "cannot parse position weights '" + std::string(text) + "'");
    }
  }
  if (w.empty()) throw FormatError(kModule, "empty position weight list");
  if (n > 0 && static_cast<int>(w.size()) != n) throw FormatError(kModule, "weight list has " + std::to_string(w.size()) + " entries, expected n=" + std::to_string(n));
  try {
    return PositionWeights(std::move(w));
  } catch (const ArgumentError& e) {
    throw FormatError(kModule, e.what());
  }
}

// ---------------------------------------------------------------------------
// Rules

struct MultiUnitNode {
  int k;
};

struct PositionNode {
  PositionWeights w;
  MarginalWeights wbar;
  // x(q) = sum_i w_{i+1} C(n-1,i) q^{n-1-i} (1-q)^i  (i rivals above)
  WeightedBinomialRow value;
  // x'(q) = (n-1) sum_j wbar[j+1] C(n-2,j) q^{n-2-j} (1-q)^j
  WeightedBinomialRow slope;
};

struct MixtureNode {
  std::vector<std::pair<double, AllocationRule>> parts;
};

struct AllocationRule::Node {
  int n;
  std::variant<MultiUnitNode, PositionNode, MixtureNode> body;
};

AllocationRule AllocationRule::multi_unit(int k, int n) {
  if (n < 2 || k < 1 || k > n) throw ArgumentError(kModule, "multi-unit rule needs 1 <= k <= n, n >= 2");
  return AllocationRule(std::make_shared<const Node>(Node{n, MultiUnitNode{k}}));
}

AllocationRule AllocationRule::position(const PositionWeights& w) {
  const int n = w.n();
  auto wbar = marginal_weights(w);
  Eigen::VectorXd value_coef(n);
  for (int i = 0; i < n; ++i) value_coef[i] = w[i + 1];
  Eigen::VectorXd slope_coef = wbar.values().segment(1, n - 1);
  return AllocationRule(std::make_shared<const Node>(
      Node{n, PositionNode{w, wbar, WeightedBinomialRow(n - 1, std::move(value_coef)),
                           WeightedBinomialRow(n - 2, std::move(slope_coef))}}));
}

AllocationRule AllocationRule::mixture(std::vector<std::pair<double, AllocationRule>> parts) {
  if (parts.empty()) throw ArgumentError(kModule, "empty mixture");
  const int n = parts.front().second.n();
  double total = 0.0;
  for (const auto& [weight, rule] : parts) {
    if (rule.n() != n) throw ArgumentError(kModule, "mixture components have different agent counts");
    if (!(weight >= 0.0)) throw ArgumentError(kModule, "negative mixture weight");
    total += weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError(kModule, "mixture weights must sum to 1");
  // Zero-weight components contribute nothing; drop them.
  std::erase_if(parts, [](const auto& p) { return p.first == 0.0; });
  if (parts.size() == 1) return parts.front().second;
  return AllocationRule(std::make_shared<const Node>(Node{n, MixtureNode{std::move(parts)}}));
}

int AllocationRule::n() const { return node_->n; }

double AllocationRule::x(double q) const {
  check_quantile(q);
  const int n = node_->n;
  return std::visit(
      [&](const auto& body) -> double {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, MultiUnitNode>) {
          return multi_unit_alloc(body.k, n, q);
        } else if constexpr (std::is_same_v<T, PositionNode>) {
          return std::clamp(body.value.dot(q), 0.0, 1.0);
        } else {
          double sum = 0.0;
          for (const auto& [weight, rule] : body.parts) sum += weight * rule.x(q);
          return sum;
        }
      },
      node_->body);
}

double AllocationRule::xprime(double q) const {
  check_quantile(q);
  const int n = node_->n;
  return std::visit(
      [&](const auto& body) -> double {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, MultiUnitNode>) {
          return multi_unit_alloc_deriv(body.k, n, q);
        } else if constexpr (std::is_same_v<T, PositionNode>) {
          return std::max(0.0, (n - 1) * body.slope.dot(q));
        } else {
          double sum = 0.0;
          for (const auto& [weight, rule] : body.parts) sum += weight * rule.xprime(q);
          return sum;
        }
      },
      node_->body);
}

Eigen::ArrayXd AllocationRule::x(const Eigen::ArrayXd& q) const {
  Eigen::ArrayXd out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = x(q[i]);
  return out;
}

Eigen::ArrayXd AllocationRule::xprime(const Eigen::ArrayXd& q) const {
  Eigen::ArrayXd out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = xprime(q[i]);
  return out;
}

MarginalWeights AllocationRule::marginals() const {
  const int n = node_->n;
  return std::visit(
      [&](const auto& body) -> MarginalWeights {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, MultiUnitNode>) {
          Eigen::VectorXd wbar = Eigen::VectorXd::Zero(n + 1);
          wbar[body.k] = 1.0;
          return MarginalWeights(std::move(wbar));
        } else if constexpr (std::is_same_v<T, PositionNode>) {
          return body.wbar;
        } else {
          Eigen::VectorXd wbar = Eigen::VectorXd::Zero(n + 1);
          for (const auto& [weight, rule] : body.parts) wbar += weight * rule.marginals().values();
          wbar = wbar.cwiseMax(0.0);
          wbar /= wbar.sum();
          return MarginalWeights(std::move(wbar));
        }
      },
      node_->body);
}

int AllocationRule::multi_unit_count() const {
  if (const auto* mu = std::get_if<MultiUnitNode>(&node_->body)) return mu->k;
  if (std::holds_alternative<MixtureNode>(node_->body)) return 0;
  const auto wbar = marginals();
  for (int k = 1; k <= wbar.n(); ++k) {
    if (wbar[k] == 1.0) return k;
  }
  return 0;
}

std::string AllocationRule::describe() const {
  const int n = node_->n;
  return std::visit(
      [&](const auto& body) -> std::string {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, MultiUnitNode>) {
          return body.k == 1 ? std::string("one-unit") : "k-unit:" + std::to_string(body.k);
        } else if constexpr (std::is_same_v<T, PositionNode>) {
          if (body.w == uniform_stair_weights(n)) return "uniform-stair";
          if (n >= 3 && body.w == universal_b(n)) return "universal-b";
          if (body.w == never_serve_weights(n)) return "never-serve";
          for (int k = 1; k <= n; ++k) {
            if (body.w == k_unit_weights(k, n)) return k == 1 ? std::string("one-unit") : "k-unit:" + std::to_string(k);
          }
          std::string s;
          for (double v : body.w.values()) s += (s.empty() ? "" : ",") + format_weight(v);
          return s;
        } else {
          std::string s = "mix(";
          bool first = true;
          for (const auto& [weight, rule] : body.parts) {
            if (!first) s += "+";
            s += format_weight(weight) + "*" + rule.describe();
            first = false;
          }
          return s + ")";
        }
      },
      node_->body);
}

AllocationRule mixture(const AllocationRule& a, const AllocationRule& b, double eps) {
  if (a.n() != b.n()) throw ArgumentError(kModule, "mixture of rules with different agent counts");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ArgumentError(kModule, "mixture weight outside [0,1]");
  return AllocationRule::mixture({{1.0 - eps, a}, {eps, b}});
}

double position_alloc(const PositionWeights& w, double q) { return AllocationRule::position(w).x(q); }

double position_alloc_deriv(const PositionWeights& w, double q) { return AllocationRule::position(w).xprime(q); }

AllocationRule parse_rule(std::string_view text, int n) {
  // "mix(w1*rule1+w2*rule2+...)", the form printed by describe().
  if (text.starts_with("mix(") && text.ends_with(")")) {
    const std::string_view body = text.substr(4, text.size() - 5);
    std::vector<std::pair<double, AllocationRule>> parts;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
      if (i < body.size() && body[i] == '(') ++depth;
      if (i < body.size() && body[i] == ')') --depth;
      if (i < body.size() && (body[i] != '+' || depth > 0)) continue;
      const std::string_view part = body.substr(start, i - start);
      const auto star = part.find('*');
      if (star == std::string_view::npos) throw FormatError(kModule, "mixture part '" + std::string(part) + "' lacks weight*rule");
      double weight = 0.0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + star, weight);
      if (ec != std::errc() || ptr != part.data() + star) throw FormatError(kModule, "bad mixture weight in '" + std::string(part) + "'");
      parts.emplace_back(weight, parse_rule(part.substr(star + 1), n));
      start = i + 1;
    }
    return AllocationRule::mixture(std::move(parts));
  }
  const auto w = parse_weights(text, n);
  const int k = [&] {
    const auto wbar = marginal_weights(w);
    for (int j = 1; j <= w.n(); ++j)
      if (wbar[j] == 1.0) return j;
    return 0;
  }();
  if (k > 0) return AllocationRule::multi_unit(k, w.n());
  return AllocationRule::position(w);
}

double max_slope(const AllocationRule& rule, int grid_size) {
  if (grid_size < 2) throw ArgumentError(kModule, "max_slope needs a grid of at least 2 points");
  double best = 0.0;
  for (int i = 0; i < grid_size; ++i) best = std::max(best, rule.xprime(static_cast<double>(i) / (grid_size - 1)));
  const int n = rule.n();
  const int k = rule.multi_unit_count();
  if (k >= 1 && k < n && n > 2) {
    const double qstar = static_cast<double>(n - 1 - k) / (n - 2);
    best = std::max(best, rule.xprime(qstar));
  }
  return best;
}

}  // namespace auctionab
