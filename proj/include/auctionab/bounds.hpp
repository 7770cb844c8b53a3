#pragma once

// Closed-form error bounds for the counterfactual estimators. All bounds are
// on the mean absolute error of a per-agent quantity. Asymptotic O(1)
// constants are exposed through BoundConstants.

#include <cstddef>
#include <string>

#include "auctionab/alloc.hpp"

namespace auctionab {

struct BoundConstants {
  double leading = 40.0;     // stated constant of the sqrt(N) terms
  double order_one = 1.0;    // O(1) factors on 1/N terms and in corollaries
  double classifier = 1.0;   // constant inside the classifier exponent
  double ideal = 1.0;        // Theta(1) of the ideal A/B bound

  std::string describe() const;
};

// Suprema entering the revenue bounds, taken on the clamped evaluation grid
// q in [1/(2N), 1 - 1/(2N)] used by the estimator.
struct BoundInputs {
  std::size_t N = 0;
  int n = 0;
  double sup_yprime = 0.0;
  double sup_xprime = 0.0;
  double sup_inv_xprime = 0.0;  // sup 1/x'
  double ratio_up = 0.0;        // sup over {y' >= 1} of x'/y'; 0 if empty
  double ratio_down = 0.0;      // sup y'/x'; +inf if x' vanishes where y' > 0
};

// Evaluates the suprema on `grid_points` clamped points, plus the analytic
// slope maximizers of multi-unit rules.
BoundInputs make_bound_inputs(const AllocationRule& x, const AllocationRule& y, std::size_t N, int grid_points = 10001);

// log max{a, e}: the log argument is floored at e so bounds stay positive.
double floored_log(double a);

// Multi-unit target:
//   C/sqrt(N) * sup y' * log max{ratio_up, ratio_down}.
double bound_allpay_k(const BoundInputs& in, const BoundConstants& c = {});

// General position-auction target:
//   C/sqrt(N) * sqrt(n log n) * sup y' * log max{ratio_up, ratio_down}
//   + c1/N * sup x' * ratio_down.
double bound_general_y(const BoundInputs& in, const BoundConstants& c = {});

// Bias term alone: c1/N * sup x' * sup y'/x'.
double bound_bias(const BoundInputs& in, const BoundConstants& c = {});

// Ideal A/B test (treatment bids in equilibrium for B alone):
//   c_ideal * sup y' / (sqrt(eps) sqrt(N)).
double bound_ideal_ab(double eps, std::size_t N, double sup_yprime, const BoundConstants& c = {});

// Mixture C = (1-eps)A + eps B, general B:
//   c1 * sqrt(n log n) * log(n/eps) * sup x_B' / sqrt(N).
double bound_mixture(double eps, std::size_t N, int n, double sup_yprime, const BoundConstants& c = {});
// Mixture with multi-unit B: C * log(n/eps) * sup x_B' / sqrt(N).
double bound_mixture_multiunit(double eps, std::size_t N, int n, double sup_yprime, const BoundConstants& c = {});

// Universal B test, all position auctions at once: C n (n + log(1/eps)) / sqrt(N).
double bound_universal(double eps, std::size_t N, int n, const BoundConstants& c = {});

// Binary revenue classifier: exp(-c Na^2 / (alpha^2 n^3 log(n/eps))), capped at 1.
double bound_classifier(std::size_t N, int n, double eps, double alpha, double a, const BoundConstants& c = {});
// Best of r candidates: r exp(-c Na^2 / (n^3 log(rn/eps))), capped at 1.
double bound_classifier_r(std::size_t N, int n, double eps, int r, double a, const BoundConstants& c = {});

// Expected value from an all-pay source:
//   C/sqrt(N) sqrt(n log n) log max{sup x', sup 1/x'} + c1/N sup x' sup 1/x'.
double bound_expected_value(const BoundInputs& in, const BoundConstants& c = {});

// Welfare under a universal-B mixture:
//   C n log n (n + log(1/eps))/sqrt(N) + C sqrt(n log n) log(n/eps)/sqrt(N)
//   + c1 n/(eps N).
double bound_welfare(double eps, std::size_t N, int n, const BoundConstants& c = {});

}  // namespace auctionab
