#include "histtools/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace histtools {

namespace {

using gk = boost::math::quadrature::gauss_kronrod<double, 61>;

// Boost's own adaptive driver compares a panel-scaled tolerance against an
// unscaled error estimate, so narrow panels never converge.  Only the single
// 61-point rule is taken from it; subdivision happens here.
double adapt(const std::function<double(double)>& f, double lo, double hi, double tol, int depth) {
  double raw_err = 0.0;
  double est = gk::integrate(f, lo, hi, 0, 0.0, &raw_err);
  double err = raw_err * 0.5 * (hi - lo);
  double floor = 50 * std::numeric_limits<double>::epsilon() * std::abs(est);
  if (depth == 0 || err <= std::max(tol, floor)) return est;
  double mid = 0.5 * (lo + hi);
  if (!(mid > lo && mid < hi)) return est;
  return adapt(f, lo, mid, 0.5 * tol, depth - 1) + adapt(f, mid, hi, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> hints, double abs_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double h : hints) {
    if (h > a && h < b) cuts.push_back(h);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Each panel gets a share of the budget proportional to its width, with a
  // tenfold margin.
  const double budget = 0.1 * abs_tol;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i];
    double hi = cuts[i + 1];
    total += adapt(f, lo, hi, budget * (hi - lo) / (b - a), 50);
  }
  return total;
}

}  // namespace histtools
