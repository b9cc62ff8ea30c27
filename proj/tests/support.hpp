#pragma once

// Test-only generators and oracles.  Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "histtools/histogram.hpp"

namespace histtools::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<double> random_breaks(Rng& rng, std::size_t max_bins = 20) {
  std::size_t bins = uniform_index(rng, 1, max_bins);
  std::vector<double> b{uniform(rng, -50.0, 50.0)};
  for (std::size_t i = 0; i < bins; ++i) b.push_back(b.back() + uniform(rng, 0.1, 5.0));
  return b;
}

/// Samples inside [breaks.front(), breaks.back()], some exactly on breaks.
inline std::vector<double> random_samples(Rng& rng, std::span<const double> breaks,
                                          std::size_t max_n = 200) {
  std::size_t n = uniform_index(rng, 0, max_n);
  std::vector<double> s(n);
  for (auto& x : s) {
    if (uniform(rng, 0.0, 1.0) < 0.1) {
      x = breaks[uniform_index(rng, 0, breaks.size() - 1)];
    } else {
      x = uniform(rng, breaks.front(), breaks.back());
    }
  }
  return s;
}

inline Histogram random_histogram(Rng& rng, int moment_order = -1) {
  auto breaks = random_breaks(rng);
  auto samples = random_samples(rng, breaks);
  int order = moment_order >= 0 ? moment_order : static_cast<int>(uniform_index(rng, 0, 3));
  auto h = build_histogram(samples, breaks, order);
  if (uniform(rng, 0.0, 1.0) < 0.5) h = h.with_name("metric" + std::to_string(uniform_index(rng, 0, 9)));
  return h;
}

/// Smallest x with F(x) >= q for the piecewise-linear CDF through
/// (breaks[i], cum[i] / total), found by bisection.
inline double quantile_by_bisection(const Histogram& h, double q) {
  const auto& b = h.breaks();
  std::vector<double> cdf{0.0};
  std::uint64_t run = 0, total = 0;
  for (auto c : h.counts()) total += c;
  for (auto c : h.counts()) cdf.push_back(static_cast<double>(run += c) / static_cast<double>(total));
  auto F = [&](double x) {
    if (x <= b.front()) return 0.0;
    if (x >= b.back()) return 1.0;
    std::size_t j = 1;
    while (b[j] < x) ++j;
    return cdf[j - 1] + (x - b[j - 1]) / (b[j] - b[j - 1]) * (cdf[j] - cdf[j - 1]);
  };
  double lo = b.front(), hi = b.back();
  if (F(lo) >= q) return lo;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) >= q) hi = mid;
    else lo = mid;
  }
  return hi;
}

/// Adaptive Simpson with explicit split points.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 0) {
  double c = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fc = f(c);
  double whole = (b - a) / 6.0 * (fa + 4 * fc + fb);
  double d = 0.5 * (a + c), e = 0.5 * (c + b);
  double fd = f(d), fe = f(e);
  double left = (c - a) / 6.0 * (fa + 4 * fd + fc);
  double right = (b - c) / 6.0 * (fc + 4 * fe + fb);
  if (depth > 30 || std::abs(left + right - whole) <= 15 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, c, tol / 2, depth + 1) + simpson(f, c, b, tol / 2, depth + 1);
}

inline double simpson_split(const std::function<double(double)>& f, std::vector<double> cuts,
                            double tol) {
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += simpson(f, cuts[i], cuts[i + 1], tol);
  }
  return total;
}

/**
 * Linear program over distributions on fixed atoms, solved exactly by
 * enumerating basic feasible solutions.
 *
 * Constraints are sum(w) = 1 plus E[g_k(X)] = target_k.  Every vertex of the
 * feasible polytope has at most (1 + constraints) nonzero weights, so the
 * optimum of a linear objective is attained at one of the enumerated
 * supports.
 */
struct MomentLp {
  std::vector<double> atoms;
  double m1;
  std::optional<double> m2;  // second raw moment; absent = mean only

  // Returns {min, max} of sum(w_j * objective(atom_j)).
  std::pair<double, double> solve(const std::function<double(double)>& objective) const {
    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -std::numeric_limits<double>::infinity();
    const std::size_t n = atoms.size();
    auto consider = [&](std::span<const std::size_t> idx, std::span<const double> w) {
      for (double wi : w) {
        if (wi < -1e-12) return;
      }
      double obj = 0.0;
      for (std::size_t k = 0; k < idx.size(); ++k) obj += w[k] * objective(atoms[idx[k]]);
      best_min = std::min(best_min, obj);
      best_max = std::max(best_max, obj);
    };
    if (!m2) {
      for (std::size_t i = 0; i < n; ++i) {
        if (atoms[i] == m1) {
          std::size_t idx[1] = {i};
          double w[1] = {1.0};
          consider(idx, w);
        }
        for (std::size_t j = i + 1; j < n; ++j) {
          double a = atoms[i], b = atoms[j];
          double wa = (m1 - b) / (a - b);
          std::size_t idx[2] = {i, j};
          double w[2] = {wa, 1.0 - wa};
          consider(idx, w);
        }
      }
    } else {
      // Lagrange weights for the 3x3 Vandermonde system.
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          for (std::size_t k = j + 1; k < n; ++k) {
            double a = atoms[i], b = atoms[j], c = atoms[k];
            double wa = (*m2 - (b + c) * m1 + b * c) / ((a - b) * (a - c));
            double wb = (*m2 - (a + c) * m1 + a * c) / ((b - a) * (b - c));
            double wc = (*m2 - (a + b) * m1 + a * b) / ((c - a) * (c - b));
            std::size_t idx[3] = {i, j, k};
            double w[3] = {wa, wb, wc};
            consider(idx, w);
          }
        }
      }
    }
    return {best_min, best_max};
  }
};

/// 49 evenly spaced atoms on [0, 1] plus x itself: 50 atoms.
inline std::vector<double> lp_atoms_with(double x) {
  std::vector<double> atoms;
  for (int i = 0; i < 49; ++i) atoms.push_back(i / 48.0);
  if (std::find(atoms.begin(), atoms.end(), x) == atoms.end()) atoms.push_back(x);
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

}  // namespace histtools::testing
