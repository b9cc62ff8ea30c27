#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "histtools/histogram.hpp"

namespace histtools {

/// Which extremal construction produced the envelope at a given point.
enum class Regime {
  none,      // no moment known: the bin is a black box
  F1,        // mean only, x <= mean: mass at x and 1
  F2,        // mean only, x > mean: mass at 0 and x
  F3,        // mean + variance, small-variance side: mass at x and one atom
  F4,        // mean + variance, large-variance side: mass at 0, x and 1
  p_moment,  // single p-th moment, p >= 2
};

const char* to_string(Regime r) noexcept;

/**
 * Tightest pointwise CDF envelope for a distribution on the unit interval
 * subject to one moment constraint.
 *
 * lower(t) and upper(t) bound F(t) = P(X <= t) for every distribution that
 * satisfies the constraint.  Inside the support the lower curve is the
 * infimum, which is approached but not attained; at t >= 1 both are 1.
 */
class BinEnvelope {
 public:
  static BinEnvelope no_moment();
  static BinEnvelope mean(double m1);
  static BinEnvelope mean_var(double m1, double v);
  static BinEnvelope pth_moment(double mu_p, int p);

  double lower(double t) const { return evaluate(t).lower; }
  double upper(double t) const { return evaluate(t).upper; }
  double gap(double t) const {
    auto e = evaluate(t);
    return e.upper - e.lower;
  }
  Regime regime(double t) const { return evaluate(t).regime; }

  /// Points in (0, 1) where the envelope changes formula.
  std::vector<double> breakpoints() const;

  struct Point {
    double lower;
    double upper;
    Regime regime;
  };
  Point evaluate(double t) const;

 private:
  enum class Kind { none, mean, mean_var, pth };

  Kind kind_ = Kind::none;
  double m1_ = 0.0;   // mean, or mu_p for Kind::pth
  double v_ = 0.0;    // variance
  double d_ = 0.0;    // m1(1 - m1) - v, the slack to the maximum variance
  double c1_ = 0.0;
  double c2_ = 0.0;
  double mp_ = 0.0;   // mu_p^p
  int p_ = 1;
};

/// A contiguous run of bins [a, b] with cumulative mass `base` to the left.
struct BoundsSegment {
  double a;
  double b;
  double base;
  double mass;
  BinEnvelope envelope;
};

/**
 * Lower/upper CDF envelope over a single normalized bin or a whole histogram.
 * Left of the support both curves are `base` of the first segment (0 for a
 * full histogram); right of it both are the cumulative mass at the end.
 */
class CdfBounds {
 public:
  explicit CdfBounds(BinEnvelope unit);
  explicit CdfBounds(std::vector<BoundsSegment> segments);

  double lower(double x) const;
  double upper(double x) const;
  double gap(double x) const { return upper(x) - lower(x); }
  Regime regime(double x) const;

  std::pair<double, double> support() const {
    return {segments_.front().a, segments_.back().b};
  }
  const std::vector<BoundsSegment>& segments() const noexcept { return segments_; }

  /// Segment edges plus every envelope breakpoint, sorted, in x units.
  std::vector<double> breakpoints() const;

  /// Integral of upper - lower over the support by adaptive quadrature.
  double gap_integral() const;

 private:
  const BoundsSegment* find(double x) const;

  std::vector<BoundsSegment> segments_;
};

CdfBounds bounds_no_moment();
CdfBounds bounds_mean(double m1);
CdfBounds bounds_mean_var(double m1, double v);
CdfBounds bounds_pth_moment(double mu_p, int p);

/// Envelope over the whole histogram, each bin using its best annotation.
CdfBounds histogram_bounds(const Histogram& h);

/// Binary entropy in nats; 0 log 0 taken as 0.
double emdcc_mean_closed(double m1);

/// Gap integral of bounds_mean_var from the antiderivatives of p3 and p4.
double emdcc_mean_var_closed(double m1, double v);

/// Normalized per-bin loss when the bin mean sits at fraction alpha.
double lambda(double alpha);

enum class EmdccMethod { closed_form, quadrature };

struct BinContribution {
  std::size_t bin;
  double weight;       // mass * width / r
  double normalized;   // gap integral over the unit bin
  double contribution; // weight * normalized
  Regime constraint;   // none / F1 (mean) / F4 (mean + var) / p_moment
};

struct EmdccReport {
  double total;
  double range;
  std::vector<BinContribution> per_bin;
  EmdccMethod method;
};

const char* to_string(EmdccMethod m) noexcept;

/**
 * Whole-histogram EMDCC: (1/r) * sum(mass_b * width_b * g_b).
 *
 * r defaults to the span of the non-empty bins.  `force` selects the
 * quadrature route for every bin; otherwise closed forms are used wherever
 * one exists and quadrature only for orders >= 3.
 */
EmdccReport emdcc_histogram(const Histogram& h,
                            std::optional<std::pair<double, double>> range = std::nullopt,
                            std::optional<EmdccMethod> force = std::nullopt);

/// 1 / (2 K X) over the trimmed histogram; +inf when X == 0.
double information_gain(const Histogram& h_annotated);

/// Normalized (unit-bin) moments of one bin, derived from its power sums.
struct NormalizedMoments {
  double m1;
  std::optional<double> variance;
  std::optional<double> mu_p;  // p-th root of E[((x - a) / w)^p]
  int p = 0;
};
std::optional<NormalizedMoments> normalized_moments(const Histogram& h, std::size_t bin);

}  // namespace histtools
