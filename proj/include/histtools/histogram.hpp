#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace histtools {

/**
 * Per-bin raw power sums S_k = sum(x_i^k), k = 1..order.
 *
 * Sums are stored order-major: all S_1 values for every bin, then all S_2
 * values, and so on.  Keeping raw sums rather than means makes merging two
 * annotated histograms a plain element-wise addition.
 */
class BinMoments {
 public:
  BinMoments() = default;

  /// Zero-initialized sums for `bins` bins.
  BinMoments(int order, std::size_t bins);

  /// Takes ownership of order-major sums; throws errc::shape on bad length.
  BinMoments(int order, std::size_t bins, std::vector<double> sums);

  int order() const noexcept { return order_; }
  std::size_t bins() const noexcept { return bins_; }

  /// S_k for `bin`, with 1 <= k <= order().
  double sum(int k, std::size_t bin) const { return sums_[index(k, bin)]; }
  double& sum(int k, std::size_t bin) { return sums_[index(k, bin)]; }

  std::span<const double> raw() const noexcept { return sums_; }

  friend bool operator==(const BinMoments&, const BinMoments&) = default;

 private:
  std::size_t index(int k, std::size_t bin) const {
    return static_cast<std::size_t>(k - 1) * bins_ + bin;
  }

  int order_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> sums_;
};

/**
 * A fixed-boundary histogram, optionally annotated with per-bin moments.
 *
 * Bin i covers (breaks[i], breaks[i+1]], except the first bin which is
 * closed on both ends.  Instances are immutable; all operations below return
 * new values.  The constructor enforces every structural invariant so that a
 * Histogram in hand is always valid.
 */
class Histogram {
 public:
  Histogram(std::vector<double> breaks, std::vector<std::uint64_t> counts,
            std::optional<BinMoments> moments = std::nullopt,
            std::optional<std::string> metric_name = std::nullopt);

  /// All-zero histogram over `breaks`, optionally with zeroed moments.
  static Histogram empty(std::vector<double> breaks, int moment_order = 0);

  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const std::optional<BinMoments>& moments() const noexcept { return moments_; }
  const std::optional<std::string>& metric_name() const noexcept { return name_; }

  std::size_t bin_count() const noexcept { return counts_.size(); }
  int moment_order() const noexcept { return moments_ ? moments_->order() : 0; }

  double left(std::size_t bin) const { return breaks_[bin]; }
  double right(std::size_t bin) const { return breaks_[bin + 1]; }
  double width(std::size_t bin) const { return breaks_[bin + 1] - breaks_[bin]; }

  Histogram with_name(std::optional<std::string> name) const;

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::vector<double> breaks_;
  std::vector<std::uint64_t> counts_;
  std::optional<BinMoments> moments_;
  std::optional<std::string> name_;
};

/// Step and piecewise-linear views of the cumulative fractions at each break.
struct Ecdf {
  std::vector<double> knots;
  std::vector<double> probs;

  /// Right-continuous step function: probs at the last knot <= x.
  double step(double x) const;
  /// Linear interpolation between knots, clamped to [0, 1] outside.
  double interpolate(double x) const;
};

/// Throws errc::invalid_breaks unless breaks are finite, >= 2 and increasing.
void validate_breaks(std::span<const double> breaks);

/// Bin index for `x` under the (a, b] convention with a closed first bin, or
/// nullopt when x lies outside [breaks.front(), breaks.back()].
std::optional<std::size_t> locate_bin(std::span<const double> breaks, double x);

Histogram build_histogram(std::span<const double> samples,
                          std::vector<double> breaks, int moment_order = 0);

/// Element-wise sum.  Moment sums are added left operand first.
Histogram merge(const Histogram& a, const Histogram& b);

/// Drops leading and trailing zero-count bins.
Histogram trim(const Histogram& h);

std::uint64_t count(const Histogram& h);

/// Exact sample mean when order >= 1 moments are present, otherwise the
/// count-weighted bin midpoint mean.
double approx_mean(const Histogram& h);

/**
 * Quantiles by linear interpolation inside the bin where the cumulative
 * fraction first reaches q.
 *
 * q = 0 gives the first break and q = 1 gives the right edge of the last
 * non-empty bin (not the last break).  A q that lands exactly on a cumulative
 * knot resolves to the right edge of the bin on its left.
 */
std::vector<double> approx_quantile(const Histogram& h, std::span<const double> q);
double approx_quantile(const Histogram& h, double q);

Ecdf hist_to_ecdf(const Histogram& h);

/// Merges every run of `factor` adjacent bins; bin count must divide evenly.
Histogram coalesce_bins(const Histogram& h, std::size_t factor);

}  // namespace histtools
