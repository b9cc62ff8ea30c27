#include "histtools/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "histtools/error.hpp"
#include "power.hpp"

namespace histtools {

const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::out_of_range: return "out-of-range";
    case errc::invalid_breaks: return "invalid-breaks";
    case errc::incompatible_breaks: return "incompatible-breaks";
    case errc::incompatible_annotation: return "incompatible-annotation";
    case errc::empty_histogram: return "empty-histogram";
    case errc::domain: return "domain";
    case errc::shape: return "shape";
    case errc::infeasible_moments: return "infeasible-moments";
    case errc::unsupported_layout: return "unsupported-layout";
    case errc::unsupported_combination: return "unsupported-combination";
    case errc::format: return "format";
    case errc::corruption: return "corruption";
    case errc::invalid_content: return "invalid-content";
    case errc::truncation: return "truncation";
    case errc::parse: return "parse";
    case errc::io: return "io";
  }
  return "unknown";
}

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Range of x^k over [a, b].
std::pair<double, double> power_range(double a, double b, int k) {
  double pa = detail::ipow(a, k);
  double pb = detail::ipow(b, k);
  double lo = std::min(pa, pb);
  double hi = std::max(pa, pb);
  if (k % 2 == 0 && a < 0.0 && b > 0.0) lo = 0.0;
  return {lo, hi};
}

void check_moments(const std::vector<double>& breaks,
                   const std::vector<std::uint64_t>& counts,
                   const BinMoments& m) {
  if (m.order() < 1) {
    throw histogram_error(errc::shape, "moment order must be >= 1");
  }
  if (m.bins() != counts.size()) {
    throw histogram_error(errc::shape, "moment bins (" + std::to_string(m.bins()) +
                                           ") != histogram bins (" +
                                           std::to_string(counts.size()) + ")");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    auto n = static_cast<double>(counts[i]);
    for (int k = 1; k <= m.order(); ++k) {
      double s = m.sum(k, i);
      if (!std::isfinite(s)) {
        throw histogram_error(errc::invalid_content,
                              "non-finite power sum S_" + std::to_string(k) +
                                  " in bin " + std::to_string(i));
      }
      if (counts[i] == 0) {
        if (s != 0.0) {
          throw histogram_error(errc::invalid_content,
                                "empty bin " + std::to_string(i) +
                                    " has nonzero power sum S_" + std::to_string(k));
        }
        continue;
      }
      auto [lo, hi] = power_range(breaks[i], breaks[i + 1], k);
      double scale = n * std::max({std::abs(lo), std::abs(hi), 1e-300});
      double tol = 1e-9 * scale;
      if (s < n * lo - tol || s > n * hi + tol) {
        throw histogram_error(errc::invalid_content,
                              "power sum S_" + std::to_string(k) + " = " + fmt_double(s) +
                                  " in bin " + std::to_string(i) +
                                  " is inconsistent with the bin support");
      }
    }
  }
}

}  // namespace

BinMoments::BinMoments(int order, std::size_t bins)
    : order_(order), bins_(bins),
      sums_(static_cast<std::size_t>(std::max(order, 0)) * bins, 0.0) {
  if (order < 1) throw histogram_error(errc::shape, "moment order must be >= 1");
}

BinMoments::BinMoments(int order, std::size_t bins, std::vector<double> sums)
    : order_(order), bins_(bins), sums_(std::move(sums)) {
  if (order < 1) throw histogram_error(errc::shape, "moment order must be >= 1");
  if (sums_.size() != static_cast<std::size_t>(order) * bins) {
    throw histogram_error(errc::shape, "expected " +
                                           std::to_string(static_cast<std::size_t>(order) * bins) +
                                           " power sums, got " + std::to_string(sums_.size()));
  }
}

void validate_breaks(std::span<const double> breaks) {
  if (breaks.size() < 2) {
    throw histogram_error(errc::invalid_breaks, "need at least two breaks");
  }
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!std::isfinite(breaks[i])) {
      throw histogram_error(errc::invalid_breaks,
                            "break " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(breaks[i] > breaks[i - 1])) {
      throw histogram_error(errc::invalid_breaks,
                            "breaks not strictly increasing at position " + std::to_string(i) +
                                " (" + fmt_double(breaks[i - 1]) + " >= " +
                                fmt_double(breaks[i]) + ")");
    }
  }
}

Histogram::Histogram(std::vector<double> breaks, std::vector<std::uint64_t> counts,
                     std::optional<BinMoments> moments, std::optional<std::string> metric_name)
    : breaks_(std::move(breaks)), counts_(std::move(counts)),
      moments_(std::move(moments)), name_(std::move(metric_name)) {
  validate_breaks(breaks_);
  if (counts_.size() + 1 != breaks_.size()) {
    throw histogram_error(errc::shape, std::to_string(breaks_.size()) + " breaks need " +
                                           std::to_string(breaks_.size() - 1) +
                                           " counts, got " + std::to_string(counts_.size()));
  }
  std::uint64_t total = 0;
  for (auto c : counts_) {
    if (c > std::numeric_limits<std::uint64_t>::max() - total) {
      throw histogram_error(errc::invalid_content, "total count overflows 64 bits");
    }
    total += c;
  }
  if (moments_) check_moments(breaks_, counts_, *moments_);
}

Histogram Histogram::empty(std::vector<double> breaks, int moment_order) {
  std::size_t bins = breaks.size() > 0 ? breaks.size() - 1 : 0;
  std::optional<BinMoments> m;
  if (moment_order > 0) m.emplace(moment_order, bins);
  return Histogram(std::move(breaks), std::vector<std::uint64_t>(bins, 0), std::move(m));
}

Histogram Histogram::with_name(std::optional<std::string> name) const {
  Histogram copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

double Ecdf::step(double x) const {
  if (knots.empty() || x < knots.front()) return 0.0;
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  return probs[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double Ecdf::interpolate(double x) const {
  if (knots.empty() || x <= knots.front()) return 0.0;
  if (x >= knots.back()) return probs.back();
  auto j = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), x) -
                                    knots.begin());
  double t = (x - knots[j - 1]) / (knots[j] - knots[j - 1]);
  return probs[j - 1] + t * (probs[j] - probs[j - 1]);
}

std::optional<std::size_t> locate_bin(std::span<const double> breaks, double x) {
  if (!(x >= breaks.front() && x <= breaks.back())) return std::nullopt;
  // First break >= x closes the bin (a, b].
  auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
  auto j = static_cast<std::size_t>(it - breaks.begin());
  return j == 0 ? 0 : j - 1;
}

Histogram build_histogram(std::span<const double> samples, std::vector<double> breaks,
                          int moment_order) {
  validate_breaks(breaks);
  if (moment_order < 0) throw histogram_error(errc::domain, "moment order must be >= 0");
  const std::size_t bins = breaks.size() - 1;
  std::vector<std::uint64_t> counts(bins, 0);
  std::optional<BinMoments> moments;
  if (moment_order > 0) moments.emplace(moment_order, bins);

  for (double x : samples) {
    auto bin = locate_bin(breaks, x);
    if (!bin) {
      throw histogram_error(errc::out_of_range,
                            "sample " + fmt_double(x) + " outside [" + fmt_double(breaks.front()) +
                                ", " + fmt_double(breaks.back()) + "]");
    }
    ++counts[*bin];
    if (moments) {
      double p = 1.0;
      for (int k = 1; k <= moment_order; ++k) {
        p *= x;
        moments->sum(k, *bin) += p;
      }
    }
  }
  return Histogram(std::move(breaks), std::move(counts), std::move(moments));
}

Histogram merge(const Histogram& a, const Histogram& b) {
  if (a.breaks() != b.breaks()) {
    const auto& ba = a.breaks();
    const auto& bb = b.breaks();
    std::size_t pos = 0;
    while (pos < ba.size() && pos < bb.size() && ba[pos] == bb[pos]) ++pos;
    throw histogram_error(errc::incompatible_breaks,
                          "breaks differ at position " + std::to_string(pos));
  }
  if (a.moment_order() != b.moment_order()) {
    throw histogram_error(errc::incompatible_annotation,
                          "moment orders differ (" + std::to_string(a.moment_order()) + " vs " +
                              std::to_string(b.moment_order()) + ")");
  }
  std::vector<std::uint64_t> counts(a.counts());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (b.counts()[i] > std::numeric_limits<std::uint64_t>::max() - counts[i]) {
      throw histogram_error(errc::invalid_content, "merged count overflows 64 bits");
    }
    counts[i] += b.counts()[i];
  }
  std::optional<BinMoments> moments;
  if (a.moments()) {
    const auto& ma = *a.moments();
    const auto& mb = *b.moments();
    std::vector<double> sums(ma.raw().begin(), ma.raw().end());
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] = sums[i] + mb.raw()[i];
    moments.emplace(ma.order(), ma.bins(), std::move(sums));
  }
  std::optional<std::string> name;
  if (a.metric_name() == b.metric_name()) name = a.metric_name();
  return Histogram(a.breaks(), std::move(counts), std::move(moments), std::move(name));
}

Histogram trim(const Histogram& h) {
  const auto& c = h.counts();
  std::size_t first = 0;
  while (first < c.size() && c[first] == 0) ++first;
  if (first == c.size()) {
    std::vector<double> breaks{h.breaks().front(), h.breaks().back()};
    std::optional<BinMoments> m;
    if (h.moments()) m.emplace(h.moment_order(), 1);
    return Histogram(std::move(breaks), {0}, std::move(m), h.metric_name());
  }
  std::size_t last = c.size();
  while (c[last - 1] == 0) --last;

  std::vector<double> breaks(h.breaks().begin() + static_cast<std::ptrdiff_t>(first),
                             h.breaks().begin() + static_cast<std::ptrdiff_t>(last + 1));
  std::vector<std::uint64_t> counts(c.begin() + static_cast<std::ptrdiff_t>(first),
                                    c.begin() + static_cast<std::ptrdiff_t>(last));
  std::optional<BinMoments> moments;
  if (h.moments()) {
    const auto& src = *h.moments();
    BinMoments m(src.order(), last - first);
    for (int k = 1; k <= src.order(); ++k) {
      for (std::size_t i = first; i < last; ++i) m.sum(k, i - first) = src.sum(k, i);
    }
    moments = std::move(m);
  }
  return Histogram(std::move(breaks), std::move(counts), std::move(moments), h.metric_name());
}

std::uint64_t count(const Histogram& h) {
  std::uint64_t total = 0;
  for (auto c : h.counts()) total += c;
  return total;
}

namespace {

std::uint64_t require_nonempty(const Histogram& h, const char* what) {
  std::uint64_t total = count(h);
  if (total == 0) {
    throw histogram_error(errc::empty_histogram, std::string(what) + " of an empty histogram");
  }
  return total;
}

}  // namespace

double approx_mean(const Histogram& h) {
  auto total = static_cast<double>(require_nonempty(h, "mean"));
  double acc = 0.0;
  if (h.moments()) {
    for (std::size_t i = 0; i < h.bin_count(); ++i) acc += h.moments()->sum(1, i);
  } else {
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
      acc += 0.5 * (h.left(i) + h.right(i)) * static_cast<double>(h.counts()[i]);
    }
  }
  return acc / total;
}

namespace {

double quantile_one(const Histogram& h, const std::vector<std::uint64_t>& cum,
                    double total, double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw histogram_error(errc::domain, "quantile " + fmt_double(q) + " outside [0, 1]");
  }
  if (q == 0.0) return h.breaks().front();
  for (std::size_t i = 0; i < cum.size(); ++i) {
    double hi = static_cast<double>(cum[i]) / total;
    if (hi >= q) {
      double lo = i == 0 ? 0.0 : static_cast<double>(cum[i - 1]) / total;
      if (hi == q) return h.right(i);
      return h.left(i) + (q - lo) / (hi - lo) * h.width(i);
    }
  }
  return h.breaks().back();  // unreachable: cum.back() / total == 1
}

}  // namespace

std::vector<double> approx_quantile(const Histogram& h, std::span<const double> q) {
  auto total = static_cast<double>(require_nonempty(h, "quantile"));
  std::vector<std::uint64_t> cum(h.bin_count());
  std::uint64_t run = 0;
  for (std::size_t i = 0; i < cum.size(); ++i) cum[i] = run += h.counts()[i];

  std::vector<double> out;
  out.reserve(q.size());
  for (double p : q) out.push_back(quantile_one(h, cum, total, p));
  return out;
}

double approx_quantile(const Histogram& h, double q) {
  return approx_quantile(h, std::span<const double>(&q, 1)).front();
}

Ecdf hist_to_ecdf(const Histogram& h) {
  auto total = require_nonempty(h, "ECDF");
  Ecdf e;
  e.knots = h.breaks();
  e.probs.reserve(e.knots.size());
  e.probs.push_back(0.0);
  std::uint64_t run = 0;
  for (auto c : h.counts()) {
    run += c;
    e.probs.push_back(static_cast<double>(run) / static_cast<double>(total));
  }
  return e;
}

Histogram coalesce_bins(const Histogram& h, std::size_t factor) {
  if (factor < 2) throw histogram_error(errc::domain, "coalesce factor must be >= 2");
  if (h.bin_count() % factor != 0) {
    throw histogram_error(errc::shape, std::to_string(h.bin_count()) +
                                           " bins are not divisible by " + std::to_string(factor));
  }
  const std::size_t out_bins = h.bin_count() / factor;
  std::vector<double> breaks;
  breaks.reserve(out_bins + 1);
  for (std::size_t j = 0; j <= out_bins; ++j) breaks.push_back(h.breaks()[j * factor]);

  std::vector<std::uint64_t> counts(out_bins, 0);
  for (std::size_t i = 0; i < h.bin_count(); ++i) counts[i / factor] += h.counts()[i];

  std::optional<BinMoments> moments;
  if (h.moments()) {
    const auto& src = *h.moments();
    BinMoments m(src.order(), out_bins);
    for (int k = 1; k <= src.order(); ++k) {
      for (std::size_t i = 0; i < h.bin_count(); ++i) m.sum(k, i / factor) += src.sum(k, i);
    }
    moments = std::move(m);
  }
  return Histogram(std::move(breaks), std::move(counts), std::move(moments), h.metric_name());
}

}  // namespace histtools
