#include "histtools/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "histtools/error.hpp"
#include "histtools/quadrature.hpp"
#include "power.hpp"

namespace histtools {

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::none: return "none";
    case Regime::F1: return "F1";
    case Regime::F2: return "F2";
    case Regime::F3: return "F3";
    case Regime::F4: return "F4";
    case Regime::p_moment: return "p-moment";
  }
  return "unknown";
}

const char* to_string(EmdccMethod m) noexcept {
  return m == EmdccMethod::closed_form ? "closed_form" : "quadrature";
}

namespace {

// Slack allowed when checking moments computed in floating point.
constexpr double kFeasibilityTol = 1e-12;

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw histogram_error(errc::domain, std::string(what) + " = " + num(x) + " outside [0, 1]");
  }
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Validates (m1, v) against the attainable box on [0, 1] and snaps values
// within kFeasibilityTol onto it.
double feasible_variance(double m1, double v) {
  check_unit(m1, "normalized mean");
  double vmax = m1 * (1.0 - m1);
  if (!(v >= -kFeasibilityTol && v <= vmax + kFeasibilityTol)) {
    throw histogram_error(errc::infeasible_moments,
                          "variance " + num(v) + " outside attainable box [0, " + num(vmax) +
                              "] for normalized mean " + num(m1));
  }
  return std::clamp(v, 0.0, vmax);
}

}  // namespace

BinEnvelope BinEnvelope::no_moment() { return BinEnvelope{}; }

BinEnvelope BinEnvelope::mean(double m1) {
  check_unit(m1, "normalized mean");
  BinEnvelope e;
  e.kind_ = Kind::mean;
  e.m1_ = m1;
  return e;
}

BinEnvelope BinEnvelope::mean_var(double m1, double v) {
  v = feasible_variance(m1, v);
  BinEnvelope e;
  e.kind_ = Kind::mean_var;
  e.m1_ = m1;
  e.v_ = v;
  e.d_ = std::max(m1 * (1.0 - m1) - v, 0.0);
  // c1 = m1 - v/(1-m1) and c2 = m1 + v/m1, written through the slack d so
  // they stay accurate next to the maximum variance.
  e.c1_ = m1 < 1.0 ? e.d_ / (1.0 - m1) : 1.0;
  e.c2_ = m1 > 0.0 ? 1.0 - e.d_ / m1 : 0.0;
  if (v == 0.0) e.c1_ = e.c2_ = m1;
  return e;
}

BinEnvelope BinEnvelope::pth_moment(double mu_p, int p) {
  check_unit(mu_p, "normalized p-th moment root");
  if (p < 1) throw histogram_error(errc::domain, "moment order p must be >= 1");
  BinEnvelope e;
  e.kind_ = Kind::pth;
  e.m1_ = mu_p;
  e.p_ = p;
  e.mp_ = detail::ipow(mu_p, p);
  return e;
}

std::vector<double> BinEnvelope::breakpoints() const {
  std::vector<double> out;
  switch (kind_) {
    case Kind::none: break;
    case Kind::mean:
    case Kind::pth: out = {m1_}; break;
    case Kind::mean_var: out = {c1_, m1_, c2_}; break;
  }
  return out;
}

BinEnvelope::Point BinEnvelope::evaluate(double t) const {
  if (t < 0.0) return {0.0, 0.0, Regime::none};
  if (t >= 1.0) return {1.0, 1.0, Regime::none};
  switch (kind_) {
    case Kind::none:
      return {0.0, 1.0, Regime::none};

    case Kind::mean:
      if (t <= m1_) return {0.0, std::min((1.0 - m1_) / (1.0 - t), 1.0), Regime::F1};
      return {std::max(1.0 - m1_ / t, 0.0), 1.0, Regime::F2};

    case Kind::pth: {
      Regime tag = p_ == 1 ? (t <= m1_ ? Regime::F1 : Regime::F2) : Regime::p_moment;
      if (t <= m1_) {
        double tp = detail::ipow(t, p_);
        return {0.0, std::min((1.0 - mp_) / (1.0 - tp), 1.0), tag};
      }
      double tp = detail::ipow(t, p_);
      return {std::max(1.0 - mp_ / tp, 0.0), 1.0, tag};
    }

    case Kind::mean_var: {
      if (v_ == 0.0) {
        // Point mass at m1.
        if (t < m1_) return {0.0, 0.0, Regime::F3};
        if (t > m1_) return {1.0, 1.0, Regime::F3};
        return {0.0, 1.0, Regime::F4};
      }
      if (t < c1_) {
        double dx = t - m1_;
        return {0.0, v_ / (v_ + dx * dx), Regime::F3};
      }
      if (t > c2_) {
        double dx = t - m1_;
        return {1.0 - v_ / (v_ + dx * dx), 1.0, Regime::F3};
      }
      // Three-point construction on {0, t, 1}: f(1) = m1 - t p4 and
      // f(0) = 1 - p4 - f(1) with p4 = d / (t - t^2), simplified.
      double upper = 1.0 - m1_ + d_ / (1.0 - t);
      double lower = t > 0.0 ? 1.0 - m1_ - d_ / t : 0.0;
      upper = std::clamp(upper, 0.0, 1.0);
      lower = std::clamp(lower, 0.0, upper);
      return {lower, upper, Regime::F4};
    }
  }
  return {0.0, 1.0, Regime::none};
}

CdfBounds::CdfBounds(BinEnvelope unit)
    : segments_{BoundsSegment{0.0, 1.0, 0.0, 1.0, unit}} {}

CdfBounds::CdfBounds(std::vector<BoundsSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw histogram_error(errc::shape, "bounds need at least one segment");
}

const BoundsSegment* CdfBounds::find(double x) const {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                             [](const BoundsSegment& s, double v) { return s.b < v; });
  return it == segments_.end() ? nullptr : &*it;
}

double CdfBounds::lower(double x) const {
  if (x < segments_.front().a) return segments_.front().base;
  const auto* s = find(x);
  if (!s) return segments_.back().base + segments_.back().mass;
  return s->base + s->mass * s->envelope.lower((x - s->a) / (s->b - s->a));
}

double CdfBounds::upper(double x) const {
  if (x < segments_.front().a) return segments_.front().base;
  const auto* s = find(x);
  if (!s) return segments_.back().base + segments_.back().mass;
  return s->base + s->mass * s->envelope.upper((x - s->a) / (s->b - s->a));
}

Regime CdfBounds::regime(double x) const {
  const auto* s = find(x);
  if (!s || x < segments_.front().a) return Regime::none;
  return s->envelope.regime((x - s->a) / (s->b - s->a));
}

std::vector<double> CdfBounds::breakpoints() const {
  std::vector<double> out;
  for (const auto& s : segments_) {
    out.push_back(s.a);
    for (double t : s.envelope.breakpoints()) out.push_back(s.a + t * (s.b - s.a));
  }
  out.push_back(segments_.back().b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double CdfBounds::gap_integral() const {
  double total = 0.0;
  for (const auto& s : segments_) {
    if (s.mass == 0.0) continue;
    auto hints = s.envelope.breakpoints();
    double g = integrate([&](double t) { return s.envelope.gap(t); }, 0.0, 1.0, hints);
    total += s.mass * (s.b - s.a) * g;
  }
  return total;
}

CdfBounds bounds_no_moment() { return CdfBounds(BinEnvelope::no_moment()); }
CdfBounds bounds_mean(double m1) { return CdfBounds(BinEnvelope::mean(m1)); }
CdfBounds bounds_mean_var(double m1, double v) {
  return CdfBounds(BinEnvelope::mean_var(m1, v));
}
CdfBounds bounds_pth_moment(double mu_p, int p) {
  return CdfBounds(BinEnvelope::pth_moment(mu_p, p));
}

double emdcc_mean_closed(double m1) {
  check_unit(m1, "normalized mean");
  return 0.0 - xlogx(1.0 - m1) - xlogx(m1);  // 0.0 keeps the edges at +0
}

double lambda(double alpha) { return emdcc_mean_closed(alpha); }

double emdcc_mean_var_closed(double m1, double v) {
  v = feasible_variance(m1, v);
  const double d = m1 * (1.0 - m1) - v;
  if (v <= 0.0 || d <= 0.0) return 0.0;  // point mass, or two atoms at 0 and 1

  const double s = std::sqrt(v);
  const double c1 = d / (1.0 - m1);
  const double c2 = 1.0 - d / m1;

  // P3 = s atan((x - m1) / s) over [0, c1] and [c2, 1].
  // (c1 - m1) / s = -s / (1 - m1) and (c2 - m1) / s = s / m1.
  double left = s * (std::atan(-s / (1.0 - m1)) - std::atan(-m1 / s));
  double right = s * (std::atan((1.0 - m1) / s) - std::atan(s / m1));
  // P4 = d log(x / (1 - x)) over [c1, c2], using 1 - c2 = d / m1.
  double middle = d * (std::log(c2) - std::log(d / m1) - std::log(c1) + std::log1p(-c1));
  return left + middle + right;
}

std::optional<NormalizedMoments> normalized_moments(const Histogram& h, std::size_t bin) {
  const auto& m = h.moments();
  std::uint64_t n_int = h.counts()[bin];
  if (!m || n_int == 0) return std::nullopt;
  const auto n = static_cast<double>(n_int);
  const double a = h.left(bin);
  const double w = h.width(bin);

  NormalizedMoments out{};
  const double mean = m->sum(1, bin) / n;
  out.m1 = std::clamp((mean - a) / w, 0.0, 1.0);
  if (m->order() >= 2) {
    double var = (m->sum(2, bin) / n - mean * mean) / (w * w);
    out.variance = std::clamp(var, 0.0, out.m1 * (1.0 - out.m1));
  }
  if (m->order() >= 3) {
    // E[((x - a) / w)^p] by binomial expansion of the raw power sums.
    const int p = m->order();
    double acc = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= p; ++k) {
      double ek = k == 0 ? 1.0 : m->sum(k, bin) / n;
      acc += binom * detail::ipow(-a, p - k) * ek;
      binom = binom * (p - k) / (k + 1);
    }
    double mp = std::clamp(acc / detail::ipow(w, p), 0.0, 1.0);
    out.mu_p = std::pow(mp, 1.0 / p);
    out.p = p;
  }
  return out;
}

namespace {

struct BinLoss {
  double g;
  Regime constraint;
  bool used_quadrature;
};

double unit_gap_integral(const BinEnvelope& e) {
  auto hints = e.breakpoints();
  return integrate([&](double t) { return e.gap(t); }, 0.0, 1.0, hints);
}

BinLoss bin_loss(const Histogram& h, std::size_t bin, bool quadrature) {
  auto nm = normalized_moments(h, bin);
  if (!nm) {
    if (quadrature) return {unit_gap_integral(BinEnvelope::no_moment()), Regime::none, true};
    return {1.0, Regime::none, false};
  }
  if (!nm->variance) {
    if (quadrature) return {unit_gap_integral(BinEnvelope::mean(nm->m1)), Regime::F1, true};
    return {lambda(nm->m1), Regime::F1, false};
  }
  double g2 = quadrature ? unit_gap_integral(BinEnvelope::mean_var(nm->m1, *nm->variance))
                         : emdcc_mean_var_closed(nm->m1, *nm->variance);
  if (!nm->mu_p) return {g2, Regime::F4, quadrature};
  double gp = unit_gap_integral(BinEnvelope::pth_moment(*nm->mu_p, nm->p));
  if (gp < g2) return {gp, Regime::p_moment, true};
  return {g2, Regime::F4, true};
}

std::pair<double, double> occupied_span(const Histogram& h) {
  std::size_t first = 0;
  while (h.counts()[first] == 0) ++first;
  std::size_t last = h.bin_count();
  while (h.counts()[last - 1] == 0) --last;
  return {h.left(first), h.right(last - 1)};
}

}  // namespace

EmdccReport emdcc_histogram(const Histogram& h, std::optional<std::pair<double, double>> range,
                            std::optional<EmdccMethod> force) {
  const std::uint64_t total_count = count(h);
  if (total_count == 0) {
    throw histogram_error(errc::empty_histogram, "EMDCC of an empty histogram");
  }
  auto [lo, hi] = range ? *range : occupied_span(h);
  const double r = hi - lo;
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw histogram_error(errc::domain, "EMDCC range must have positive finite width");
  }
  const bool quad = force == EmdccMethod::quadrature;
  const double denom = static_cast<double>(total_count) * r;

  EmdccReport report{0.0, r, {}, quad ? EmdccMethod::quadrature : EmdccMethod::closed_form};
  double numerator = 0.0;
  for (std::size_t i = 0; i < h.bin_count(); ++i) {
    if (h.counts()[i] == 0) continue;
    auto loss = bin_loss(h, i, quad);
    if (loss.used_quadrature) report.method = EmdccMethod::quadrature;
    const double cw = static_cast<double>(h.counts()[i]) * h.width(i);
    numerator += cw * loss.g;
    report.per_bin.push_back({i, cw / denom, loss.g, cw * loss.g / denom, loss.constraint});
  }
  report.total = numerator / denom;
  return report;
}

double information_gain(const Histogram& h_annotated) {
  if (h_annotated.moment_order() < 1) {
    throw histogram_error(errc::unsupported_layout,
                          "information gain needs a histogram annotated with bin means");
  }
  if (count(h_annotated) == 0) {
    throw histogram_error(errc::empty_histogram, "information gain of an empty histogram");
  }
  const double w0 = h_annotated.width(0);
  for (std::size_t i = 1; i < h_annotated.bin_count(); ++i) {
    if (std::abs(h_annotated.width(i) - w0) > 1e-9 * std::abs(w0)) {
      throw histogram_error(errc::unsupported_layout,
                            "information gain needs equal-width bins (bin " + std::to_string(i) +
                                " differs)");
    }
  }
  Histogram t = trim(h_annotated);
  const double x = emdcc_histogram(t).total;
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * static_cast<double>(t.bin_count()) * x);
}

CdfBounds histogram_bounds(const Histogram& h) {
  const std::uint64_t total_count = count(h);
  if (total_count == 0) {
    throw histogram_error(errc::empty_histogram, "bounds of an empty histogram");
  }
  const auto total = static_cast<double>(total_count);
  std::vector<BoundsSegment> segs;
  segs.reserve(h.bin_count());
  std::uint64_t run = 0;
  for (std::size_t i = 0; i < h.bin_count(); ++i) {
    auto nm = normalized_moments(h, i);
    BinEnvelope env = BinEnvelope::no_moment();
    if (nm) {
      if (nm->variance) env = BinEnvelope::mean_var(nm->m1, *nm->variance);
      else env = BinEnvelope::mean(nm->m1);
    }
    segs.push_back({h.left(i), h.right(i), static_cast<double>(run) / total,
                    static_cast<double>(h.counts()[i]) / total, env});
    run += h.counts()[i];
  }
  return CdfBounds(std::move(segs));
}

}  // namespace histtools
