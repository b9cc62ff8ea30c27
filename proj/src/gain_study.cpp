#include "histtools/gain_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "histtools/bounds.hpp"
#include "histtools/histogram.hpp"

namespace histtools::study {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> unit_breaks(std::size_t bins, double width) {
  std::vector<double> b(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) b[i] = static_cast<double>(i) * width;
  return b;
}

}  // namespace

std::vector<double> synthetic_user_samples(std::uint64_t seed, std::size_t user) {
  boost::random::mt19937_64 rng(splitmix64(seed ^ splitmix64(user)));
  boost::random::uniform_01<double> unit;
  const double top = static_cast<double>(kLogBins);

  // Sample count is log-uniform over [100, 5000].
  const auto n = static_cast<std::size_t>(std::exp(std::log(100.0) + unit(rng) * std::log(50.0)));
  const int components = boost::random::uniform_int_distribution<int>(1, 4)(rng);

  struct Component {
    int kind;  // 0: power-of-two point mass, 1: arbitrary point mass, 2: beta spread
    double at;
    double lo;
    double span;
    double alpha;
    double beta;
    double weight;
  };
  std::vector<Component> mix;
  double weight_total = 0.0;
  for (int c = 0; c < components; ++c) {
    Component comp{};
    double pick = unit(rng);
    comp.kind = pick < 0.45 ? 0 : pick < 0.65 ? 1 : 2;
    comp.at = comp.kind == 0 ? static_cast<double>(boost::random::uniform_int_distribution<int>(
                                   0, static_cast<int>(kLogBins))(rng))
                             : unit(rng) * top;
    comp.span = 1.0 + 5.0 * unit(rng);
    comp.lo = unit(rng) * (top - comp.span);
    comp.alpha = 0.3 + 4.7 * unit(rng);
    comp.beta = 0.3 + 4.7 * unit(rng);
    comp.weight = 0.1 + unit(rng);
    weight_total += comp.weight;
    mix.push_back(comp);
  }

  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = unit(rng) * weight_total;
    std::size_t c = 0;
    while (c + 1 < mix.size() && u >= mix[c].weight) u -= mix[c++].weight;
    const auto& comp = mix[c];
    double x = comp.at;
    if (comp.kind == 2) {
      boost::random::beta_distribution<double> beta(comp.alpha, comp.beta);
      x = comp.lo + comp.span * beta(rng);
    }
    out.push_back(std::clamp(x, 0.0, top));
  }
  return out;
}

GainSummary summarize(std::vector<double> gains) {
  std::sort(gains.begin(), gains.end());
  const auto n = gains.size();
  auto rank = [&](double q) {
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return gains[std::clamp<std::size_t>(k, 1, n) - 1];
  };
  auto frac = [&](auto pred) {
    if (n == 0) return 0.0;
    return static_cast<double>(std::count_if(gains.begin(), gains.end(), pred)) /
           static_cast<double>(n);
  };
  return GainSummary{
      n ? gains.front() : std::numeric_limits<double>::quiet_NaN(),
      rank(0.10),
      rank(0.25),
      rank(0.50),
      rank(0.75),
      rank(0.90),
      frac([](double g) { return g < 1.0; }),
      frac([](double g) { return g > 2.5; }),
      frac([](double g) { return g > 10.0; }),
  };
}

GainStudy run_gain_study(std::size_t users, std::uint64_t seed) {
  auto one = [seed](std::size_t u) {
    auto samples = synthetic_user_samples(seed, u);
    auto coarse = build_histogram(samples, unit_breaks(kLogBins, 1.0), 1);
    auto fine = build_histogram(samples, unit_breaks(2 * kLogBins, 0.5), 0);
    auto trimmed = trim(coarse);
    std::pair<double, double> span{trimmed.breaks().front(), trimmed.breaks().back()};
    return UserGain{
        u,
        count(coarse),
        trimmed.bin_count(),
        emdcc_histogram(trimmed).total,
        emdcc_histogram(fine, span).total,
        information_gain(coarse),
    };
  };

  GainStudy study;
  study.users.reserve(users);
  for (std::size_t u = 0; u < users; ++u) study.users.push_back(one(u));

  std::vector<double> gains;
  gains.reserve(users);
  for (const auto& u : study.users) gains.push_back(u.gain);
  study.summary = summarize(std::move(gains));
  return study;
}

}  // namespace histtools::study
