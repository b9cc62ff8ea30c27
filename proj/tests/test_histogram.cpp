#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "histtools/error.hpp"
#include "histtools/histogram.hpp"
#include "support.hpp"

using namespace histtools;
using histtools::testing::Rng;

namespace {

std::vector<double> unit_breaks(int n) {
  std::vector<double> b;
  for (int i = 0; i <= n; ++i) b.push_back(i);
  return b;
}

Histogram example() { return build_histogram(std::vector<double>{1, 2, 3}, unit_breaks(9)); }

template <typename F>
errc code_of(F&& f) {
  try {
    f();
  } catch (const histogram_error& e) {
    return e.code();
  }
  FAIL("expected histogram_error");
  return errc::io;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("build_histogram uses (a,b] bins with a closed first bin") {
  auto h = example();
  CHECK(h.counts() == std::vector<std::uint64_t>{1, 1, 1, 0, 0, 0, 0, 0, 0});
  CHECK_FALSE(h.moments());

  auto edge = build_histogram(std::vector<double>{0.0, 1.0, 1.0000001}, {0, 1, 2});
  CHECK(edge.counts() == std::vector<std::uint64_t>{2, 1});
}

TEST_CASE("build_histogram on empty input keeps zeroed moments") {
  auto h = build_histogram(std::vector<double>{}, {0, 1}, 2);
  CHECK(h.counts() == std::vector<std::uint64_t>{0});
  REQUIRE(h.moments());
  CHECK(h.moments()->sum(1, 0) == 0.0);
  CHECK(h.moments()->sum(2, 0) == 0.0);
}

TEST_CASE("build_histogram accumulates exact power sums") {
  auto h = build_histogram(std::vector<double>{0.25, 0.75}, {0, 1}, 1);
  CHECK(h.counts() == std::vector<std::uint64_t>{2});
  CHECK(h.moments()->sum(1, 0) == 1.0);
}

TEST_CASE("build_histogram errors") {
  try {
    build_histogram(std::vector<double>{1.5, 12.25}, unit_breaks(9));
    FAIL("expected out-of-range");
  } catch (const histogram_error& e) {
    CHECK(e.code() == errc::out_of_range);
    CHECK(std::string(e.what()).find("12.25") != std::string::npos);
  }
  CHECK(code_of([] { build_histogram(std::vector<double>{}, {0, 1, 1}); }) == errc::invalid_breaks);
  CHECK(code_of([] { build_histogram(std::vector<double>{}, {0, 2, 1}); }) == errc::invalid_breaks);
  CHECK(code_of([] { build_histogram(std::vector<double>{}, {0}); }) == errc::invalid_breaks);
  CHECK(code_of([] {
          build_histogram(std::vector<double>{}, {0, std::numeric_limits<double>::infinity()});
        }) == errc::invalid_breaks);
}

TEST_CASE("Histogram constructor enforces moment consistency") {
  CHECK(code_of([] {
          Histogram({0, 1}, {2}, BinMoments(1, 1, {5.0}));
        }) == errc::invalid_content);
  CHECK(code_of([] {
          Histogram({0, 1}, {0}, BinMoments(1, 1, {0.5}));
        }) == errc::invalid_content);
  CHECK(code_of([] { Histogram({0, 1}, {1, 2}); }) == errc::shape);
  CHECK(code_of([] { BinMoments(2, 3, std::vector<double>(5)); }) == errc::shape);
  // Even powers over a bin straddling zero: S_2 / n may be anywhere in [0, max].
  Histogram ok({-1, 1}, {2}, BinMoments(2, 1, {0.0, 0.0}));
  CHECK(ok.moment_order() == 2);
}

TEST_CASE("merge") {
  auto brks = unit_breaks(5);
  auto a = build_histogram(std::vector<double>{1, 2}, brks, 1);
  auto b = build_histogram(std::vector<double>{3, 4}, brks, 1);

  SUBCASE("identity") { CHECK(merge(a, Histogram::empty(brks, 1)) == a); }
  SUBCASE("additivity") { CHECK(count(merge(a, b)) == count(a) + count(b)); }
  SUBCASE("matches direct construction") {
    CHECK(merge(a, b) == build_histogram(std::vector<double>{1, 2, 3, 4}, brks, 1));
  }
  SUBCASE("incompatible breaks name the first differing position") {
    auto c = build_histogram(std::vector<double>{}, {0, 1, 2, 3.5, 4, 5});
    try {
      merge(build_histogram(std::vector<double>{}, brks), c);
      FAIL("expected error");
    } catch (const histogram_error& e) {
      CHECK(e.code() == errc::incompatible_breaks);
      CHECK(std::string(e.what()).find("position 3") != std::string::npos);
    }
  }
  SUBCASE("incompatible annotation") {
    auto plain = build_histogram(std::vector<double>{}, brks);
    CHECK(code_of([&] { merge(a, plain); }) == errc::incompatible_annotation);
    auto two = build_histogram(std::vector<double>{}, brks, 2);
    CHECK(code_of([&] { merge(a, two); }) == errc::incompatible_annotation);
  }
  SUBCASE("metric name kept only when equal") {
    CHECK(merge(a.with_name("x"), b.with_name("x")).metric_name() == "x");
    CHECK_FALSE(merge(a.with_name("x"), b.with_name("y")).metric_name());
    CHECK_FALSE(merge(a.with_name("x"), b).metric_name());
  }
}

TEST_CASE("trim") {
  auto h = Histogram({0, 1, 2, 3, 4, 5}, {0, 0, 5, 3, 0});
  auto t = trim(h);
  CHECK(t.counts() == std::vector<std::uint64_t>{5, 3});
  CHECK(t.breaks() == std::vector<double>{2, 3, 4});

  auto full = Histogram({0, 1, 2}, {1, 2});
  CHECK(trim(full) == full);

  auto interior = trim(Histogram({0, 1, 2, 3, 4, 5}, {0, 1, 0, 1, 0}));
  CHECK(interior.counts() == std::vector<std::uint64_t>{1, 0, 1});

  auto zero = trim(Histogram::empty({0, 1, 2, 3}, 2));
  CHECK(zero.breaks() == std::vector<double>{0, 3});
  CHECK(zero.counts() == std::vector<std::uint64_t>{0});
  CHECK(zero.moment_order() == 2);

  auto annotated = build_histogram(std::vector<double>{2.5, 3.5, 3.25}, unit_breaks(5), 2);
  auto ta = trim(annotated);
  CHECK(ta.moments()->sum(1, 0) == 2.5);
  CHECK(ta.moments()->sum(2, 1) == 3.5 * 3.5 + 3.25 * 3.25);
}

TEST_CASE("count") {
  CHECK(count(example()) == 3);
  CHECK(count(Histogram::empty({0, 1})) == 0);
}

TEST_CASE("approx_mean") {
  CHECK(approx_mean(example()) == doctest::Approx((0.5 + 1.5 + 2.5) / 3).epsilon(1e-15));
  CHECK(approx_mean(Histogram({2, 6}, {7})) == 4.0);
  CHECK(code_of([] { approx_mean(Histogram::empty({0, 1})); }) == errc::empty_histogram);

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    auto brks = testing::random_breaks(rng);
    auto s = testing::random_samples(rng, brks);
    if (s.empty()) continue;
    auto h = build_histogram(s, brks, 1);
    double direct = 0.0;
    for (double x : s) direct += x;
    direct /= static_cast<double>(s.size());
    CHECK(approx_mean(h) == doctest::Approx(direct).epsilon(1e-12).scale(50));
  }
}

TEST_CASE("approx_quantile follows the interpolation rule") {
  auto h = example();
  CHECK(approx_quantile(h, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(approx_quantile(h, 0.0) == 0.0);
  CHECK(approx_quantile(h, 1.0) == 3.0);
  CHECK(approx_quantile(trim(h), 1.0) == 3.0);
  // Knot ties resolve to the left bin's right edge.
  CHECK(approx_quantile(h, 1.0 / 3.0) == 1.0);
  CHECK(approx_quantile(Histogram({4, 10}, {9}), 0.5) == 7.0);

  std::vector<double> qs{0.05, 0.95};
  auto v = approx_quantile(h, qs);
  CHECK(v[0] == doctest::Approx(testing::quantile_by_bisection(h, 0.05)).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(testing::quantile_by_bisection(h, 0.95)).epsilon(1e-12));

  CHECK(code_of([&] { approx_quantile(h, 1.5); }) == errc::domain);
  CHECK(code_of([&] { approx_quantile(h, -0.1); }) == errc::domain);
  CHECK(code_of([] { approx_quantile(Histogram::empty({0, 1}), 0.5); }) == errc::empty_histogram);
}

TEST_CASE("approx_quantile agrees with the bisection oracle on random histograms") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    auto h = testing::random_histogram(rng, 0);
    if (count(h) == 0) continue;
    double span = h.breaks().back() - h.breaks().front();
    for (int j = 0; j < 10; ++j) {
      double q = testing::uniform(rng, 0.0, 1.0);
      CHECK(approx_quantile(h, q) ==
            doctest::Approx(testing::quantile_by_bisection(h, q)).epsilon(1e-9 * span / (std::abs(h.breaks().front()) + span)));
    }
  }
}

TEST_CASE("hist_to_ecdf") {
  auto h = build_histogram(std::vector<double>{1, 2, 3}, unit_breaks(3));
  auto e = hist_to_ecdf(h);
  REQUIRE(e.probs.size() == 4);
  CHECK(e.probs[0] == 0.0);
  CHECK(e.probs[1] == doctest::Approx(1.0 / 3));
  CHECK(e.probs[2] == doctest::Approx(2.0 / 3));
  CHECK(e.probs[3] == 1.0);
  CHECK(e.knots == h.breaks());

  auto one = hist_to_ecdf(Histogram({0, 1}, {4}));
  CHECK(one.probs == std::vector<double>{0.0, 1.0});
  CHECK(one.step(1.0) == 1.0);
  CHECK(one.step(0.999) == 0.0);
  CHECK(one.interpolate(0.25) == 0.25);
  CHECK(e.step(-1.0) == 0.0);
  CHECK(e.step(17.0) == 1.0);
  CHECK(e.interpolate(1.5) == doctest::Approx(0.5));
  CHECK(code_of([] { hist_to_ecdf(Histogram::empty({0, 1})); }) == errc::empty_histogram);
}

TEST_CASE("coalesce_bins") {
  Rng rng(3);
  std::vector<double> s;
  for (int i = 0; i < 500; ++i) s.push_back(testing::uniform(rng, 0.0, 48.0));
  auto h = build_histogram(s, unit_breaks(48), 2);
  auto c = coalesce_bins(h, 2);
  REQUIRE(c.bin_count() == 24);
  for (std::size_t i = 0; i < 24; ++i) {
    CHECK(c.counts()[i] == h.counts()[2 * i] + h.counts()[2 * i + 1]);
    CHECK(c.width(i) == 2.0);
  }
  CHECK(count(c) == count(h));
  double s1h = 0, s1c = 0;
  for (std::size_t i = 0; i < 48; ++i) s1h += h.moments()->sum(1, i);
  for (std::size_t i = 0; i < 24; ++i) s1c += c.moments()->sum(1, i);
  CHECK(s1c == doctest::Approx(s1h).epsilon(1e-14));
  // Pairwise sums regroup the same additions, so the total S_1 is identical.
  CHECK(approx_mean(c) == doctest::Approx(approx_mean(h)).epsilon(1e-14));

  CHECK(code_of([&] { coalesce_bins(h, 5); }) == errc::shape);
  CHECK(code_of([&] { coalesce_bins(h, 1); }) == errc::domain);
}

TEST_CASE("properties on random histograms") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    auto brks = testing::random_breaks(rng);
    int order = static_cast<int>(testing::uniform_index(rng, 0, 3));
    auto sa = testing::random_samples(rng, brks);
    auto sb = testing::random_samples(rng, brks);
    auto sc = testing::random_samples(rng, brks);
    auto a = build_histogram(sa, brks, order);
    auto b = build_histogram(sb, brks, order);
    auto c = build_histogram(sc, brks, order);

    // Commutativity and associativity are exact on counts; sums may differ
    // in the last bits because floating-point addition is not associative.
    CHECK(merge(a, b).counts() == merge(b, a).counts());
    CHECK(merge(merge(a, b), c).counts() == merge(a, merge(b, c)).counts());
    if (order > 0) {
      // Two-operand addition is commutative in IEEE arithmetic.
      CHECK(bitwise_equal(merge(a, b).moments()->raw(), merge(b, a).moments()->raw()));
    }

    std::vector<double> all(sa);
    all.insert(all.end(), sb.begin(), sb.end());
    auto direct = build_histogram(all, brks, order);
    auto merged = merge(a, b);
    CHECK(direct.counts() == merged.counts());
    if (order > 0) {
      auto d = direct.moments()->raw();
      auto m = merged.moments()->raw();
      for (std::size_t k = 0; k < d.size(); ++k) {
        CHECK(m[k] == doctest::Approx(d[k]).epsilon(1e-12));
      }
    }

    CHECK(trim(trim(direct)) == trim(direct));

    if (order >= 2) {
      for (std::size_t bin = 0; bin < direct.bin_count(); ++bin) {
        auto n = static_cast<double>(direct.counts()[bin]);
        if (n == 0) continue;
        double mu = direct.moments()->sum(1, bin) / n;
        double var = direct.moments()->sum(2, bin) / n - mu * mu;
        double lo = direct.left(bin), hi = direct.right(bin);
        double scale = std::max(std::abs(lo), std::abs(hi));
        CHECK(var >= -1e-9 * scale * scale);
        CHECK(var <= (mu - lo) * (hi - mu) + 1e-9 * scale * scale);
      }
    }
  }
}
