#include <cmath>
#include <future>

#include "histtools/error.hpp"
#include "histtools/ingest.hpp"

namespace histtools {

BucketScheme::BucketScheme(Rule rule, std::vector<double> breaks)
    : rule_(std::move(rule)), breaks_(std::move(breaks)) {
  validate_breaks(breaks_);
}

BucketScheme BucketScheme::explicit_breaks(std::vector<double> breaks) {
  auto copy = breaks;
  return BucketScheme(Explicit{std::move(breaks)}, std::move(copy));
}

BucketScheme BucketScheme::fixed_width(double start, double width, std::size_t count) {
  if (!(width > 0.0) || count == 0) {
    throw histogram_error(errc::invalid_breaks, "fixed-width scheme needs width > 0 and count >= 1");
  }
  std::vector<double> breaks(count + 1);
  for (std::size_t i = 0; i <= count; ++i) breaks[i] = start + static_cast<double>(i) * width;
  return BucketScheme(FixedWidth{start, width, count}, std::move(breaks));
}

BucketScheme BucketScheme::power_of_two(int min_exponent, int max_exponent) {
  if (max_exponent <= min_exponent) {
    throw histogram_error(errc::invalid_breaks, "power-of-two scheme needs min_exponent < max_exponent");
  }
  std::vector<double> breaks;
  for (int k = min_exponent; k <= max_exponent; ++k) breaks.push_back(std::ldexp(1.0, k));
  return BucketScheme(PowerOfTwo{min_exponent, max_exponent}, std::move(breaks));
}

std::optional<std::size_t> BucketScheme::bucket_of(double x) const {
  return locate_bin(breaks_, x);
}

Emission map_emit(std::span<const double> samples, const BucketScheme& scheme) {
  Emission out;
  out.pairs.reserve(samples.size());
  for (double x : samples) {
    if (auto b = scheme.bucket_of(x)) {
      out.pairs.push_back({*b, 1});
    } else {
      out.overflow.push_back(x);
    }
  }
  return out;
}

Histogram reduce_pairs(std::span<const KeyValue> pairs, const BucketScheme& scheme) {
  std::vector<std::uint64_t> counts(scheme.bin_count(), 0);
  for (const auto& kv : pairs) {
    if (kv.bucket >= counts.size()) {
      throw histogram_error(errc::shape, "bucket index " + std::to_string(kv.bucket) +
                                             " outside scheme with " +
                                             std::to_string(counts.size()) + " bins");
    }
    counts[kv.bucket] += kv.value;
  }
  return Histogram(scheme.breaks(), std::move(counts));
}

Histogram simulate_mapreduce(std::span<const double> samples, const BucketScheme& scheme,
                             std::size_t shards, MapReduceMethod method, int moment_order) {
  if (shards < 1) throw histogram_error(errc::domain, "shard count must be >= 1");
  if (method == MapReduceMethod::key_value && moment_order > 0) {
    throw histogram_error(errc::unsupported_combination,
                          "key-value emission carries no moment information");
  }
  const std::size_t n = samples.size();
  auto chunk = [&](std::size_t i) {
    return samples.subspan(i * n / shards, (i + 1) * n / shards - i * n / shards);
  };

  if (method == MapReduceMethod::mapper_histograms) {
    std::vector<std::future<Histogram>> parts;
    parts.reserve(shards);
    for (std::size_t i = 0; i < shards; ++i) {
      parts.push_back(std::async(std::launch::async, [&, i] {
        return build_histogram(chunk(i), scheme.breaks(), moment_order);
      }));
    }
    Histogram acc = parts.front().get();
    for (std::size_t i = 1; i < shards; ++i) acc = merge(acc, parts[i].get());
    return acc;
  }

  std::vector<std::future<Emission>> parts;
  parts.reserve(shards);
  for (std::size_t i = 0; i < shards; ++i) {
    parts.push_back(std::async(std::launch::async, [&, i] { return map_emit(chunk(i), scheme); }));
  }
  std::vector<KeyValue> shuffled;
  std::size_t overflow = 0;
  for (auto& p : parts) {
    auto e = p.get();
    shuffled.insert(shuffled.end(), e.pairs.begin(), e.pairs.end());
    overflow += e.overflow.size();
  }
  if (overflow > 0) {
    throw histogram_error(errc::out_of_range,
                          std::to_string(overflow) + " samples fell outside the bucket scheme");
  }
  return reduce_pairs(shuffled, scheme);
}

}  // namespace histtools
