#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "histtools/histogram.hpp"

namespace histtools {

/**
 * Bin-boundary rule shared by every producer in a distributed job.
 *
 * Histograms built from the same scheme have bit-identical breaks and can be
 * merged; this is the synchronization requirement placed on mappers.
 */
class BucketScheme {
 public:
  struct Explicit {
    std::vector<double> breaks;
  };
  struct FixedWidth {
    double start;
    double width;
    std::size_t count;
  };
  struct PowerOfTwo {
    int min_exponent;
    int max_exponent;
  };
  using Rule = std::variant<Explicit, FixedWidth, PowerOfTwo>;

  static BucketScheme explicit_breaks(std::vector<double> breaks);
  static BucketScheme fixed_width(double start, double width, std::size_t count);
  static BucketScheme power_of_two(int min_exponent, int max_exponent);

  const Rule& rule() const noexcept { return rule_; }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  std::size_t bin_count() const noexcept { return breaks_.size() - 1; }

  /// Bin index under the (a, b] convention, or nullopt outside the range.
  std::optional<std::size_t> bucket_of(double x) const;

 private:
  BucketScheme(Rule rule, std::vector<double> breaks);

  Rule rule_;
  std::vector<double> breaks_;
};

struct KeyValue {
  std::size_t bucket;
  std::uint64_t value;

  friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

/// Mapper output for key-value histogram generation.  Samples outside the
/// scheme never become pairs; they are collected in `overflow` instead.
struct Emission {
  std::vector<KeyValue> pairs;
  std::vector<double> overflow;
};

Emission map_emit(std::span<const double> samples, const BucketScheme& scheme);

/// Sums pair values per bucket.  Throws errc::shape for a bucket index
/// outside the scheme.
Histogram reduce_pairs(std::span<const KeyValue> pairs, const BucketScheme& scheme);

enum class MapReduceMethod {
  mapper_histograms = 1,  // each shard builds a histogram, reducer merges
  key_value = 2,          // each shard emits (bucket, 1), reducer sums
};

/**
 * In-process MapReduce over contiguous shards.
 *
 * Shards run concurrently; partial results are folded in shard order so the
 * output does not depend on scheduling.  Key-value mode carries no moment
 * information and rejects moment_order > 0.
 */
Histogram simulate_mapreduce(std::span<const double> samples, const BucketScheme& scheme,
                             std::size_t shards, MapReduceMethod method, int moment_order = 0);

// DTrace aggregation text ------------------------------------------------

struct DtraceRow {
  std::int64_t value;
  std::uint64_t count;
};

struct DtraceAggregation {
  std::optional<std::string> key;
  std::vector<DtraceRow> rows;
  std::size_t line = 0;  // line of the header
};

struct Diagnostic {
  std::size_t line;
  std::string message;
};

struct DtraceParse {
  std::vector<DtraceAggregation> blocks;
  std::vector<Diagnostic> diagnostics;
};

struct NamedHistogram {
  std::string name;
  Histogram histogram;
};

/**
 * Reads `quantize`/`lquantize` style distribution blocks:
 *
 *     key line (optional)
 *              value  ------------- Distribution ------------- count
 *                  4 |@@@@@@@@@@                               3
 *
 * Text outside blocks is ignored.  In lenient mode a malformed row
 * discards its block and is reported as a diagnostic; in strict mode it
 * throws parse_error carrying the line number.
 */
DtraceParse parse_dtrace_blocks(std::istream& in, bool strict = false);

/// Row value v closes bin (v_prev, v]; the first left break mirrors the gap
/// to the second row (or sits one unit below a lone row).
Histogram to_histogram(const DtraceAggregation& agg);

std::vector<NamedHistogram> parse_dtrace(std::istream& in,
                                         std::vector<Diagnostic>* diagnostics = nullptr,
                                         bool strict = false);

}  // namespace histtools
