#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace histtools {

/// Failure categories reported by every module in the library.
enum class errc {
  out_of_range,            // sample outside the break range
  invalid_breaks,          // breaks not finite / not strictly increasing
  incompatible_breaks,     // merge of histograms with different breaks
  incompatible_annotation, // merge of histograms with different moment orders
  empty_histogram,         // statistic requested on a zero-count histogram
  domain,                  // scalar argument outside its domain
  shape,                   // length / divisibility mismatch
  infeasible_moments,      // moments outside the attainable box
  unsupported_layout,      // e.g. unequal bin widths for information gain
  unsupported_combination, // e.g. key-value MapReduce with moments
  format,                  // bad magic / version
  corruption,              // CRC mismatch
  invalid_content,         // decoded payload violates histogram invariants
  truncation,              // input ended early
  parse,                   // text parse failure
  io,                      // file system failure
};

const char* to_string(errc code) noexcept;

class histogram_error : public std::runtime_error {
 public:
  histogram_error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

/// Raised by the binary decoder when the input ends before the layout does.
class truncation_error : public histogram_error {
 public:
  truncation_error(std::size_t offset, const std::string& what)
      : histogram_error(errc::truncation, what), offset_(offset) {}

  /// Byte offset at which more input was needed.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised by text parsers; carries the 1-based line number when known.
class parse_error : public histogram_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : histogram_error(errc::parse, what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace histtools
