#include <charconv>
#include <istream>
#include <string_view>

#include "histtools/error.hpp"
#include "histtools/ingest.hpp"

namespace histtools {

namespace {

std::string_view strip(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_header(std::string_view line) {
  line = strip(line);
  return line.starts_with("value") && line.ends_with("count") &&
         line.find("Distribution") != std::string_view::npos;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

enum class RowKind { not_a_row, ok, malformed };

// "<value> |<bar> <count>".  A line whose first token is an integer followed
// by '|' is a row; anything wrong after that makes it malformed.
RowKind parse_row(std::string_view line, DtraceRow& row, std::string& why) {
  line = strip(line);
  auto bar = line.find('|');
  if (bar == std::string_view::npos) return RowKind::not_a_row;
  auto value_tok = strip(line.substr(0, bar));
  if (!parse_int(value_tok, row.value)) {
    if (!value_tok.empty() && (value_tok.front() == '<' || value_tok.front() == '>')) {
      why = "open-ended row '" + std::string(value_tok) + "' is not supported";
      return RowKind::malformed;
    }
    return RowKind::not_a_row;
  }
  auto rest = line.substr(bar + 1);
  auto sp = rest.find_last_of(" \t");
  if (sp == std::string_view::npos) {
    why = "row has no count column";
    return RowKind::malformed;
  }
  auto bars = rest.substr(0, sp);
  if (bars.find_first_not_of("@ \t") != std::string_view::npos) {
    why = "unexpected characters in distribution bar";
    return RowKind::malformed;
  }
  if (!parse_int(rest.substr(sp + 1), row.count)) {
    why = "count is not a nonnegative integer";
    return RowKind::malformed;
  }
  return RowKind::ok;
}

}  // namespace

DtraceParse parse_dtrace_blocks(std::istream& in, bool strict) {
  DtraceParse out;
  std::optional<std::string> pending_key;
  std::optional<DtraceAggregation> block;
  bool block_bad = false;

  // A bad block already has its diagnostic from the offending row.
  auto close_block = [&] {
    if (!block) return;
    if (!block_bad && block->rows.empty()) {
      out.diagnostics.push_back({block->line, "distribution header without rows; block skipped"});
    } else if (!block_bad) {
      out.blocks.push_back(std::move(*block));
    }
    block.reset();
    block_bad = false;
    pending_key.reset();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;

    if (is_header(line)) {
      close_block();
      block.emplace();
      block->key = pending_key;
      block->line = line_no;
      pending_key.reset();
      continue;
    }

    DtraceRow row{};
    std::string why;
    auto kind = parse_row(line, row, why);
    if (kind != RowKind::not_a_row) {
      if (!block) {
        out.diagnostics.push_back({line_no, "distribution row outside a block ignored"});
        continue;
      }
      if (kind == RowKind::ok && !block->rows.empty() && row.value <= block->rows.back().value) {
        kind = RowKind::malformed;
        why = "row values must be strictly increasing";
      }
      if (kind == RowKind::malformed) {
        if (strict) throw parse_error(line_no, "line " + std::to_string(line_no) + ": " + why);
        if (!block_bad) {
          out.diagnostics.push_back({line_no, why + "; block discarded"});
        }
        block_bad = true;
        continue;
      }
      if (!block_bad) block->rows.push_back(row);
      continue;
    }

    auto text = strip(line);
    if (block) close_block();
    if (!text.empty()) pending_key = std::string(text);
  }
  close_block();
  return out;
}

Histogram to_histogram(const DtraceAggregation& agg) {
  if (agg.rows.empty()) throw histogram_error(errc::shape, "aggregation has no rows");
  const auto& rows = agg.rows;
  std::vector<double> breaks;
  breaks.reserve(rows.size() + 1);
  double first = static_cast<double>(rows.front().value);
  double gap = rows.size() > 1 ? static_cast<double>(rows[1].value) - first : 1.0;
  breaks.push_back(first - gap);
  std::vector<std::uint64_t> counts;
  counts.reserve(rows.size());
  for (const auto& r : rows) {
    breaks.push_back(static_cast<double>(r.value));
    counts.push_back(r.count);
  }
  return Histogram(std::move(breaks), std::move(counts), std::nullopt, agg.key);
}

std::vector<NamedHistogram> parse_dtrace(std::istream& in, std::vector<Diagnostic>* diagnostics,
                                         bool strict) {
  auto parsed = parse_dtrace_blocks(in, strict);
  std::vector<NamedHistogram> out;
  out.reserve(parsed.blocks.size());
  for (const auto& b : parsed.blocks) {
    try {
      out.push_back({b.key.value_or(""), to_histogram(b)});
    } catch (const histogram_error& e) {
      if (strict) throw parse_error(b.line, e.what());
      parsed.diagnostics.push_back({b.line, std::string(e.what()) + "; block skipped"});
    }
  }
  if (diagnostics) *diagnostics = std::move(parsed.diagnostics);
  return out;
}

}  // namespace histtools
