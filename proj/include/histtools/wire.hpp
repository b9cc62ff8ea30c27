#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "histtools/histogram.hpp"

namespace histtools::wire {

/*
 * Binary layout, all integers and floats little-endian:
 *
 *   offset  size      field
 *   0       4         magic "HGT1"
 *   4       1         version (1)
 *   5       1         flags: bit 0 moments present, bit 1 name present
 *   6       4         B, bin count (u32)
 *   10      8(B+1)    breaks (IEEE-754 binary64)
 *           8B        counts (u64)
 *   [moments]         order p (u8), then p*B sums (binary64), order-major
 *   [name]            length (u16), then UTF-8 bytes
 *           4         CRC-32 (IEEE 802.3) of every preceding byte
 */
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint8_t kFlagMoments = 0x01;
inline constexpr std::uint8_t kFlagName = 0x02;
inline constexpr std::string_view kMagic = "HGT1";

/// Exact encoded size for B bins, moment order p (0 = absent) and a name of
/// `name_bytes` bytes (`has_name` false = absent).
std::size_t encoded_size(std::size_t bins, int order, bool has_name, std::size_t name_bytes);

std::vector<std::uint8_t> encode(const Histogram& h);

/// Rejects bad magic/version (errc::format), truncated input
/// (truncation_error), CRC mismatch (errc::corruption) and payloads that
/// violate Histogram invariants (errc::invalid_content).
Histogram decode(std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// JSON object with fields breaks, counts, moment_order, moment_sums, name.
std::string to_json(const Histogram& h, int indent = -1);
Histogram from_json(std::string_view text);

}  // namespace histtools::wire
