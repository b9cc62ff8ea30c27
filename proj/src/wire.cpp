#include "histtools/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <optional>

#include <boost/crc.hpp>

#include "histtools/error.hpp"

namespace histtools::wire {

namespace {

class Writer {
 public:
  explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t>& data() { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1, "u8")); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2, "u16")); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4, "u32")); }
  std::uint64_t u64() { return le(8, "u64"); }
  double f64() { return std::bit_cast<double>(le(8, "f64")); }

  std::string str(std::size_t n) {
    need(n, "name");
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  /// Fails with the current offset unless `n` more bytes are available.
  void need(std::uint64_t n, const char* what) const {
    if (n > in_.size() - pos_) {
      throw truncation_error(pos_, std::string("input truncated at byte ") +
                                       std::to_string(pos_) + " while reading " + what);
    }
  }

  std::size_t pos() const { return pos_; }

 private:
  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::uint64_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::size_t encoded_size(std::size_t bins, int order, bool has_name, std::size_t name_bytes) {
  std::size_t n = 4 + 1 + 1 + 4 + 8 * (bins + 1) + 8 * bins;
  if (order > 0) n += 1 + 8 * static_cast<std::size_t>(order) * bins;
  if (has_name) n += 2 + name_bytes;
  return n + 4;
}

std::vector<std::uint8_t> encode(const Histogram& h) {
  const std::size_t bins = h.bin_count();
  const int order = h.moment_order();
  const auto& name = h.metric_name();
  if (bins > std::numeric_limits<std::uint32_t>::max()) {
    throw histogram_error(errc::shape, "bin count exceeds the u32 wire field");
  }
  if (order > std::numeric_limits<std::uint8_t>::max()) {
    throw histogram_error(errc::shape, "moment order exceeds the u8 wire field");
  }
  if (name && name->size() > std::numeric_limits<std::uint16_t>::max()) {
    throw histogram_error(errc::shape, "metric name longer than 65535 bytes");
  }

  Writer w(encoded_size(bins, order, name.has_value(), name ? name->size() : 0));
  w.bytes(kMagic);
  w.u8(kVersion);
  std::uint8_t flags = 0;
  if (order > 0) flags |= kFlagMoments;
  if (name) flags |= kFlagName;
  w.u8(flags);
  w.u32(static_cast<std::uint32_t>(bins));
  for (double b : h.breaks()) w.f64(b);
  for (auto c : h.counts()) w.u64(c);
  if (order > 0) {
    w.u8(static_cast<std::uint8_t>(order));
    for (double s : h.moments()->raw()) w.f64(s);
  }
  if (name) {
    w.u16(static_cast<std::uint16_t>(name->size()));
    w.bytes(*name);
  }
  w.u32(crc32(w.data()));
  return std::move(w.data());
}

Histogram decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw histogram_error(errc::format, "bad magic: not an HGT1 histogram");
  }
  r.str(4);
  const auto version = r.u8();
  if (version != kVersion) {
    throw histogram_error(errc::format, "unsupported wire version " + std::to_string(version));
  }
  const auto flags = r.u8();
  if ((flags & ~(kFlagMoments | kFlagName)) != 0) {
    throw histogram_error(errc::format, "unknown flag bits set");
  }
  const std::uint64_t bins = r.u32();
  r.need(16 * bins + 8, "breaks and counts");

  std::vector<double> breaks(bins + 1);
  for (auto& b : breaks) b = r.f64();
  std::vector<std::uint64_t> counts(bins);
  for (auto& c : counts) c = r.u64();

  int order = 0;
  std::vector<double> sums;
  if (flags & kFlagMoments) {
    order = r.u8();
    r.need(8 * bins * static_cast<std::uint64_t>(order), "moment sums");
    sums.resize(static_cast<std::size_t>(order) * bins);
    for (auto& s : sums) s = r.f64();
  }
  std::optional<std::string> name;
  if (flags & kFlagName) {
    const auto len = r.u16();
    name = r.str(len);
  }
  const std::size_t body = r.pos();
  const auto stored = r.u32();
  if (r.pos() != bytes.size()) {
    throw histogram_error(errc::format, std::to_string(bytes.size() - r.pos()) +
                                            " trailing bytes after checksum");
  }
  if (stored != crc32(bytes.first(body))) {
    throw histogram_error(errc::corruption, "CRC-32 mismatch");
  }

  try {
    std::optional<BinMoments> moments;
    if (flags & kFlagMoments) moments.emplace(order, bins, std::move(sums));
    return Histogram(std::move(breaks), std::move(counts), std::move(moments), std::move(name));
  } catch (const histogram_error& e) {
    throw histogram_error(errc::invalid_content, std::string("invalid content: ") + e.what());
  }
}

}  // namespace histtools::wire
