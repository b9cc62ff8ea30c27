#include <json.hpp>

#include "histtools/error.hpp"
#include "histtools/wire.hpp"

namespace histtools::wire {

using nlohmann::json;

std::string to_json(const Histogram& h, int indent) {
  json j;
  j["breaks"] = h.breaks();
  j["counts"] = h.counts();
  j["moment_order"] = h.moment_order();
  if (h.moments()) {
    const auto raw = h.moments()->raw();
    j["moment_sums"] = std::vector<double>(raw.begin(), raw.end());
  } else {
    j["moment_sums"] = json::array();
  }
  j["name"] = h.metric_name() ? json(*h.metric_name()) : json(nullptr);
  try {
    return j.dump(indent);
  } catch (const json::type_error&) {
    throw histogram_error(errc::invalid_content, "metric name is not valid UTF-8");
  }
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw histogram_error(errc::parse, path + ": " + msg);
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) schema(std::string("/") + key, "missing required field");
  return *it;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) schema(path + "/" + std::to_string(i), "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace

Histogram from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw histogram_error(errc::parse, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) schema("", "expected a JSON object");

  auto breaks = numbers(field(j, "breaks"), "/breaks");

  const json& jc = field(j, "counts");
  if (!jc.is_array()) schema("/counts", "expected an array of unsigned integers");
  std::vector<std::uint64_t> counts;
  counts.reserve(jc.size());
  for (std::size_t i = 0; i < jc.size(); ++i) {
    if (!jc[i].is_number_unsigned()) {
      schema("/counts/" + std::to_string(i), "expected an unsigned integer");
    }
    counts.push_back(jc[i].get<std::uint64_t>());
  }

  int order = 0;
  if (auto it = j.find("moment_order"); it != j.end()) {
    if (!it->is_number_unsigned() || it->get<std::uint64_t>() > 255) {
      schema("/moment_order", "expected an integer in [0, 255]");
    }
    order = it->get<int>();
  }
  std::vector<double> sums;
  if (auto it = j.find("moment_sums"); it != j.end()) sums = numbers(*it, "/moment_sums");

  std::optional<BinMoments> moments;
  if (order > 0) {
    const std::size_t expected = static_cast<std::size_t>(order) * counts.size();
    if (sums.size() != expected) {
      throw histogram_error(errc::shape, "/moment_sums: expected " + std::to_string(expected) +
                                             " values (moment_order x bins), got " +
                                             std::to_string(sums.size()));
    }
    moments.emplace(order, counts.size(), std::move(sums));
  } else if (!sums.empty()) {
    throw histogram_error(errc::shape, "/moment_sums: present but moment_order is 0");
  }

  std::optional<std::string> name;
  if (auto it = j.find("name"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) schema("/name", "expected a string or null");
    name = it->get<std::string>();
  }
  return Histogram(std::move(breaks), std::move(counts), std::move(moments), std::move(name));
}

}  // namespace histtools::wire
