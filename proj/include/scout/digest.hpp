#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace scout {

using json = nlohmann::json;

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : data) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

inline std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

inline std::string trim_copy(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

inline std::string lower_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Canonical form used for script matching and fingerprints: object keys
/// sorted (the default json object order), string values trimmed, and the
/// "query" field lowercased so formatting noise never breaks a match.
inline json canonicalize_payload(const json& value, bool lowercase_value = false) {
  if (value.is_object()) {
    json out = json::object();
    for (auto it = value.begin(); it != value.end(); ++it) {
      out[it.key()] = canonicalize_payload(it.value(), it.key() == "query");
    }
    return out;
  }
  if (value.is_array()) {
    json out = json::array();
    for (const auto& item : value) out.push_back(canonicalize_payload(item, lowercase_value));
    return out;
  }
  if (value.is_string()) {
    std::string s = trim_copy(value.get<std::string>());
    if (lowercase_value) s = lower_copy(s);
    return json(s);
  }
  return value;
}

inline std::string digest_hex(const json& value) {
  return hex64(fnv1a64(canonicalize_payload(value).dump()));
}

}  // namespace scout
