#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gapforge::url {

struct Parts {
  std::string scheme;
  std::string host;
  int port = 0;  // 0 when not given explicitly
  std::string path;  // path plus query, always starting with '/'
  std::string fragment;  // without '#', empty when absent
  bool has_fragment = false;

  // "scheme://host[:port]", the form HTTP clients take as a base.
  std::string origin() const {
    std::string out = scheme + "://" + host;
    if (port != 0) out += ":" + std::to_string(port);
    return out;
  }
};

inline std::optional<Parts> parse(std::string_view s) {
  const auto sep = s.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  Parts p;
  p.scheme = std::string(s.substr(0, sep));
  for (char c : p.scheme)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c == '+' || c == '-' || c == '.'))
      return std::nullopt;
  std::string_view rest = s.substr(sep + 3);
  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    p.fragment = std::string(rest.substr(hash + 1));
    p.has_fragment = true;
    rest = rest.substr(0, hash);
  }
  const auto slash = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, slash);
  p.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (!p.path.empty() && p.path.front() == '?') p.path.insert(p.path.begin(), '/');
  if (authority.empty()) return std::nullopt;
  if (const auto colon = authority.rfind(':');
      colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto port = authority.substr(colon + 1);
    if (port.empty() || port.size() > 5) return std::nullopt;
    int value = 0;
    for (char c : port) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + (c - '0');
    }
    p.port = value;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  for (char c : authority)
    if (c == ' ' || c == '@') return std::nullopt;
  p.host = std::string(authority);
  return p;
}

inline bool is_unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '.' || c == '_' || c == '~' || c == '-';
}

// Percent-encodes every byte outside `keep(c)` as %XX (upper-case hex).
template <typename Keep>
std::string percent_encode(std::string_view s, Keep keep) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() * 3);
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (keep(c)) {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

// RFC 3986 component encoding (query values, path segments).
inline std::string encode_component(std::string_view s) {
  return percent_encode(s, is_unreserved);
}

// Decodes %XX escapes; malformed escapes are copied through unchanged.
inline std::string percent_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex(s[i + 1]);
      const int lo = hex(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace gapforge::url
