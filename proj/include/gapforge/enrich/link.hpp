#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gapforge/error.hpp"
#include "gapforge/util/text.hpp"
#include "gapforge/util/url.hpp"
#include "gapforge/util/utf8.hpp"

namespace gapforge {

inline constexpr std::size_t kFullFragmentLimit = 300;  // bytes
inline constexpr std::size_t kPrefixFragmentBytes = 150;

// Text-directive value encoding: only ALPHA / DIGIT / "." / "_" / "~" stay
// literal. "-", "," and "&" carry syntax inside a text directive, so they are
// always escaped along with everything else.
inline std::string encode_text_directive(std::string_view s) {
  return url::percent_encode(s, [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '~';
  });
}

// The part of `sentence` a link should target: the whole sentence up to 300
// bytes, otherwise a prefix of at most 150 bytes ending on a word boundary
// (the last whitespace, or a code point boundary for unspaced scripts).
inline std::string highlight_target(std::string_view sentence) {
  const auto s = text::trim(sentence);
  if (s.size() <= kFullFragmentLimit) return std::string(s);
  const std::size_t limit = utf8::floor_boundary(s, kPrefixFragmentBytes);
  // A space right after the limit means the whole prefix is a word run.
  std::size_t cut = std::string_view::npos;
  {
    std::size_t pos = limit;
    if (pos < s.size() && utf8::is_space(utf8::next(s, pos))) cut = limit;
  }
  if (cut == std::string_view::npos) {
    std::size_t pos = 0;
    while (pos < limit) {
      const std::size_t start = pos;
      if (utf8::is_space(utf8::next(s, pos)) && pos <= limit) cut = start;
    }
  }
  if (cut == std::string_view::npos || text::trim(s.substr(0, cut)).empty()) cut = limit;
  return std::string(text::trim(s.substr(0, cut)));
}

// `base_url` + "#:~:text=" + encoded sentence (or its prefix, see
// highlight_target). An existing fragment is kept in front of the directive.
inline std::string build_highlight_link(std::string_view base_url, std::string_view sentence) {
  const auto parts = url::parse(base_url);
  if (!parts || (parts->scheme != "http" && parts->scheme != "https"))
    fail(ErrorCode::kInvalidUrl, "not an absolute http(s) URL: " + std::string(base_url));
  if (text::trim(sentence).empty())
    fail(ErrorCode::kInvalidArgument, "cannot link to an empty sentence");
  std::string out(base_url);
  out += parts->has_fragment ? ":~:text=" : "#:~:text=";
  out += encode_text_directive(highlight_target(sentence));
  return out;
}

// Decoded textStart of the first text directive in `link`, if any.
inline std::optional<std::string> text_fragment_of(std::string_view link) {
  const auto hash = link.find('#');
  if (hash == std::string_view::npos) return std::nullopt;
  const auto directive = link.find(":~:", hash);
  if (directive == std::string_view::npos) return std::nullopt;
  auto rest = link.substr(directive + 3);
  for (auto item : text::split(rest, '&')) {
    if (item.substr(0, 5) != "text=") continue;
    auto value = item.substr(5);
    auto start = text::split(value, ',');
    auto first = start.front();
    // Skip an optional "prefix-," term.
    if (start.size() > 1 && !first.empty() && first.back() == '-') first = start[1];
    return url::percent_decode(first);
  }
  return std::nullopt;
}

}  // namespace gapforge
