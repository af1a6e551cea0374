#pragma once

#include <string>
#include <string_view>

#include "gapforge/util/url.hpp"

namespace gapforge {

// File-system name for a page title: spaces become underscores and bytes
// that are unsafe in file names are percent-encoded. UTF-8 passes through.
inline std::string title_slug(std::string_view title) {
  std::string spaced;
  spaced.reserve(title.size());
  for (char c : title) spaced.push_back(c == ' ' ? '_' : c);
  return url::percent_encode(spaced, [](unsigned char c) {
    if (c < 0x20 || c == 0x7F) return false;
    switch (c) {
      case '/': case '\\': case ':': case '*': case '?': case '"': case '<': case '>':
      case '|': case '%':
        return false;
      default:
        return true;
    }
  });
}

// Inverse of title_slug for titles that never contained underscores, which
// is the MediaWiki convention (underscores and spaces are the same title).
inline std::string title_from_slug(std::string_view slug) {
  std::string out = url::percent_decode(slug);
  for (char& c : out)
    if (c == '_') c = ' ';
  return out;
}

}  // namespace gapforge
