#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "gapforge/error.hpp"
#include "gapforge/util/fs.hpp"
#include "gapforge/util/text.hpp"

namespace gapforge {

// A chat prompt split into its system and user parts, plus an optional
// reminder appended as a follow-up user turn on the single format retry.
struct PromptTemplate {
  std::string system;
  std::string user;
  std::string reminder;
};

// Replaces every "{name}" with its value. Unknown placeholders stay put.
inline std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find('}', open + 1);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const auto it = vars.find(std::string(tmpl.substr(open + 1, close - open - 1)));
    if (it != vars.end()) {
      out.append(it->second);
    } else {
      out.append(tmpl.substr(open, close - open + 1));
    }
    pos = close + 1;
  }
  out.append(tmpl.substr(pos));
  return out;
}

// Parses "[system]" / "[user]" / "[reminder]" sections.
inline PromptTemplate parse_prompt_template(std::string_view source) {
  PromptTemplate t;
  std::string* current = nullptr;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const auto line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                       : nl - pos);
    const auto trimmed = text::trim(line);
    if (trimmed == "[system]") {
      current = &t.system;
    } else if (trimmed == "[user]") {
      current = &t.user;
    } else if (trimmed == "[reminder]") {
      current = &t.reminder;
    } else if (current) {
      current->append(line);
      current->push_back('\n');
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  for (auto* part : {&t.system, &t.user, &t.reminder}) *part = std::string(text::trim(*part));
  return t;
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::kIoError, "SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// Versioned prompt templates, one file per task and language:
//
//   <dir>/<lang>/decompose.txt
//   <dir>/<lang>/verify.txt
//   <dir>/<lang>/translate.txt
//
// The content hash covers every file (sorted by relative path) so datasets
// can record exactly which prompts produced them.
class PromptLibrary {
 public:
  PromptLibrary() = default;

  static PromptLibrary load(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
      fail(ErrorCode::kConfigError, "prompt directory not found: " + dir.string());
    PromptLibrary lib;
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
      if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
      const auto rel = std::filesystem::relative(e.path(), dir).generic_string();
      files.emplace_back(rel, detail::read_file(e.path()));
    }
    std::sort(files.begin(), files.end());
    std::string digest_input;
    for (const auto& [rel, body] : files) {
      digest_input += rel + "\n" + std::to_string(body.size()) + "\n" + body;
      const auto slash = rel.find('/');
      if (slash == std::string::npos) continue;
      const auto lang = rel.substr(0, slash);
      const auto task = std::filesystem::path(rel.substr(slash + 1)).stem().string();
      lib.templates_[task + "/" + lang] = parse_prompt_template(body);
    }
    lib.hash_ = sha256_hex(digest_input);
    return lib;
  }

  void add(std::string_view task, std::string_view lang, PromptTemplate t) {
    templates_[std::string(task) + "/" + std::string(lang)] = std::move(t);
  }

  bool has(std::string_view task, std::string_view lang) const {
    return templates_.count(std::string(task) + "/" + std::string(lang)) > 0;
  }

  const PromptTemplate& get(std::string_view task, std::string_view lang) const {
    const auto it = templates_.find(std::string(task) + "/" + std::string(lang));
    if (it == templates_.end())
      fail(ErrorCode::kConfigError, "no " + std::string(task) + " prompt for language '" +
                                        std::string(lang) + "'");
    return it->second;
  }

  const std::string& content_hash() const { return hash_; }

 private:
  std::map<std::string, PromptTemplate> templates_;
  std::string hash_;
};

inline std::string language_name(std::string_view code) {
  if (code == "en") return "English";
  if (code == "fr") return "French";
  if (code == "ru") return "Russian";
  if (code == "zh") return "Chinese";
  if (code == "de") return "German";
  if (code == "es") return "Spanish";
  if (code == "ja") return "Japanese";
  return std::string(code);
}

}  // namespace gapforge
