#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gapforge/align/embedding.hpp"
#include "gapforge/error.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/util/fs.hpp"
#include "gapforge/util/text.hpp"

namespace gapforge {

struct PipelineConfig {
  std::string source_lang = "en";
  std::vector<std::string> target_langs{"fr", "ru", "zh"};
  int k = 3;
  int cap = 10;
  bool mock_mode = false;

  ProviderConfig llm;        // decomposition and verification
  ProviderConfig translate;  // translation; falls back to llm's endpoint
  EmbeddingConfig embedding;

  std::string wiki_url = "https://{lang}.wikipedia.org";
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path output_dir = "datasets";
  std::filesystem::path fixtures_dir;  // offline page source; required in mock mode
  std::filesystem::path prompts_dir;
  std::filesystem::path abbreviations_dir;
  std::filesystem::path audit_log;
  std::string generated_at;  // pinned clock; empty means "now"

  std::vector<std::string> all_languages() const {
    std::vector<std::string> out{source_lang};
    out.insert(out.end(), target_langs.begin(), target_langs.end());
    return out;
  }

  void validate() const {
    if (k < 1) fail(ErrorCode::kConfigError, "k must be at least 1");
    if (cap < 0) fail(ErrorCode::kConfigError, "cap must be non-negative");
    if (source_lang.empty()) fail(ErrorCode::kConfigError, "source language is empty");
    if (std::find(target_langs.begin(), target_langs.end(), source_lang) != target_langs.end())
      fail(ErrorCode::kConfigError, "source language " + source_lang + " is also a target");
    for (std::size_t i = 0; i < target_langs.size(); ++i) {
      if (target_langs[i].empty()) fail(ErrorCode::kConfigError, "empty target language");
      for (std::size_t j = 0; j < i; ++j)
        if (target_langs[i] == target_langs[j])
          fail(ErrorCode::kConfigError, "target language " + target_langs[i] + " listed twice");
    }
    if (mock_mode && fixtures_dir.empty())
      fail(ErrorCode::kConfigError, "mock mode needs a fixtures directory");
  }
};

inline std::vector<std::string> parse_language_list(std::string_view csv) {
  std::vector<std::string> out;
  for (auto item : text::split(csv, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

namespace detail {

inline int parse_int(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, std::string(key) + " expects an integer, got '" + std::string(value) + "'");
  }
}

inline double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, std::string(key) + " expects a number, got '" + std::string(value) + "'");
  }
}

inline bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = text::ascii_lower(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorCode::kConfigError, std::string(key) + " expects a boolean, got '" + std::string(value) + "'");
}

}  // namespace detail

// Applies one "key = value" setting. Unknown keys are a ConfigError.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  const std::string v(text::trim(value));
  if (key == "source_lang") cfg.source_lang = v;
  else if (key == "target_langs") cfg.target_langs = parse_language_list(v);
  else if (key == "k") cfg.k = detail::parse_int(key, v);
  else if (key == "cap") cfg.cap = detail::parse_int(key, v);
  else if (key == "mock") cfg.mock_mode = detail::parse_bool(key, v);
  else if (key == "wiki_url") cfg.wiki_url = v;
  else if (key == "cache_dir") cfg.cache_dir = v;
  else if (key == "output_dir") cfg.output_dir = v;
  else if (key == "fixtures_dir") cfg.fixtures_dir = v;
  else if (key == "prompts_dir") cfg.prompts_dir = v;
  else if (key == "abbreviations_dir") cfg.abbreviations_dir = v;
  else if (key == "audit_log") cfg.audit_log = v;
  else if (key == "llm_url") cfg.llm.base_url = v;
  else if (key == "llm_model") cfg.llm.model = v;
  else if (key == "llm_key") cfg.llm.api_key = v;
  else if (key == "llm_temperature") cfg.llm.temperature = detail::parse_double(key, v);
  else if (key == "llm_request_budget") cfg.llm.request_budget = static_cast<std::size_t>(detail::parse_int(key, v));
  else if (key == "max_in_flight") cfg.llm.max_in_flight = cfg.translate.max_in_flight = static_cast<std::size_t>(detail::parse_int(key, v));
  else if (key == "translate_url") cfg.translate.base_url = v;
  else if (key == "translate_model") cfg.translate.model = v;
  else if (key == "translate_key") cfg.translate.api_key = v;
  else if (key == "emb_url") cfg.embedding.base_url = v;
  else if (key == "emb_model") cfg.embedding.model = v;
  else if (key == "emb_key") cfg.embedding.api_key = v;
  else if (key == "emb_batch_size") cfg.embedding.batch_size = static_cast<std::size_t>(detail::parse_int(key, v));
  else fail(ErrorCode::kConfigError, "unknown config key '" + std::string(key) + "'");
}

// Simple "key = value" file; '#' starts a comment line.
inline void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  const auto body = detail::read_file(path);
  int line_no = 0;
  for (auto line : text::split(body, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::kConfigError, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    apply_setting(cfg, text::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

inline void apply_env(PipelineConfig& cfg, const EnvLookup& env = process_env) {
  static constexpr std::pair<const char*, const char*> kVars[] = {
      {"GAPFORGE_LLM_URL", "llm_url"},         {"GAPFORGE_LLM_MODEL", "llm_model"},
      {"GAPFORGE_LLM_KEY", "llm_key"},         {"GAPFORGE_TRANSLATE_MODEL", "translate_model"},
      {"GAPFORGE_EMB_URL", "emb_url"},         {"GAPFORGE_EMB_MODEL", "emb_model"},
      {"GAPFORGE_EMB_KEY", "emb_key"},         {"GAPFORGE_WIKI_URL", "wiki_url"},
      {"GAPFORGE_CACHE_DIR", "cache_dir"},     {"GAPFORGE_PROMPTS_DIR", "prompts_dir"},
      {"GAPFORGE_FIXTURES_DIR", "fixtures_dir"}, {"GAPFORGE_ABBREVIATIONS_DIR", "abbreviations_dir"},
  };
  for (const auto& [var, key] : kVars)
    if (auto v = env(var)) apply_setting(cfg, key, *v);
  if (auto v = env("GAPFORGE_FAKE_NOW")) cfg.generated_at = *v;
}

// Translation and embedding reuse the chat endpoint credentials unless set.
inline void fill_provider_defaults(PipelineConfig& cfg) {
  if (cfg.translate.base_url.empty()) cfg.translate.base_url = cfg.llm.base_url;
  if (cfg.translate.api_key.empty()) cfg.translate.api_key = cfg.llm.api_key;
  if (cfg.translate.model.empty()) cfg.translate.model = cfg.llm.model;
  cfg.translate.temperature = cfg.llm.temperature;
  if (cfg.embedding.base_url.empty()) cfg.embedding.base_url = cfg.llm.base_url;
  if (cfg.embedding.api_key.empty()) cfg.embedding.api_key = cfg.llm.api_key;
}

}  // namespace gapforge
