#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/corpus/slug.hpp"
#include "gapforge/enrich/enrich.hpp"
#include "gapforge/error.hpp"
#include "gapforge/util/fs.hpp"

namespace gapforge {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kDefaultCap = 10;

// Provenance key holding the per-language cap the dataset was built with.
inline constexpr std::string_view kCapKey = "selection.cap";

struct LanguageFacts {
  std::string language_code;
  std::vector<PresentedFact> facts;

  friend bool operator==(const LanguageFacts&, const LanguageFacts&) = default;
};

// Everything shown for one English article. `facts` is ordered like
// `languages`; both list the same codes.
struct TopicDataset {
  int schema_version = kSchemaVersion;
  std::string topic;
  std::string english_revision;
  std::string generated_at;
  std::vector<std::string> languages;
  std::vector<LanguageFacts> facts;
  std::map<std::string, std::string> provenance;

  const std::vector<PresentedFact>* facts_for(std::string_view lang) const {
    for (const auto& l : facts)
      if (l.language_code == lang) return &l.facts;
    return nullptr;
  }

  std::size_t fact_count() const {
    std::size_t n = 0;
    for (const auto& l : facts) n += l.facts.size();
    return n;
  }

  int cap() const {
    const auto it = provenance.find(std::string(kCapKey));
    if (it == provenance.end()) return kDefaultCap;
    try {
      return std::stoi(it->second);
    } catch (const std::exception&) {
      fail(ErrorCode::kSchemaError, "provenance selection.cap is not an integer");
    }
  }

  friend bool operator==(const TopicDataset&, const TopicDataset&) = default;
};

// Output of one language's enrichment run.
struct LanguageOutput {
  std::string language_code;
  std::string topic;
  std::string english_revision;
  std::vector<PresentedFact> facts;
};

struct DatasetMetadata {
  std::string generated_at;
  std::map<std::string, std::string> provenance;
  // Language order of the dataset; languages not listed sort after, by code.
  std::vector<std::string> language_order{"fr", "ru", "zh"};
};

inline std::string validate_dataset(const TopicDataset& ds);

inline TopicDataset merge_language_outputs(std::string topic, std::string english_revision,
                                           std::vector<LanguageOutput> outputs,
                                           const DatasetMetadata& meta) {
  TopicDataset ds;
  ds.topic = std::move(topic);
  ds.english_revision = std::move(english_revision);
  ds.generated_at = meta.generated_at;
  ds.provenance = meta.provenance;

  auto rank = [&](const std::string& lang) {
    const auto it = std::find(meta.language_order.begin(), meta.language_order.end(), lang);
    return std::make_pair(static_cast<std::size_t>(it - meta.language_order.begin()), lang);
  };
  std::stable_sort(outputs.begin(), outputs.end(), [&](const auto& a, const auto& b) {
    return rank(a.language_code) < rank(b.language_code);
  });

  std::set<std::string> ids;
  for (auto& out : outputs) {
    if (out.topic != ds.topic)
      fail(ErrorCode::kTopicMismatch, out.language_code + " output is for '" + out.topic + "'");
    if (out.english_revision != ds.english_revision)
      fail(ErrorCode::kRevisionMismatch, out.language_code + " output was built against English revision " +
                                             out.english_revision + ", expected " + ds.english_revision);
    if (ds.facts_for(out.language_code))
      fail(ErrorCode::kInvalidArgument, "language " + out.language_code + " given twice");
    for (const auto& f : out.facts)
      if (!ids.insert(f.id).second) fail(ErrorCode::kDuplicateFactId, f.id);
    ds.languages.push_back(out.language_code);
    ds.facts.push_back({out.language_code, std::move(out.facts)});
  }
  if (const auto why = validate_dataset(ds); !why.empty()) fail(ErrorCode::kSchemaError, why);
  return ds;
}

// Empty when every TopicDataset invariant holds.
inline std::string validate_dataset(const TopicDataset& ds) {
  if (ds.schema_version != kSchemaVersion)
    return "unsupported schema_version " + std::to_string(ds.schema_version);
  if (ds.topic.empty()) return "topic is empty";
  if (ds.languages.size() != ds.facts.size()) return "languages do not match facts keys";
  const int cap = ds.cap();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < ds.facts.size(); ++i) {
    const auto& group = ds.facts[i];
    if (group.language_code != ds.languages[i]) return "languages do not match facts keys";
    if (static_cast<int>(group.facts.size()) > cap)
      return group.language_code + " has " + std::to_string(group.facts.size()) +
             " facts, above the cap of " + std::to_string(cap);
    for (const auto& f : group.facts) {
      if (f.language_code != group.language_code)
        return "fact " + f.id + " is filed under " + group.language_code;
      if (f.id.empty()) return "fact with empty id";
      if (!ids.insert(f.id).second) return "duplicate fact id " + f.id;
      if (f.text_en.empty()) return "fact " + f.id + " has no English text";
      if (f.anchor_sentence_en.empty()) return "fact " + f.id + " has no anchor sentence";
      if (!url::parse(f.source_link_url) || !text_fragment_of(f.source_link_url))
        return "fact " + f.id + " has no text-fragment source link";
    }
  }
  std::set<std::string> langs(ds.languages.begin(), ds.languages.end());
  if (langs.size() != ds.languages.size()) return "duplicate language code";
  return {};
}

inline nlohmann::ordered_json to_json(const PresentedFact& f) {
  return {{"id", f.id},
          {"language_code", f.language_code},
          {"text_en", f.text_en},
          {"text_src", f.text_src},
          {"source_title", f.source_title},
          {"source_link_url", f.source_link_url},
          {"anchor_sentence_en", f.anchor_sentence_en},
          {"anchor_paragraph_index", f.anchor_paragraph_index},
          {"similarity", f.similarity},
          {"section_index", f.section_index}};
}

inline nlohmann::ordered_json to_json(const TopicDataset& ds) {
  nlohmann::ordered_json facts = nlohmann::ordered_json::object();
  for (const auto& group : ds.facts) {
    auto& list = facts[group.language_code] = nlohmann::ordered_json::array();
    for (const auto& f : group.facts) list.push_back(to_json(f));
  }
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
  for (const auto& [k, v] : ds.provenance) provenance[k] = v;
  return {{"schema_version", ds.schema_version},
          {"topic", ds.topic},
          {"english_revision", ds.english_revision},
          {"generated_at", ds.generated_at},
          {"languages", ds.languages},
          {"facts", std::move(facts)},
          {"provenance", std::move(provenance)}};
}

// Canonical file text: fixed field order, two-space indent, trailing newline.
inline std::string serialize_dataset(const TopicDataset& ds) { return to_json(ds).dump(2) + "\n"; }

namespace detail {

template <typename T>
T require(const nlohmann::json& j, std::string_view key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::kSchemaError, "missing field '" + std::string(key) + "'");
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kSchemaError, "field '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace detail

inline TopicDataset dataset_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchemaError, "dataset is not a JSON object");
  TopicDataset ds;
  ds.schema_version = detail::require<int>(j, "schema_version");
  if (ds.schema_version != kSchemaVersion)
    fail(ErrorCode::kSchemaError, "unsupported schema_version " + std::to_string(ds.schema_version));
  ds.topic = detail::require<std::string>(j, "topic");
  ds.english_revision = detail::require<std::string>(j, "english_revision");
  ds.generated_at = detail::require<std::string>(j, "generated_at");
  ds.languages = detail::require<std::vector<std::string>>(j, "languages");
  ds.provenance = detail::require<std::map<std::string, std::string>>(j, "provenance");
  const auto facts = detail::require<nlohmann::json>(j, "facts");
  if (!facts.is_object()) fail(ErrorCode::kSchemaError, "'facts' is not an object");
  if (facts.size() != ds.languages.size())
    fail(ErrorCode::kSchemaError, "languages do not match facts keys");
  for (const auto& lang : ds.languages) {
    if (!facts.contains(lang)) fail(ErrorCode::kSchemaError, "facts has no entry for " + lang);
    const auto& list = facts.at(lang);
    if (!list.is_array()) fail(ErrorCode::kSchemaError, "facts." + lang + " is not a list");
    LanguageFacts group{lang, {}};
    for (const auto& f : list) {
      PresentedFact p;
      p.id = detail::require<std::string>(f, "id");
      p.language_code = detail::require<std::string>(f, "language_code");
      p.text_en = detail::require<std::string>(f, "text_en");
      p.text_src = detail::require<std::string>(f, "text_src");
      p.source_title = detail::require<std::string>(f, "source_title");
      p.source_link_url = detail::require<std::string>(f, "source_link_url");
      p.anchor_sentence_en = detail::require<std::string>(f, "anchor_sentence_en");
      p.anchor_paragraph_index = detail::require<int>(f, "anchor_paragraph_index");
      p.similarity = detail::require<double>(f, "similarity");
      p.section_index = detail::require<int>(f, "section_index");
      group.facts.push_back(std::move(p));
    }
    ds.facts.push_back(std::move(group));
  }
  if (const auto why = validate_dataset(ds); !why.empty()) fail(ErrorCode::kSchemaError, why);
  return ds;
}

inline TopicDataset parse_dataset(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaError, std::string("not valid JSON: ") + e.what());
  }
  return dataset_from_json(j);
}

// "Peking duck" -> "Peking_duck.json"
inline std::string dataset_file_name(std::string_view topic) { return title_slug(topic) + ".json"; }

inline std::filesystem::path write_dataset(const TopicDataset& ds, const std::filesystem::path& dir) {
  if (const auto why = validate_dataset(ds); !why.empty()) fail(ErrorCode::kSchemaError, why);
  const auto path = dir / dataset_file_name(ds.topic);
  detail::write_file_atomic(path, serialize_dataset(ds));
  return path;
}

inline TopicDataset read_dataset(const std::filesystem::path& path) {
  return parse_dataset(detail::read_file(path));
}

}  // namespace gapforge
