#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/corpus/segment.hpp"
#include "gapforge/error.hpp"
#include "gapforge/util/http.hpp"
#include "gapforge/util/text.hpp"

namespace gapforge {

enum class LlmTask { kDecompose, kVerify, kTranslate };

inline std::string_view to_string(LlmTask t) {
  switch (t) {
    case LlmTask::kDecompose: return "decompose";
    case LlmTask::kVerify: return "verify";
    case LlmTask::kTranslate: return "translate";
  }
  return "unknown";
}

struct ChatMessage {
  std::string role;
  std::string content;
};

// A rendered chat prompt. Alongside the messages it carries the structured
// task input, which lets deterministic providers answer without parsing the
// prompt text.
struct ChatRequest {
  LlmTask task = LlmTask::kDecompose;
  std::string language_code;
  std::vector<ChatMessage> messages;
  std::string input;                    // paragraph, fact or text to translate
  std::vector<std::string> candidates;  // verification neighbors, in rank order
  int attempt = 1;
};

struct ProviderConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  std::size_t request_budget = 0;  // 0 = unlimited
  std::size_t max_in_flight = 4;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;

  // Returns the assistant's raw text. Throws ProviderError on transport or
  // quota problems.
  virtual std::string complete(const ChatRequest& request) = 0;

  virtual std::string name() const = 0;
  virtual std::string model() const = 0;
  virtual std::size_t max_in_flight() const { return 1; }
};

// JSON-lines record of every raw provider answer, for auditing what a live
// model actually said before post-processing.
class AuditLog {
 public:
  explicit AuditLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
    if (!out_) fail(ErrorCode::kIoError, "cannot open audit log " + path.string());
  }

  void record(const ChatRequest& request, std::string_view model, std::string_view output) {
    nlohmann::ordered_json line{{"task", to_string(request.task)},
                                {"language", request.language_code},
                                {"attempt", request.attempt},
                                {"model", model},
                                {"input", request.input},
                                {"output", output}};
    std::lock_guard lock(mutex_);
    out_ << line.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

// OpenAI-compatible chat-completions endpoint.
class HttpChatProvider final : public LlmProvider {
 public:
  HttpChatProvider(HttpClient& http, ProviderConfig config, AuditLog* audit = nullptr)
      : http_(http), config_(std::move(config)), audit_(audit) {
    if (config_.base_url.empty()) fail(ErrorCode::kConfigError, "LLM base URL is not set");
    if (config_.model.empty()) fail(ErrorCode::kConfigError, "LLM model is not set");
  }

  std::string complete(const ChatRequest& request) override {
    if (config_.request_budget != 0 && used_.fetch_add(1) >= config_.request_budget)
      fail(ErrorCode::kProviderError, "request budget of " +
                                          std::to_string(config_.request_budget) + " exhausted");
    nlohmann::json body{{"model", config_.model}, {"temperature", config_.temperature}};
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
      body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    HttpHeaders headers;
    if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

    HttpResponse res;
    try {
      res = http_.post(endpoint("/chat/completions"), body.dump(), "application/json", headers);
    } catch (const Error& e) {
      fail(ErrorCode::kProviderError, e.detail());
    }
    if (res.status < 200 || res.status >= 300)
      fail(ErrorCode::kProviderError, "chat endpoint returned HTTP " + std::to_string(res.status) +
                                          ": " + res.body.substr(0, 200));
    std::string content;
    try {
      const auto doc = nlohmann::json::parse(res.body);
      content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kProviderError, std::string("unexpected chat response: ") + e.what());
    }
    if (audit_) audit_->record(request, config_.model, content);
    return content;
  }

  std::string name() const override { return "openai-chat"; }
  std::string model() const override { return config_.model; }
  std::size_t max_in_flight() const override { return config_.max_in_flight; }

 private:
  std::string endpoint(std::string_view suffix) const {
    std::string base = config_.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    return base + std::string(suffix);
  }

  HttpClient& http_;
  ProviderConfig config_;
  AuditLog* audit_;
  std::atomic<std::size_t> used_{0};
};

// Deterministic stand-in for a chat model:
//   decompose  -> the paragraph's sentences, one per line
//   verify     -> "yes"/"no" per neighbor, yes iff the casefolded,
//                 punctuation-stripped texts contain one another
//   translate  -> the input prefixed with "[<lang>] "
class MockLlmProvider final : public LlmProvider {
 public:
  MockLlmProvider() = default;
  explicit MockLlmProvider(std::map<std::string, AbbreviationSet> abbreviations)
      : abbreviations_(std::move(abbreviations)) {}

  std::string complete(const ChatRequest& request) override {
    ++calls_;
    switch (request.task) {
      case LlmTask::kDecompose: {
        const auto it = abbreviations_.find(request.language_code);
        static const AbbreviationSet kNone;
        std::string out;
        for (const auto& s : split_sentences(request.input, request.language_code,
                                             it == abbreviations_.end() ? kNone : it->second)) {
          out += text::normalize_whitespace(s.text);
          out += '\n';
        }
        return out;
      }
      case LlmTask::kVerify: {
        std::string out;
        for (const auto& c : request.candidates) out += inferable(request.input, c) ? "yes\n" : "no\n";
        return out;
      }
      case LlmTask::kTranslate:
        return "[" + request.language_code + "] " + request.input;
    }
    return {};
  }

  static bool inferable(std::string_view fact, std::string_view neighbor) {
    const auto a = text::fold_for_matching(fact);
    const auto b = text::fold_for_matching(neighbor);
    if (a.empty() || b.empty()) return false;
    return b.find(a) != std::string::npos || a.find(b) != std::string::npos;
  }

  std::size_t calls() const { return calls_.load(); }
  std::string name() const override { return "mock"; }
  std::string model() const override { return "mock"; }
  std::size_t max_in_flight() const override { return 1; }

 private:
  std::map<std::string, AbbreviationSet> abbreviations_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace gapforge
