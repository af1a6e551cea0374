#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/error.hpp"
#include "gapforge/util/hash.hpp"
#include "gapforge/util/http.hpp"
#include "gapforge/util/text.hpp"
#include "gapforge/util/utf8.hpp"

namespace gapforge {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

inline double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

// Cosine similarity clamped to [-1, 1]. A zero vector has similarity 0 with
// everything.
inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim())
    fail(ErrorCode::kDimensionMismatch,
         "cosine of " + std::to_string(a.dim()) + "-d and " + std::to_string(b.dim()) + "-d vectors");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

// Sentence encoder. Subclasses supply raw vectors; embed() validates and
// normalizes them and pins the dimension for the provider's lifetime.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    for (std::size_t i = 0; i < texts.size(); ++i)
      if (text::trim(texts[i]).empty())
        fail(ErrorCode::kInvalidArgument, "cannot embed empty text at position " + std::to_string(i));
    auto raw = embed_raw(texts);
    if (raw.size() != texts.size())
      fail(ErrorCode::kProviderError, "embedding provider returned " + std::to_string(raw.size()) +
                                          " vectors for " + std::to_string(texts.size()) + " texts");
    std::vector<EmbeddingVector> out;
    out.reserve(raw.size());
    for (auto& v : raw) {
      check_dim(v.size());
      const double norm = l2_norm(v);
      if (!(norm > 0.0) || !std::isfinite(norm))
        fail(ErrorCode::kProviderError, "embedding provider returned a degenerate vector");
      for (double& x : v) x /= norm;
      out.push_back({std::move(v)});
    }
    return out;
  }

  std::optional<std::size_t> session_dim() const {
    std::lock_guard lock(mutex_);
    return dim_;
  }

  virtual std::string name() const = 0;
  virtual std::string model() const = 0;

 protected:
  virtual std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) = 0;

 private:
  void check_dim(std::size_t d) {
    std::lock_guard lock(mutex_);
    if (d == 0) fail(ErrorCode::kDimensionMismatch, "embedding provider returned an empty vector");
    if (!dim_) dim_ = d;
    if (*dim_ != d)
      fail(ErrorCode::kDimensionMismatch, "embedding dimension changed from " +
                                              std::to_string(*dim_) + " to " + std::to_string(d));
  }

  mutable std::mutex mutex_;
  std::optional<std::size_t> dim_;
};

// Language-blind deterministic encoder: casefolded character 2- and 3-grams
// (with boundary markers) hashed into signed buckets. Good enough to make
// identical and overlapping strings similar, which is what the plumbing
// tests need.
class MockEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(std::size_t dim = 1024, std::uint64_t seed = 0x6761706667ULL)
      : dim_(dim), seed_(seed) {
    if (dim_ == 0) fail(ErrorCode::kInvalidArgument, "mock embedding dimension must be positive");
  }

  std::string name() const override { return "mock-hash-ngram"; }
  std::string model() const override {
    return "ngram2-3/dim" + std::to_string(dim_) + "/seed" + std::to_string(seed_);
  }

  std::vector<double> encode(std::string_view s) const {
    std::vector<char32_t> cps{U'\x02'};
    std::size_t pos = 0;
    const auto folded = text::normalize_whitespace(s);
    while (pos < folded.size()) cps.push_back(utf8::fold_case(utf8::next(folded, pos)));
    cps.push_back(U'\x03');

    std::vector<double> v(dim_, 0.0);
    std::string gram;
    for (std::size_t n = 2; n <= 3; ++n) {
      for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        gram.clear();
        gram.push_back(static_cast<char>('0' + n));
        for (std::size_t k = 0; k < n; ++k) utf8::append(gram, cps[i + k]);
        const std::uint64_t h = mix64(fnv1a64(gram, seed_));
        v[h % dim_] += (h >> 63) != 0 ? -1.0 : 1.0;
      }
    }
    return v;
  }

 protected:
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(encode(t));
    return out;
  }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

struct EmbeddingConfig {
  std::string base_url;
  std::string model;
  std::string api_key;
  std::size_t batch_size = 64;
};

// OpenAI-compatible /embeddings endpoint.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(HttpClient& http, EmbeddingConfig config)
      : http_(http), config_(std::move(config)) {
    if (config_.base_url.empty()) fail(ErrorCode::kConfigError, "embedding base URL is not set");
    if (config_.model.empty()) fail(ErrorCode::kConfigError, "embedding model is not set");
    if (config_.batch_size == 0) config_.batch_size = 1;
  }

  std::string name() const override { return "openai-embeddings"; }
  std::string model() const override { return config_.model; }

 protected:
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
      const std::size_t end = std::min(texts.size(), start + config_.batch_size);
      nlohmann::json body{{"model", config_.model},
                          {"input", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                             texts.begin() + static_cast<std::ptrdiff_t>(end))}};
      HttpHeaders headers;
      if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
      std::string base = config_.base_url;
      while (!base.empty() && base.back() == '/') base.pop_back();
      HttpResponse res;
      try {
        res = http_.post(base + "/embeddings", body.dump(), "application/json", headers);
      } catch (const Error& e) {
        fail(ErrorCode::kProviderError, e.detail());
      }
      if (res.status < 200 || res.status >= 300)
        fail(ErrorCode::kProviderError,
             "embedding endpoint returned HTTP " + std::to_string(res.status));
      try {
        const auto doc = nlohmann::json::parse(res.body);
        std::vector<std::vector<double>> batch(end - start);
        for (const auto& item : doc.at("data")) {
          const auto index = item.value("index", std::size_t{0});
          if (index >= batch.size())
            fail(ErrorCode::kProviderError, "embedding response index out of range");
          batch[index] = item.at("embedding").get<std::vector<double>>();
        }
        for (auto& v : batch) out.push_back(std::move(v));
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::kProviderError, std::string("unexpected embedding response: ") + e.what());
      }
    }
    return out;
  }

 private:
  HttpClient& http_;
  EmbeddingConfig config_;
};

}  // namespace gapforge
