#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "gapforge/gapforge.hpp"

namespace gftest {

namespace fs = std::filesystem;

inline fs::path data_dir() { return GAPFORGE_DATA_DIR; }
inline fs::path fixtures() { return data_dir() / "fixtures"; }
inline fs::path golden_dir() { return data_dir() / "tests" / "golden"; }
inline const char* kFakeNow = "2026-01-01T00:00:00Z";

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("gapforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) { return gapforge::detail::read_file(p); }

inline void spit(const fs::path& p, std::string_view body) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
}

inline gapforge::PipelineConfig mock_config(const fs::path& work) {
  gapforge::PipelineConfig cfg;
  cfg.mock_mode = true;
  cfg.cache_dir = work / "cache";
  cfg.output_dir = work / "out";
  cfg.fixtures_dir = fixtures() / "wiki";
  cfg.prompts_dir = data_dir() / "prompts";
  cfg.abbreviations_dir = data_dir() / "data" / "abbreviations";
  cfg.generated_at = kFakeNow;
  gapforge::fill_provider_defaults(cfg);
  return cfg;
}

inline gapforge::BuildResult mock_build(const std::string& topic, const fs::path& work,
                                        std::vector<std::string> langs = {"fr", "ru", "zh"}) {
  auto cfg = mock_config(work);
  cfg.target_langs = std::move(langs);
  gapforge::Runtime runtime(cfg);
  return gapforge::build_topic(topic, cfg, runtime.services());
}

inline std::map<std::string, gapforge::AbbreviationSet> shipped_abbreviations() {
  std::map<std::string, gapforge::AbbreviationSet> out;
  for (const char* lang : {"en", "fr", "ru", "zh"})
    out[lang] = gapforge::AbbreviationSet::for_language(data_dir() / "data" / "abbreviations", lang);
  return out;
}

// Provider that replays canned outputs in order and records every request.
class ScriptedProvider final : public gapforge::LlmProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const gapforge::ChatRequest& request) override {
    std::lock_guard lock(mu_);
    requests.push_back(request);
    if (next_ >= replies_.size()) return replies_.empty() ? std::string() : replies_.back();
    return replies_[next_++];
  }
  std::string name() const override { return "scripted"; }
  std::string model() const override { return "scripted"; }

  std::vector<gapforge::ChatRequest> requests;

 private:
  std::mutex mu_;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

// Result of running the CLI binary.
struct RunResult {
  int exit_code = -1;
  std::string out;
};

inline RunResult run_cli(const std::string& args, const fs::path& work,
                         const std::string& env = std::string("GAPFORGE_FAKE_NOW=") + kFakeNow) {
  const auto log = work / "cli-output.txt";
  const std::string cmd = env + " '" GAPFORGE_CLI_PATH "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::error_code ec;
  if (fs::exists(log, ec)) r.out = slurp(log);
  return r;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t min_len = 2, std::size_t max_len = 9) {
  static constexpr char kLetters[] = "abcdefghijklmnopqrstuvwxyz";
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> letter(0, 25);
  std::string w(len(rng), 'a');
  for (auto& c : w) c = kLetters[letter(rng)];
  return w;
}

// Hamilton apportionment written independently of the library: exact
// quotas as (numerator, denominator) pairs, seats handed out one at a time
// to the best remaining claim.
inline std::map<int, int> hamilton_oracle(const std::map<int, int>& counts, int cap) {
  long long total = 0;
  for (const auto& [s, c] : counts) total += c;
  if (total <= cap) return counts;
  std::map<int, int> seats;
  std::map<int, long long> rem;
  int given = 0;
  for (const auto& [s, c] : counts) {
    seats[s] = static_cast<int>((static_cast<long long>(c) * cap) / total);
    rem[s] = (static_cast<long long>(c) * cap) % total;
    given += seats[s];
  }
  std::set<int> bumped;
  while (given < cap) {
    int best = -1;
    for (const auto& [s, c] : counts) {
      if (bumped.count(s)) continue;
      if (best < 0 || rem[s] > rem[best] || (rem[s] == rem[best] && c > counts.at(best))) best = s;
    }
    bumped.insert(best);
    ++seats[best];
    ++given;
  }
  return seats;
}

inline std::vector<gapforge::EmbeddingVector> random_unit_vectors(std::mt19937_64& rng, std::size_t n,
                                                                  std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<gapforge::EmbeddingVector> out(n);
  for (auto& v : out) {
    v.values.resize(dim);
    for (auto& x : v.values) x = g(rng);
    const double norm = gapforge::l2_norm(v.values);
    for (auto& x : v.values) x /= norm;
  }
  return out;
}

// All-pairs scores, stable-sorted by cosine only: stability gives the
// lower-index-first tie rule without encoding it in the comparator.
inline std::vector<std::vector<gapforge::Neighbor>> brute_force(const std::vector<gapforge::EmbeddingVector>& t,
                                                                const std::vector<gapforge::EmbeddingVector>& s,
                                                                std::size_t k) {
  std::vector<std::vector<gapforge::Neighbor>> out;
  for (const auto& tv : t) {
    std::vector<gapforge::Neighbor> all;
    for (std::size_t i = 0; i < s.size(); ++i) all.push_back({i, gapforge::cosine(tv, s[i])});
    std::stable_sort(all.begin(), all.end(),
                     [](const gapforge::Neighbor& a, const gapforge::Neighbor& b) { return a.cosine > b.cosine; });
    all.resize(std::min(k, all.size()));
    out.push_back(all);
  }
  return out;
}

}  // namespace gftest
