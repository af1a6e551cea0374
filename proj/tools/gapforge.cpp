#include <csignal>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gapforge/gapforge.hpp"

#ifndef GAPFORGE_DATA_DIR
#define GAPFORGE_DATA_DIR "."
#endif

namespace {

using namespace gapforge;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitProvider = 3;
constexpr int kExitSchemaIo = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfigError:
      return kExitUsage;
    case ErrorCode::kProviderError:
    case ErrorCode::kNetworkError:
    case ErrorCode::kFormatError:
      return kExitProvider;
    case ErrorCode::kSchemaError:
    case ErrorCode::kIoError:
    case ErrorCode::kBindError:
      return kExitSchemaIo;
    default:
      return kExitFailure;
  }
}

void warn(const std::string& msg) { std::cerr << "gapforge: warning: " << msg << '\n'; }

std::filesystem::path data_path(const std::filesystem::path& configured, const char* fallback) {
  if (!configured.empty()) return configured;
  return std::filesystem::path(GAPFORGE_DATA_DIR) / fallback;
}

struct BuildFlags {
  std::string topic;
  std::string langs;
  std::string config_file;
  std::string source_lang;
  std::string cache_dir;
  std::string output_dir;
  std::string fixtures_dir;
  std::string prompts_dir;
  std::string audit_log;
  bool mock = false;
  int cap = -1;
  int k = -1;
};

int cmd_build(const BuildFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_file.empty()) apply_config_file(cfg, flags.config_file);
  apply_env(cfg);
  if (!flags.langs.empty()) cfg.target_langs = parse_language_list(flags.langs);
  if (!flags.source_lang.empty()) cfg.source_lang = flags.source_lang;
  if (!flags.cache_dir.empty()) cfg.cache_dir = flags.cache_dir;
  if (!flags.output_dir.empty()) cfg.output_dir = flags.output_dir;
  if (!flags.fixtures_dir.empty()) cfg.fixtures_dir = flags.fixtures_dir;
  if (!flags.prompts_dir.empty()) cfg.prompts_dir = flags.prompts_dir;
  if (!flags.audit_log.empty()) cfg.audit_log = flags.audit_log;
  if (flags.mock) cfg.mock_mode = true;
  if (flags.cap >= 0) cfg.cap = flags.cap;
  if (flags.k >= 0) cfg.k = flags.k;
  cfg.prompts_dir = data_path(cfg.prompts_dir, "prompts");
  cfg.abbreviations_dir = data_path(cfg.abbreviations_dir, "data/abbreviations");
  if (cfg.mock_mode) cfg.fixtures_dir = data_path(cfg.fixtures_dir, "fixtures/wiki");
  fill_provider_defaults(cfg);
  cfg.validate();

  Runtime runtime(cfg);
  const auto result = build_topic(flags.topic, cfg, runtime.services(), warn);

  for (const auto& r : result.languages) {
    if (r.skipped) {
      std::cout << r.language_code << ": skipped (no interlanguage link)\n";
      continue;
    }
    std::cout << r.language_code << ": " << r.gap_count << " gaps of " << r.fact_count
              << " facts, " << r.selected_count << " selected\n";
  }
  std::cout << "wrote " << result.path.string() << " (" << result.dataset.fact_count()
            << " facts)\n";
  return kExitOk;
}

DatasetServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& dir, const std::string& host, int port) {
  auto catalog = DatasetCatalog::load(dir, warn);
  DatasetServer server(std::move(catalog));
  const int bound = server.bind(host, port);
  std::cout << "serving " << server.catalog().size() << " dataset(s) on http://" << host << ":"
            << bound << std::endl;
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

int cmd_inspect(const std::string& file) {
  const auto ds = read_dataset(file);
  std::cout << "topic:            " << ds.topic << "\n"
            << "english revision: " << ds.english_revision << "\n"
            << "generated at:     " << ds.generated_at << "\n"
            << "cap:              " << ds.cap() << "\n\n";
  std::cout << std::left << std::setw(10) << "language" << std::setw(8) << "shown"
            << std::setw(8) << "gaps" << "sections (index:count)\n";
  std::ostringstream summary;
  std::size_t total = 0;
  bool first = true;
  for (const auto& group : ds.facts) {
    std::map<int, int> sections;
    for (const auto& f : group.facts) ++sections[f.section_index];
    std::string dist;
    for (const auto& [s, n] : sections) dist += (dist.empty() ? "" : " ") + std::to_string(s) + ":" + std::to_string(n);
    const auto gaps = ds.provenance.find("gaps." + group.language_code);
    std::cout << std::setw(10) << group.language_code << std::setw(8) << group.facts.size()
              << std::setw(8) << (gaps == ds.provenance.end() ? "-" : gaps->second)
              << (dist.empty() ? "-" : dist) << "\n";
    if (!first) summary << " / ";
    first = false;
    summary << group.language_code << " " << group.facts.size();
    total += group.facts.size();
  }
  std::cout << std::setw(10) << "total" << total << "\n\n"
            << (summary.str().empty() ? std::string("(no languages)") : summary.str()) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapforge: cross-lingual knowledge gap datasets for Wikipedia articles"};
  app.require_subcommand(1);

  BuildFlags build;
  auto* build_cmd = app.add_subcommand("build", "Run the pipeline for one English topic");
  build_cmd->add_option("--topic", build.topic, "English article title")->required();
  build_cmd->add_option("--langs", build.langs, "Comma-separated target languages (default fr,ru,zh)");
  build_cmd->add_flag("--mock", build.mock, "Deterministic offline mode (fixture pages, mock providers)");
  build_cmd->add_option("--cap", build.cap, "Facts shown per language (default 10)");
  build_cmd->add_option("--k", build.k, "Neighbors retrieved per fact (default 3)");
  build_cmd->add_option("--config", build.config_file, "key = value configuration file");
  build_cmd->add_option("--source-lang", build.source_lang, "Source edition (default en)");
  build_cmd->add_option("--cache-dir", build.cache_dir, "Article cache directory");
  build_cmd->add_option("--output-dir", build.output_dir, "Where the dataset file is written");
  build_cmd->add_option("--fixtures", build.fixtures_dir, "Fixture page directory for --mock");
  build_cmd->add_option("--prompts", build.prompts_dir, "Prompt template directory");
  build_cmd->add_option("--audit-log", build.audit_log, "Append raw provider output here (JSON lines)");

  std::string datasets_dir;
  std::string host = "127.0.0.1";
  int port = kDefaultPort;
  auto* serve_cmd = app.add_subcommand("serve", "Serve dataset files over HTTP");
  serve_cmd->add_option("--datasets", datasets_dir, "Directory of dataset files")->required();
  serve_cmd->add_option("--port", port, "Port to listen on");
  serve_cmd->add_option("--host", host, "Address to bind");

  std::string inspect_file;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a dataset file");
  inspect_cmd->add_option("file", inspect_file, "Dataset JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build_cmd) return cmd_build(build);
    if (*serve_cmd) return cmd_serve(datasets_dir, host, port);
    if (*inspect_cmd) return cmd_inspect(inspect_file);
  } catch (const Error& e) {
    std::cerr << "gapforge: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gapforge: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
