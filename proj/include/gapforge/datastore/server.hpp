#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/datastore/dataset.hpp"
#include "gapforge/error.hpp"
#include "gapforge/util/http.hpp"

namespace gapforge {

inline constexpr int kDefaultPort = 8571;

// Immutable snapshot of a datasets directory. Files are validated at load
// time; invalid ones are reported through `warn` and skipped. Bodies are kept
// byte-for-byte as they are on disk.
class DatasetCatalog {
 public:
  template <typename Warn>
  static DatasetCatalog load(const std::filesystem::path& dir, Warn warn) {
    DatasetCatalog catalog;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
      fail(ErrorCode::kIoError, "datasets directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      try {
        auto body = detail::read_file(file);
        auto ds = parse_dataset(body);
        const auto key = normalize_topic(ds.topic);
        if (catalog.entries_.count(key)) {
          warn(file.string() + ": duplicate topic '" + ds.topic + "', skipped");
          continue;
        }
        catalog.entries_.emplace(key, Entry{ds.topic, std::move(body)});
      } catch (const Error& e) {
        warn(file.string() + ": " + e.what() + ", skipped");
      }
    }
    return catalog;
  }

  static DatasetCatalog load(const std::filesystem::path& dir) {
    return load(dir, [](const std::string& msg) { std::cerr << "gapforge: " << msg << '\n'; });
  }

  // Underscores and spaces are interchangeable, as in wiki URLs; a trailing
  // ".json" is ignored.
  static std::string normalize_topic(std::string_view title) {
    std::string t(title);
    if (t.size() > 5 && t.compare(t.size() - 5, 5, ".json") == 0) t.resize(t.size() - 5);
    for (char& c : t)
      if (c == '_') c = ' ';
    return t;
  }

  std::vector<std::string> topics() const {
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_) out.push_back(e.topic);
    return out;
  }

  const std::string* body(std::string_view title) const {
    const auto it = entries_.find(normalize_topic(title));
    return it == entries_.end() ? nullptr : &it->second.body;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string topic;
    std::string body;
  };
  std::map<std::string, Entry> entries_;
};

// Read-only HTTP front for a DatasetCatalog:
//   GET /api/topics            -> JSON list of topic titles
//   GET /api/datasets/{title}  -> the dataset file, or 404
// Every response allows any origin so the browser extension can fetch it.
class DatasetServer {
 public:
  explicit DatasetServer(DatasetCatalog catalog) : catalog_(std::move(catalog)) {
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // server share a busy port instead of failing to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                 {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    server_.Get("/api/topics", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(nlohmann::json(catalog_.topics()).dump(), "application/json");
    });
    server_.Get(R"(/api/datasets/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto* body = catalog_.body(req.matches[1].str());
      if (!body) {
        res.status = 404;
        res.set_content(R"({"error":"unknown topic"})", "application/json");
        return;
      }
      res.set_content(*body, "application/json");
    });
    server_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
  }

  ~DatasetServer() { stop(); }
  DatasetServer(const DatasetServer&) = delete;
  DatasetServer& operator=(const DatasetServer&) = delete;

  // Binds and returns the bound port (useful with port 0). Throws BindError.
  int bind(const std::string& host, int port) {
    if (port < 0 || port > 65535) fail(ErrorCode::kBindError, "invalid port " + std::to_string(port));
    int bound = port;
    if (port == 0) {
      bound = server_.bind_to_any_port(host);
    } else if (!server_.bind_to_port(host, port)) {
      bound = -1;
    }
    if (bound <= 0) fail(ErrorCode::kBindError, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
  }

  // Blocks until stop().
  void listen() { server_.listen_after_bind(); }

  int start_background(const std::string& host = "127.0.0.1", int port = 0) {
    const int bound = bind(host, port);
    thread_ = std::thread([this] { listen(); });
    server_.wait_until_ready();
    return bound;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  const DatasetCatalog& catalog() const { return catalog_; }

 private:
  DatasetCatalog catalog_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace gapforge
