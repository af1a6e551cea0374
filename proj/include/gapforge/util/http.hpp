#pragma once

#include <chrono>
#include <map>
#include <string>
#include <utility>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "gapforge/error.hpp"
#include "gapforge/util/url.hpp"

namespace gapforge {

using HttpHeaders = std::map<std::string, std::string>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Minimal blocking HTTP transport. Implementations throw NetworkError on
// transport failure; non-2xx statuses are returned, not thrown.
class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers = {}) = 0;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::string& content_type, const HttpHeaders& headers = {}) = 0;
};

class HttplibClient final : public HttpClient {
 public:
  explicit HttplibClient(std::chrono::seconds timeout = std::chrono::seconds(60),
                         std::string user_agent = "gapforge/1.0")
      : timeout_(timeout), user_agent_(std::move(user_agent)) {}

  HttpResponse get(const std::string& target, const HttpHeaders& headers = {}) override {
    auto [client, path] = connect(target);
    auto res = client->Get(path, to_httplib(headers));
    return unwrap(res, target);
  }

  HttpResponse post(const std::string& target, const std::string& body,
                    const std::string& content_type, const HttpHeaders& headers = {}) override {
    auto [client, path] = connect(target);
    auto res = client->Post(path, to_httplib(headers), body, content_type);
    return unwrap(res, target);
  }

 private:
  std::pair<std::unique_ptr<httplib::Client>, std::string> connect(const std::string& target) {
    const auto parts = url::parse(target);
    if (!parts) fail(ErrorCode::kNetworkError, "not an absolute URL: " + target);
    auto client = std::make_unique<httplib::Client>(parts->origin());
    client->set_connection_timeout(timeout_);
    client->set_read_timeout(timeout_);
    client->set_write_timeout(timeout_);
    client->set_follow_location(true);
    client->set_default_headers({{"User-Agent", user_agent_}});
    return {std::move(client), parts->path};
  }

  static httplib::Headers to_httplib(const HttpHeaders& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
  }

  static HttpResponse unwrap(const httplib::Result& res, const std::string& target) {
    if (!res) fail(ErrorCode::kNetworkError, target + ": " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

  std::chrono::seconds timeout_;
  std::string user_agent_;
};

// Transport for offline runs; every request fails as a network error.
class OfflineHttpClient final : public HttpClient {
 public:
  HttpResponse get(const std::string& target, const HttpHeaders& = {}) override {
    fail(ErrorCode::kNetworkError, "offline mode, refusing GET " + target);
  }
  HttpResponse post(const std::string& target, const std::string&, const std::string&,
                    const HttpHeaders& = {}) override {
    fail(ErrorCode::kNetworkError, "offline mode, refusing POST " + target);
  }
};

}  // namespace gapforge
