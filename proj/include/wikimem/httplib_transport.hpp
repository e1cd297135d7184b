#pragma once

// HttpTransport over cpp-httplib. Kept apart from wiki_client.hpp so that
// only translation units doing real network I/O pull in httplib and OpenSSL.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#ifndef CPPHTTPLIB_ZLIB_SUPPORT
#define CPPHTTPLIB_ZLIB_SUPPORT
#endif
#include <httplib.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "wikimem/error.hpp"
#include "wikimem/http.hpp"

namespace wikimem {

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds{60}) : timeout_(timeout) {}

  HttpResponse get(const std::string& url, const QueryParams& params, const std::string& user_agent) override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorKind::Config, "endpoint is not an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Params query;
    for (const auto& [key, value] : params) query.emplace(key, value);
    const httplib::Headers headers = {{"User-Agent", user_agent}, {"Accept-Encoding", "gzip"}};

    std::lock_guard lock(mutex_);
    auto& client = client_for(origin);
    auto result = client.Get(path, query, headers);
    if (!result) {
      clients_.erase(origin);
      throw Error(ErrorKind::Transport, "request to " + origin + " failed: " + httplib::to_string(result.error()));
    }
    HttpResponse response;
    response.status = result->status;
    response.body = std::move(result->body);
    if (result->has_header("Retry-After")) {
      try {
        response.retry_after = std::chrono::seconds{std::stoi(result->get_header_value("Retry-After"))};
      } catch (const std::exception&) {
      }
    }
    return response;
  }

 private:
  httplib::Client& client_for(const std::string& origin) {
    auto it = clients_.find(origin);
    if (it == clients_.end()) {
      auto client = std::make_unique<httplib::Client>(origin);
      client->set_connection_timeout(timeout_);
      client->set_read_timeout(timeout_);
      client->set_keep_alive(true);
      client->set_follow_location(true);
      it = clients_.emplace(origin, std::move(client)).first;
    }
    return *it->second;
  }

  std::chrono::seconds timeout_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<httplib::Client>> clients_;
};

}  // namespace wikimem
