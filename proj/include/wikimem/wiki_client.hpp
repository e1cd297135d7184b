#pragma once

// MediaWiki Action API client: revision histories, language links and
// redirects, with rate limiting, retries and continuation handling.

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimem/article.hpp"
#include "wikimem/error.hpp"
#include "wikimem/http.hpp"
#include "wikimem/time.hpp"

namespace wikimem {

struct ClientConfig {
  // "{lang}" is replaced by the edition code.
  std::string endpoint_template = "https://{lang}.wikipedia.org/w/api.php";
  // Required by Wikimedia API policy; requests are refused without it.
  std::string user_agent;
  double requests_per_second = 1.0;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{1000};
  std::chrono::milliseconds backoff_cap{60000};
  int maxlag_seconds = 5;
  // Titles/revids per multi-value request; the API caps this at 50.
  std::size_t batch_size = 50;
};

struct ClientDiagnostics {
  std::atomic<std::uint64_t> requests{0};
  std::atomic<std::uint64_t> retries{0};
  std::atomic<std::uint64_t> hidden_revisions{0};
};

class WikiClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  WikiClient(ClientConfig config, std::shared_ptr<HttpTransport> transport)
      : config_(std::move(config)),
        transport_(std::move(transport)),
        limiter_(config_.requests_per_second),
        sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    if (config_.user_agent.empty()) {
      throw Error(ErrorKind::Config, "a User-Agent identifying the tool and a contact is required");
    }
    if (!transport_) throw Error(ErrorKind::Config, "no HTTP transport configured");
  }

  // Backoff waits go through this hook; tests replace it to run instantly.
  void set_sleeper(Sleeper sleeper) { sleep_ = std::move(sleeper); }

  const ClientConfig& config() const { return config_; }
  const ClientDiagnostics& diagnostics() const { return diagnostics_; }

  std::string endpoint(const std::string& lang) const {
    std::string url = config_.endpoint_template;
    for (auto pos = url.find("{lang}"); pos != std::string::npos; pos = url.find("{lang}")) {
      url.replace(pos, 6, lang);
    }
    return url;
  }

  // All revisions with since <= timestamp <= until, oldest first.
  std::vector<RevisionRecord> fetch_revisions(const ArticleRef& article, Timestamp since, Timestamp until,
                                              bool with_content) {
    if (until < since) throw Error(ErrorKind::Config, "fetch_revisions: since is after until");
    QueryParams params = {
        {"prop", "revisions"},
        {"titles", article.title},
        {"rvprop", with_content ? "ids|timestamp|size|content" : "ids|timestamp|size"},
        {"rvlimit", "max"},
        {"rvdir", "newer"},
        {"rvstart", format_timestamp(since)},
        {"rvend", format_timestamp(until)},
    };
    if (with_content) params.emplace_back("rvslots", "main");

    std::vector<RevisionRecord> out;
    query_all(article.lang, params, [&](const nlohmann::json& query, bool continuing) {
      const auto& page = single_page(query, article, continuing);
      if (!page.contains("revisions")) return;
      for (const auto& rev : page["revisions"]) {
        auto record = parse_revision(rev, with_content);
        if (!record) continue;
        if (record->timestamp < since || record->timestamp > until) continue;
        if (!out.empty() && record->timestamp < out.back().timestamp) {
          throw Error(ErrorKind::Truncated, "revision order regressed across continuation for " + article.to_string());
        }
        out.push_back(std::move(*record));
      }
    });
    return out;
  }

  // The page as it stood at `at`: its last readable revision on or before
  // that moment, with content. Hidden revisions are skipped.
  std::optional<RevisionRecord> fetch_revision_at(const ArticleRef& article, Timestamp at) {
    const QueryParams params = {
        {"prop", "revisions"},
        {"titles", article.title},
        {"rvprop", "ids|timestamp|size|content"},
        {"rvslots", "main"},
        {"rvlimit", "1"},
        {"rvdir", "older"},
        {"rvstart", format_timestamp(at)},
    };
    std::optional<RevisionRecord> out;
    query_all(
        article.lang, params,
        [&](const nlohmann::json& query, bool continuing) {
          const auto& page = single_page(query, article, continuing);
          if (!page.contains("revisions")) return;
          for (const auto& rev : page["revisions"]) {
            auto record = parse_revision(rev, true);
            if (record && record->timestamp <= at) {
              out = std::move(record);
              return;
            }
          }
        },
        [&] { return out.has_value(); });
    return out;
  }

  // Content for specific revisions; hidden or missing ones are absent from the map.
  std::map<std::uint64_t, RevisionRecord> fetch_revision_contents(const std::string& lang,
                                                                  const std::vector<std::uint64_t>& rev_ids) {
    std::map<std::uint64_t, RevisionRecord> out;
    for (std::size_t start = 0; start < rev_ids.size(); start += config_.batch_size) {
      std::string joined;
      for (std::size_t i = start; i < std::min(rev_ids.size(), start + config_.batch_size); ++i) {
        if (!joined.empty()) joined += '|';
        joined += std::to_string(rev_ids[i]);
      }
      const QueryParams params = {
          {"prop", "revisions"},
          {"revids", joined},
          {"rvprop", "ids|timestamp|size|content"},
          {"rvslots", "main"},
      };
      query_all(lang, params, [&](const nlohmann::json& query, bool) {
        if (!query.contains("pages")) return;
        for (const auto& page : query["pages"]) {
          if (!page.contains("revisions")) continue;
          for (const auto& rev : page["revisions"]) {
            if (auto record = parse_revision(rev, true)) out.emplace(record->rev_id, std::move(*record));
          }
        }
      });
    }
    return out;
  }

  // Current language links of one page (following a redirect when asked).
  LangLinkMap fetch_langlinks(const ArticleRef& article, bool follow_redirects = false) {
    auto batch = fetch_langlinks_batch(article.lang, {article.title}, follow_redirects);
    auto it = batch.find(article.title);
    if (it == batch.end() || !it->second) throw Error(ErrorKind::PageMissing, article.to_string());
    return std::move(*it->second);
  }

  // Language links for many titles of one edition. Keys are the titles as
  // given; missing pages map to nullopt.
  std::map<std::string, std::optional<LangLinkMap>> fetch_langlinks_batch(const std::string& lang,
                                                                          const std::vector<std::string>& titles,
                                                                          bool follow_redirects = true) {
    std::map<std::string, std::optional<LangLinkMap>> out;
    for (std::size_t start = 0; start < titles.size(); start += config_.batch_size) {
      const std::vector<std::string> chunk(titles.begin() + static_cast<std::ptrdiff_t>(start),
                                           titles.begin() + static_cast<std::ptrdiff_t>(
                                                                std::min(titles.size(), start + config_.batch_size)));
      QueryParams params = {{"prop", "langlinks"}, {"titles", join_titles(chunk)}, {"lllimit", "max"}};
      if (follow_redirects) params.emplace_back("redirects", "1");

      std::map<std::string, std::string> resolved;  // input -> final page title
      std::map<std::string, std::optional<std::map<std::string, std::string>>> by_page;
      query_all(lang, params, [&](const nlohmann::json& query, bool) {
        merge_title_mapping(query, chunk, resolved);
        if (!query.contains("pages")) return;
        for (const auto& page : query["pages"]) {
          const std::string title = page.value("title", "");
          if (page.value("missing", false) || page.value("invalid", false)) {
            by_page.emplace(title, std::nullopt);
            continue;
          }
          auto& links = by_page[title];
          if (!links) links.emplace();
          if (!page.contains("langlinks")) continue;
          for (const auto& ll : page["langlinks"]) {
            (*links)[ll.value("lang", "")] = normalize_title_text(ll.value("title", ""));
          }
        }
      });
      for (const auto& title : chunk) {
        const std::string final_title = resolved.count(title) ? resolved[title] : title;
        const auto it = by_page.find(final_title);
        if (it == by_page.end() || !it->second) {
          out[title] = std::nullopt;
          continue;
        }
        LangLinkMap map{ArticleRef{lang, final_title}, *it->second};
        map.links.erase(lang);
        out[title] = std::move(map);
      }
    }
    return out;
  }

  // One API resolution call: normalization plus redirect (the API flattens chains).
  ArticleRef resolve_redirect(const ArticleRef& article) {
    auto batch = resolve_redirects(article.lang, {article.title});
    if (!batch[article.title]) throw Error(ErrorKind::PageMissing, article.to_string());
    return {article.lang, *batch[article.title]};
  }

  std::map<std::string, std::optional<std::string>> resolve_redirects(const std::string& lang,
                                                                      const std::vector<std::string>& titles) {
    std::map<std::string, std::optional<std::string>> out;
    for (std::size_t start = 0; start < titles.size(); start += config_.batch_size) {
      const std::vector<std::string> chunk(titles.begin() + static_cast<std::ptrdiff_t>(start),
                                           titles.begin() + static_cast<std::ptrdiff_t>(
                                                                std::min(titles.size(), start + config_.batch_size)));
      const QueryParams params = {{"titles", join_titles(chunk)}, {"redirects", "1"}};
      std::map<std::string, std::string> resolved;
      std::set<std::string> missing;
      query_all(lang, params, [&](const nlohmann::json& query, bool) {
        merge_title_mapping(query, chunk, resolved);
        if (!query.contains("pages")) return;
        for (const auto& page : query["pages"]) {
          if (page.value("missing", false) || page.value("invalid", false)) missing.insert(page.value("title", ""));
        }
      });
      for (const auto& title : chunk) {
        const std::string final_title = resolved.count(title) ? resolved[title] : normalize_title_text(title);
        if (missing.count(final_title)) {
          out[title] = std::nullopt;
        } else {
          out[title] = final_title;
        }
      }
    }
    return out;
  }

  // Titles of pages that redirect to `article`.
  std::vector<std::string> fetch_redirects_to(const ArticleRef& article) {
    const QueryParams params = {
        {"prop", "redirects"}, {"titles", article.title}, {"rdlimit", "max"}, {"rdprop", "title"}};
    std::vector<std::string> out;
    query_all(article.lang, params, [&](const nlohmann::json& query, bool continuing) {
      const auto& page = single_page(query, article, continuing);
      if (!page.contains("redirects")) return;
      for (const auto& rd : page["redirects"]) out.push_back(normalize_title_text(rd.value("title", "")));
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  static std::string join_titles(const std::vector<std::string>& titles) {
    std::string joined;
    for (const auto& t : titles) {
      if (!joined.empty()) joined += '|';
      joined += t;
    }
    return joined;
  }

  // Follows query.normalized then query.redirects for each requested title.
  static void merge_title_mapping(const nlohmann::json& query, const std::vector<std::string>& requested,
                                  std::map<std::string, std::string>& resolved) {
    std::map<std::string, std::string> normalized;
    std::map<std::string, std::string> redirects;
    if (query.contains("normalized")) {
      for (const auto& n : query["normalized"]) normalized[n.value("from", "")] = n.value("to", "");
    }
    if (query.contains("redirects")) {
      for (const auto& r : query["redirects"]) redirects[r.value("from", "")] = r.value("to", "");
    }
    if (normalized.empty() && redirects.empty()) return;
    for (const auto& title : requested) {
      std::string current = resolved.count(title) ? resolved[title] : title;
      if (auto it = normalized.find(current); it != normalized.end()) current = it->second;
      if (auto it = redirects.find(current); it != redirects.end()) current = it->second;
      resolved[title] = current;
    }
  }

  const nlohmann::json& single_page(const nlohmann::json& query, const ArticleRef& article, bool continuing) {
    if (!query.contains("pages") || query["pages"].empty()) {
      throw Error(continuing ? ErrorKind::Truncated : ErrorKind::Transport,
                  "response without pages for " + article.to_string());
    }
    const auto& page = query["pages"][0];
    if (page.value("missing", false) || page.value("invalid", false)) {
      throw Error(continuing ? ErrorKind::Truncated : ErrorKind::PageMissing, article.to_string());
    }
    return page;
  }

  std::optional<RevisionRecord> parse_revision(const nlohmann::json& rev, bool with_content) {
    if (rev.value("texthidden", false) || rev.value("suppressed", false) || !rev.contains("revid") ||
        !rev.contains("timestamp")) {
      ++diagnostics_.hidden_revisions;
      return std::nullopt;
    }
    RevisionRecord record;
    record.rev_id = rev["revid"].get<std::uint64_t>();
    record.timestamp = parse_timestamp(rev["timestamp"].get<std::string>());
    record.size_bytes = rev.value("size", std::uint64_t{0});
    if (with_content) {
      const auto* main = rev.contains("slots") && rev["slots"].contains("main") ? &rev["slots"]["main"] : nullptr;
      if (!main || main->value("texthidden", false) || main->value("missing", false) || !main->contains("content")) {
        ++diagnostics_.hidden_revisions;
        return std::nullopt;
      }
      record.wikitext = (*main)["content"].get<std::string>();
    }
    return record;
  }

  // Runs one query with its continuation chain, handing each page's "query"
  // object to `on_query`. Failures after the first response become Truncated.
  void query_all(const std::string& lang, QueryParams params,
                 const std::function<void(const nlohmann::json&, bool)>& on_query,
                 const std::function<bool()>& done = nullptr) {
    params.emplace_back("action", "query");
    params.emplace_back("format", "json");
    params.emplace_back("formatversion", "2");
    params.emplace_back("maxlag", std::to_string(config_.maxlag_seconds));
    std::map<std::string, std::string> continuation;
    bool continuing = false;
    for (;;) {
      QueryParams request = params;
      for (const auto& [key, value] : continuation) request.emplace_back(key, value);
      nlohmann::json response;
      try {
        response = perform(lang, request);
      } catch (const Error& e) {
        if (!continuing) throw;
        throw Error(ErrorKind::Truncated, std::string("continuation failed: ") + e.what());
      }
      if (response.contains("error")) {
        const std::string code = response["error"].value("code", "unknown");
        const std::string info = response["error"].value("info", "");
        throw Error(continuing ? ErrorKind::Truncated : ErrorKind::Transport, "API error " + code + ": " + info);
      }
      if (response.contains("query")) {
        on_query(response["query"], continuing);
      } else if (continuing) {
        throw Error(ErrorKind::Truncated, "continuation response without query");
      }
      if (!response.contains("continue") || (done && done())) return;
      continuation.clear();
      for (const auto& [key, value] : response["continue"].items()) {
        continuation[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
      continuing = true;
    }
  }

  // One API call with rate limiting and exponential backoff on 429, 5xx and maxlag.
  nlohmann::json perform(const std::string& lang, const QueryParams& params) {
    const std::string url = endpoint(lang);
    std::string last_failure;
    bool throttled = false;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        ++diagnostics_.retries;
        sleep_(backoff(attempt));
      }
      limiter_.acquire();
      ++diagnostics_.requests;
      HttpResponse response;
      try {
        response = transport_->get(url, params, config_.user_agent);
      } catch (const Error& e) {
        last_failure = e.what();
        throttled = false;
        continue;
      }
      if (response.status == 429 || response.status >= 500) {
        last_failure = "HTTP " + std::to_string(response.status);
        throttled = response.status == 429;
        if (response.retry_after) sleep_(std::chrono::duration_cast<std::chrono::milliseconds>(*response.retry_after));
        continue;
      }
      if (response.status != 200) {
        throw Error(ErrorKind::Transport, "HTTP " + std::to_string(response.status) + " from " + url);
      }
      auto json = nlohmann::json::parse(response.body, nullptr, false);
      if (json.is_discarded()) throw Error(ErrorKind::Transport, "malformed JSON from " + url);
      if (json.contains("error")) {
        const std::string code = json["error"].value("code", "");
        if (code == "maxlag" || code == "ratelimited") {
          last_failure = "API " + code;
          throttled = true;
          continue;
        }
      }
      return json;
    }
    throw Error(throttled ? ErrorKind::RateLimited : ErrorKind::Transport,
                "retry budget exhausted for " + url + " (" + last_failure + ")");
  }

  std::chrono::milliseconds backoff(int attempt) const {
    const std::chrono::milliseconds delay = config_.backoff_base * (1LL << std::min(attempt - 1, 20));
    return std::min(delay, config_.backoff_cap);
  }

  ClientConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  RateLimiter limiter_;
  Sleeper sleep_;
  ClientDiagnostics diagnostics_;
};

}  // namespace wikimem
