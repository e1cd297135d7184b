#pragma once

// In-memory MediaWiki Action API (formatversion=2 subset) behind the
// HttpTransport interface. Small page sizes force continuation.

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wikimem/http.hpp"
#include "wikimem/time.hpp"
#include "wikimem/title.hpp"

namespace wikimem::testing {

struct FakeRevision {
  std::uint64_t id = 0;
  Timestamp timestamp{};
  std::string text;
  bool hidden = false;  // text deleted: metadata listed, content withheld
};

struct FakePage {
  std::uint64_t page_id = 0;
  std::vector<FakeRevision> revisions;  // ascending
  std::map<std::string, std::string> langlinks;
  std::optional<std::string> redirect_to;
};

struct LoggedRequest {
  std::chrono::steady_clock::time_point at;
  std::string url;
  QueryParams params;
  std::string user_agent;

  std::string param(const std::string& key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return v;
    }
    return {};
  }
};

class FakeWiki : public HttpTransport {
 public:
  std::size_t page_size = 3;

  FakePage& page(const std::string& lang, const std::string& title) {
    std::lock_guard lock(mutex_);
    auto& p = pages_[lang][normalize_title_text(title)];
    if (!p.page_id) p.page_id = ++next_page_id_;
    return p;
  }

  std::uint64_t add_revision(const std::string& lang, const std::string& title, Timestamp ts, std::string text,
                             bool hidden = false) {
    auto& p = page(lang, title);
    std::lock_guard lock(mutex_);
    const std::uint64_t id = ++next_rev_id_;
    p.revisions.push_back({id, ts, std::move(text), hidden});
    std::stable_sort(p.revisions.begin(), p.revisions.end(),
                     [](const FakeRevision& a, const FakeRevision& b) { return a.timestamp < b.timestamp; });
    return id;
  }

  std::uint64_t add_revision(const std::string& lang, const std::string& title, std::string_view ts,
                             std::string text, bool hidden = false) {
    return add_revision(lang, title, parse_timestamp(ts), std::move(text), hidden);
  }

  void add_redirect(const std::string& lang, const std::string& from, const std::string& to) {
    page(lang, from).redirect_to = normalize_title_text(to);
  }

  void set_langlinks(const std::string& lang, const std::string& title, std::map<std::string, std::string> links) {
    page(lang, title).langlinks = std::move(links);
  }

  // The next `count` requests fail with `status` (429 or 5xx).
  void fail_next(int count, int status, std::optional<std::chrono::seconds> retry_after = std::nullopt) {
    std::lock_guard lock(mutex_);
    fail_remaining_ = count;
    fail_status_ = status;
    fail_retry_after_ = retry_after;
  }

  // The next `count` requests get a maxlag API error.
  void maxlag_next(int count) {
    std::lock_guard lock(mutex_);
    maxlag_remaining_ = count;
  }

  // Every request after the first `n` successful ones fails with 500.
  void fail_after(std::size_t n) {
    std::lock_guard lock(mutex_);
    fail_after_ = n;
  }

  std::vector<LoggedRequest> log() const {
    std::lock_guard lock(mutex_);
    return log_;
  }
  std::size_t request_count() const {
    std::lock_guard lock(mutex_);
    return log_.size();
  }
  void clear_log() {
    std::lock_guard lock(mutex_);
    log_.clear();
  }

  // All stored revisions of a page, hidden ones included.
  std::vector<FakeRevision> revisions(const std::string& lang, const std::string& title) const {
    std::lock_guard lock(mutex_);
    return pages_.at(lang).at(normalize_title_text(title)).revisions;
  }

  HttpResponse get(const std::string& url, const QueryParams& params, const std::string& user_agent) override {
    std::lock_guard lock(mutex_);
    log_.push_back({std::chrono::steady_clock::now(), url, params, user_agent});
    if (fail_remaining_ > 0) {
      --fail_remaining_;
      return {fail_status_, "{}", fail_retry_after_};
    }
    if (fail_after_ && served_ >= *fail_after_) return {500, "{}", std::nullopt};
    if (maxlag_remaining_ > 0) {
      --maxlag_remaining_;
      return {200, R"({"error":{"code":"maxlag","info":"Waiting for a database server: 6 seconds lagged."}})",
              std::nullopt};
    }
    ++served_;
    std::map<std::string, std::string> p;
    for (const auto& [k, v] : params) p[k] = v;
    return {200, handle(lang_of(url), p).dump(), std::nullopt};
  }

  // Language from ".../{lang}/api.php" or "https://{lang}.host/...".
  static std::string lang_of(const std::string& url) {
    const auto api = url.rfind("/api.php");
    if (api != std::string::npos) {
      const auto slash = url.rfind('/', api - 1);
      const std::string seg = url.substr(slash + 1, api - slash - 1);
      if (seg != "w") return seg;
    }
    const auto scheme = url.find("://");
    const auto start = scheme == std::string::npos ? 0 : scheme + 3;
    return url.substr(start, url.find('.', start) - start);
  }

  nlohmann::json handle(const std::string& lang, std::map<std::string, std::string> p) {
    using nlohmann::json;
    if (p["action"] != "query" || p["formatversion"] != "2") {
      return json{{"error", {{"code", "badparams"}, {"info", "unsupported request"}}}};
    }
    auto& wiki = pages_[lang];
    json out = json::object();
    json query = json::object();
    const std::string prop = p["prop"];

    if (p.count("revids")) {
      std::set<std::uint64_t> wanted;
      for (const auto& id : split(p["revids"])) wanted.insert(std::stoull(id));
      json pages = json::array();
      for (const auto& [title, page] : wiki) {
        json revs = json::array();
        for (const auto& r : page.revisions) {
          if (wanted.count(r.id)) revs.push_back(revision_json(r, true));
        }
        if (!revs.empty()) pages.push_back({{"pageid", page.page_id}, {"ns", 0}, {"title", title}, {"revisions", revs}});
      }
      query["pages"] = pages;
      out["query"] = query;
      return out;
    }

    // Title normalization and redirect resolution.
    std::vector<std::string> titles;
    json normalized = json::array(), redirects = json::array();
    for (const auto& raw : split(p["titles"])) {
      std::string t = normalize_title_text(raw);
      if (t != raw) normalized.push_back({{"from", raw}, {"to", t}});
      if (p.count("redirects")) {
        auto it = wiki.find(t);
        if (it != wiki.end() && it->second.redirect_to) {
          redirects.push_back({{"from", t}, {"to", *it->second.redirect_to}});
          t = *it->second.redirect_to;
        }
      }
      if (std::find(titles.begin(), titles.end(), t) == titles.end()) titles.push_back(t);
    }
    if (!normalized.empty()) query["normalized"] = normalized;
    if (!redirects.empty()) query["redirects"] = redirects;

    json pages = json::array();
    for (const auto& t : titles) {
      auto it = wiki.find(t);
      if (it == wiki.end() || (it->second.revisions.empty() && !it->second.redirect_to)) {
        pages.push_back({{"ns", 0}, {"title", t}, {"missing", true}});
        continue;
      }
      pages.push_back({{"pageid", it->second.page_id}, {"ns", 0}, {"title", t}});
    }

    if (prop == "revisions") {
      const bool content = p["rvprop"].find("content") != std::string::npos;
      auto& page_json = pages[0];
      if (!page_json.value("missing", false)) {
        const auto& page = wiki.at(page_json["title"].get<std::string>());
        const bool older = p["rvdir"] == "older";
        std::optional<Timestamp> lo, hi;
        if (p.count("rvstart")) (older ? hi : lo) = parse_timestamp(p["rvstart"]);
        if (p.count("rvend")) (older ? lo : hi) = parse_timestamp(p["rvend"]);
        std::vector<const FakeRevision*> selected;
        for (const auto& r : page.revisions) {
          if (lo && r.timestamp < *lo) continue;
          if (hi && r.timestamp > *hi) continue;
          selected.push_back(&r);
        }
        if (older) std::reverse(selected.begin(), selected.end());
        const std::size_t limit = p["rvlimit"] == "max" || p["rvlimit"].empty() ? page_size
                                                                                 : std::stoul(p["rvlimit"]);
        std::size_t from = 0;
        if (p.count("rvcontinue")) {
          const std::uint64_t next = std::stoull(p["rvcontinue"]);
          while (from < selected.size() && selected[from]->id != next) ++from;
        }
        json revs = json::array();
        std::size_t i = from;
        for (; i < selected.size() && revs.size() < std::min(limit, page_size); ++i) revs.push_back(revision_json(*selected[i], content));
        page_json["revisions"] = revs;
        if (i < selected.size()) out["continue"] = {{"rvcontinue", std::to_string(selected[i]->id)}, {"continue", "||"}};
      }
    } else if (prop == "langlinks") {
      std::vector<std::pair<std::size_t, json>> flat;  // (page index, link)
      for (std::size_t pi = 0; pi < pages.size(); ++pi) {
        if (pages[pi].value("missing", false)) continue;
        for (const auto& [l, title] : wiki.at(pages[pi]["title"].get<std::string>()).langlinks) {
          flat.push_back({pi, json{{"lang", l}, {"title", title}}});
        }
      }
      const std::size_t from = p.count("llcontinue") ? std::stoull(p["llcontinue"]) : 0;
      std::size_t i = from;
      for (; i < flat.size() && i - from < page_size; ++i) pages[flat[i].first]["langlinks"].push_back(flat[i].second);
      if (i < flat.size()) out["continue"] = {{"llcontinue", std::to_string(i)}, {"continue", "||"}};
    } else if (prop == "redirects") {
      auto& page_json = pages[0];
      if (!page_json.value("missing", false)) {
        std::vector<std::string> sources;
        for (const auto& [title, page] : wiki) {
          if (page.redirect_to && *page.redirect_to == page_json["title"].get<std::string>()) sources.push_back(title);
        }
        const std::size_t from = p.count("rdcontinue") ? std::stoull(p["rdcontinue"]) : 0;
        std::size_t i = from;
        json rds = json::array();
        for (; i < sources.size() && i - from < page_size; ++i) rds.push_back({{"ns", 0}, {"title", sources[i]}});
        if (!rds.empty()) page_json["redirects"] = rds;
        if (i < sources.size()) out["continue"] = {{"rdcontinue", std::to_string(i)}, {"continue", "||"}};
      }
    }
    query["pages"] = pages;
    out["query"] = query;
    if (!out.contains("continue")) out["batchcomplete"] = true;
    return out;
  }

 private:
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    if (s.empty()) return out;
    for (;;) {
      const auto bar = s.find('|', start);
      out.push_back(s.substr(start, bar - start));
      if (bar == std::string::npos) return out;
      start = bar + 1;
    }
  }

  static nlohmann::json revision_json(const FakeRevision& r, bool content) {
    nlohmann::json j = {{"revid", r.id}, {"timestamp", format_timestamp(r.timestamp)}, {"size", r.text.size()}};
    if (content) {
      if (r.hidden) {
        j["texthidden"] = true;
        j["slots"] = {{"main", {{"texthidden", true}}}};
      } else {
        j["slots"] = {{"main", {{"contentmodel", "wikitext"}, {"contentformat", "text/x-wiki"}, {"content", r.text}}}};
      }
    }
    return j;
  }

  mutable std::mutex mutex_;
  std::map<std::string, std::map<std::string, FakePage>> pages_;
  std::uint64_t next_rev_id_ = 1000;
  std::uint64_t next_page_id_ = 0;
  int fail_remaining_ = 0;
  int fail_status_ = 503;
  std::optional<std::chrono::seconds> fail_retry_after_;
  int maxlag_remaining_ = 0;
  std::optional<std::size_t> fail_after_;
  std::size_t served_ = 0;
  std::vector<LoggedRequest> log_;
};

}  // namespace wikimem::testing
