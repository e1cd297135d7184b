#pragma once

// Orchestration: fetch into the revision cache, run each construct from the
// cache, write CSV/SVG outputs and the index.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "wikimem/consolidation.hpp"
#include "wikimem/contextualization.hpp"
#include "wikimem/deliberation.hpp"
#include "wikimem/report.hpp"
#include "wikimem/revision_cache.hpp"
#include "wikimem/salience.hpp"
#include "wikimem/snapshot.hpp"
#include "wikimem/wiki_client.hpp"

namespace wikimem {

inline constexpr const char* kUserAgentEnv = "WIKIMEM_USER_AGENT";

struct RunConfig {
  std::string focal_en = "Arab Spring";
  std::string focal_ar = "الربيع العربي";
  Timestamp since = parse_timestamp("2011-01-01");
  Timestamp until = parse_timestamp("2024-03-01");
  std::filesystem::path cache_dir = "wikimem-cache";
  std::filesystem::path out_dir = "wikimem-out";
  SimilarityMetric metric = SimilarityMetric::Jaccard;
  std::optional<int> k;  // nullopt = auto
  ClassifyThresholds thresholds;
  std::optional<std::filesystem::path> ego_config;
  std::optional<std::string> endpoint;  // must contain "{lang}"
  bool per_revision = false;
  bool normalized = false;
  bool fetch = false;
  bool redirect_match = true;
  std::string user_agent;
  double requests_per_second = 1.0;
  std::size_t top_deltas = 10;

  MonthSpan span() const { return {YearMonth::of(since), YearMonth::of(until)}; }

  // Requested (not yet redirect-resolved) focal articles, en first.
  std::vector<ArticleRef> focal() const { return {ArticleRef::make("en", focal_en), ArticleRef::make("ar", focal_ar)}; }

  void validate() const {
    if (normalize_title_text(focal_en).empty() || normalize_title_text(focal_ar).empty()) {
      throw Error(ErrorKind::Config, "focal titles must be non-empty");
    }
    if (until < since) throw Error(ErrorKind::Config, "--since is after --until");
    if (!(thresholds.final_frac > 0.0 && thresholds.final_frac < 1.0)) {
      throw Error(ErrorKind::Config, "--final-frac must be in (0, 1)");
    }
    if (!(thresholds.toggles >= 0.0)) throw Error(ErrorKind::Config, "--toggle-threshold must be >= 0");
    if (k && *k < 2) throw Error(ErrorKind::Config, "--k must be auto or an integer >= 2");
    if (endpoint && endpoint->find("{lang}") == std::string::npos) {
      throw Error(ErrorKind::Config, "--endpoint must contain {lang}, e.g. https://{lang}.wikipedia.org/w/api.php");
    }
    if (requests_per_second <= 0.0) throw Error(ErrorKind::Config, "request rate must be positive");
  }
};

namespace detail {

// Non-blocking exclusive lock: one run per out dir.
class OutDirLock {
 public:
  explicit OutDirLock(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / ".wikimem.lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error(ErrorKind::Config, "cannot open " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorKind::Config, "another run is using " + dir.string());
    }
  }
  ~OutDirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  OutDirLock(const OutDirLock&) = delete;
  OutDirLock& operator=(const OutDirLock&) = delete;

 private:
  int fd_ = -1;
};

inline std::string other_lang(const std::string& lang) { return lang == "en" ? "ar" : "en"; }

}  // namespace detail

class Pipeline {
 public:
  explicit Pipeline(RunConfig config, std::shared_ptr<HttpTransport> transport = nullptr,
                    std::ostream* log = nullptr)
      : config_(std::move(config)), transport_(std::move(transport)), log_(log), cache_(config_.cache_dir) {
    config_.validate();
  }

  const RunConfig& config() const { return config_; }
  RevisionCache& cache() { return cache_; }

  // Only meaningful once a fetch has created the client.
  const ClientDiagnostics* diagnostics() const { return client_ ? &client_->diagnostics() : nullptr; }
  void set_sleeper(WikiClient::Sleeper sleeper) { sleeper_ = std::move(sleeper); }

  // ---- subcommands; each returns its one-line summary ----

  std::string cmd_fetch() {
    return guarded("fetch", [&] {
      online_ = true;
      std::size_t articles = 0, outlinks = 0;
      for (const auto& requested : config_.focal()) {
        const ArticleRef article = focal_article(requested);
        ensure_revisions(article, config_.per_revision);
        ensure_focal_redirects(article);
        ++articles;
      }
      for (const auto& lang : {std::string("en"), std::string("ar")}) {
        const auto series = focal_series(lang);
        outlinks += ensure_context_data(lang, series);
      }
      const EgoConfig ego = ego_config();
      std::size_t related = 0, missing = 0;
      for (const auto& r : ego.related) {
        for (const auto& entry : r.titles) {
          if (const auto article = resolve(entry.second)) {
            ensure_revisions(*article, false);
            ++related;
          } else {
            ++missing;
          }
        }
      }
      const auto* d = diagnostics();
      return "fetch: " + std::to_string(articles) + " focal articles, " + std::to_string(related) +
             " related articles (" + std::to_string(missing) + " missing), " + std::to_string(outlinks) +
             " outlinks with language links; " + std::to_string(d ? d->requests.load() : 0) + " requests";
    });
  }

  std::string cmd_salience() {
    return guarded("salience", [&] {
      online_ = config_.fetch;
      detail::OutDirLock lock(config_.out_dir);
      std::vector<TimeSeries> sizes, counts;
      std::string summary = "salience:";
      for (const auto& lang : {std::string("en"), std::string("ar")}) {
        const SnapshotSeries series = focal_series(lang);
        sizes.push_back(size_series(series));
        counts.push_back(outlink_count_series(series));
        TableData long_form{{"month", "metric", "value"}, {}};
        for (const auto* ts : {&sizes.back(), &counts.back()}) {
          for (const auto& pt : ts->points) {
            long_form.rows.push_back({pt.period, std::string(to_string(ts->metric)), std::to_string(pt.value)});
          }
        }
        write("salience", lang + "_series.csv", render_csv(long_form));
        for (const auto* ts : {&sizes.back(), &counts.back()}) {
          TableData deltas{{"period", "delta"}, {}};
          for (const auto& d : delta_report(*ts, config_.top_deltas)) {
            deltas.rows.push_back({d.period, std::to_string(d.delta)});
          }
          write("salience", lang + "_" + std::string(to_string(ts->metric)) + "_deltas.csv", render_csv(deltas));
        }
        summary += " " + lang + " " + std::to_string(series.size()) + " periods, size " +
                   std::to_string(sizes.back().points.back().value) + " bytes, " +
                   std::to_string(counts.back().points.back().value) + " outlinks;";
      }
      const std::vector<std::string> names = {"en", "ar"};
      write_figure("salience", "size", {FigureKind::Line, "Article size", config_.normalized},
                   line_data(sizes, names, "bytes"));
      write_figure("salience", "outlinks", {FigureKind::Line, "Number of outlinks", config_.normalized},
                   line_data(counts, names, "outlinks"));
      summary.pop_back();
      return summary;
    });
  }

  std::string cmd_deliberate() {
    return guarded("deliberate", [&] {
      online_ = config_.fetch;
      detail::OutDirLock lock(config_.out_dir);
      std::string summary = "deliberation:";
      for (const auto& lang : {std::string("en"), std::string("ar")}) {
        const SnapshotSeries series = focal_series(lang);
        const InclusionMatrix m = build_inclusion_matrix(series);
        const SimilarityMatrix s = pairwise_similarity(m, config_.metric);
        ClusterOptions options;
        options.k = config_.k;
        const ClusterAssignment a = cluster(s, options);
        const auto profiles = cluster_profiles(m, a, config_.thresholds);

        CsvWriter inclusion;
        inclusion.row({"outlink", "month", "included"});
        TableData labels{{"outlink", "cluster"}, {}};
        for (std::size_t r : a.order) {
          for (std::size_t c = 0; c < m.cols(); ++c) inclusion.row({m.outlinks[r], m.periods[c], m.at(r, c) ? "1" : "0"});
          labels.rows.push_back({m.outlinks[r], std::to_string(a.labels[r])});
        }
        write("deliberation", lang + "_inclusion.csv", inclusion.str());
        write("deliberation", lang + "_labels.csv", render_csv(labels));
        write("deliberation", lang + "_similarity.csv", render_csv(similarity_heatmap(s, a)));

        TableData clusters{{"cluster", "classification", "size", "final_frac", "mean_toggles", "peak"}, {}};
        std::string classes;
        for (const auto& p : profiles) {
          clusters.rows.push_back({std::to_string(p.id), std::string(to_string(p.classification)),
                                   std::to_string(p.members.size()), format_number(p.evidence.final_frac),
                                   format_number(p.evidence.mean_toggles), std::to_string(p.evidence.peak)});
          classes += (classes.empty() ? "" : ", ") + std::string(to_string(p.classification));
        }
        write("deliberation", lang + "_clusters.csv", render_csv(clusters));
        if (!a.silhouette_by_k.empty()) {
          TableData sil{{"k", "silhouette"}, {}};
          for (const auto& [k, v] : a.silhouette_by_k) sil.rows.push_back({std::to_string(k), format_number(v)});
          write("deliberation", lang + "_silhouette.csv", render_csv(sil));
        }
        write_figure("deliberation", lang + "_heatmap",
                     {FigureKind::Heatmap, lang + ": outlink inclusion by cluster", false}, inclusion_heatmap(m, a));
        write_figure("deliberation", lang + "_cluster_counts",
                     {FigureKind::Line, lang + ": included outlinks per cluster", config_.normalized},
                     cluster_count_lines(m, profiles));
        summary += " " + lang + " " + std::to_string(m.rows()) + " outlinks, k=" + std::to_string(a.k) + " (" +
                   classes + ");";
      }
      summary.pop_back();
      return summary;
    });
  }

  std::string cmd_contextualize() {
    return guarded("contextualize", [&] {
      online_ = config_.fetch;
      detail::OutDirLock lock(config_.out_dir);
      std::map<std::string, SnapshotSeries> series;
      for (const auto& lang : {std::string("en"), std::string("ar")}) series.emplace(lang, focal_series(lang));
      std::vector<DirectionalIll> dirs;
      std::vector<std::set<std::string>> current;
      for (const auto& lang : {std::string("en"), std::string("ar")}) {
        const std::string other = detail::other_lang(lang);
        const SnapshotSeries& src = series.at(lang);
        ensure_context_data(lang, src);
        const InclusionMatrix m = build_inclusion_matrix(src);
        const auto links = load_langlinks(lang);
        const LangLinkLookup lookup = [&](const std::string& title) -> std::optional<LangLinkMap> {
          const auto it = links.find(title);
          if (it == links.end()) throw Error(ErrorKind::CacheMiss, "no language links cached for " + lang + ":" + title);
          return it->second;
        };
        const std::set<std::string> targets = other_targets(other, series.at(other));
        const std::set<std::string> outlinks(m.outlinks.begin(), m.outlinks.end());
        DirectionalIll d = classify_direction(outlinks, lang, other, lookup, targets);
        const IllSeries ts = temporal_ill_series(m, d.statuses());

        TableData per_outlink{{"outlink", "direction", "status", "mapped_title", "red_link", "current"}, {}};
        const auto& now = src.snapshots.back().outlinks.links;
        for (const auto& [title, c] : d.outlinks) {
          per_outlink.rows.push_back({title, d.name(), std::string(to_string(c.status)), c.mapped_title.value_or(""),
                                      c.red_link ? "1" : "0", now.count(title) ? "1" : "0"});
        }
        write("contextualization", d.name() + "_outlinks.csv", render_csv(per_outlink));
        write_figure("contextualization", d.name() + "_ill",
                     {FigureKind::StackedArea, lang + ": outlinks by language-link status", config_.normalized},
                     ill_stacked(ts));
        current.push_back(now);
        dirs.push_back(std::move(d));
      }
      const IllTable table = ill_table(dirs[0], dirs[1], &current[0], &current[1]);
      write("contextualization", "ill_table.csv", render({FigureKind::Table, "ILL table", false}, ill_table_data(table)));
      std::string summary = "contextualization:";
      for (const auto& c : table.directions) {
        summary += " " + c.source_lang + " " + std::to_string(c.count(IllStatus::NoIll)) + "/" +
                   std::to_string(c.count(IllStatus::IllNotOutlinked)) + "/" +
                   std::to_string(c.count(IllStatus::IllOutlinked)) + " of " + std::to_string(c.total) + ";";
      }
      summary.pop_back();
      return summary;
    });
  }

  std::string cmd_consolidate() {
    return guarded("consolidate", [&] {
      online_ = config_.fetch;
      detail::OutDirLock lock(config_.out_dir);
      const EgoConfig ego = ego_config();
      // Resolve every configured title first: an entry missing from every
      // edition is an error, one missing from a single edition is not.
      std::map<std::string, std::map<std::string, std::optional<ArticleRef>>> resolved;  // lang -> label -> page
      for (const auto& r : ego.related) {
        for (const auto& [lang, ref] : r.titles) resolved[lang][r.label] = resolve(ref);
      }
      std::string summary = "consolidation:";
      for (const auto& lang : {std::string("en"), std::string("ar")}) {
        const ArticleRef focal = focal_article(config_.focal()[lang == "en" ? 0 : 1]);
        std::set<std::string> focal_titles =
            focal_title_set(focal, config_.redirect_match ? load_focal_redirects(focal) : std::vector<std::string>{});
        focal_titles.insert(config_.focal()[lang == "en" ? 0 : 1].title);

        std::set<std::string> found_elsewhere;
        for (const auto& [other, labels] : resolved) {
          if (other == lang) continue;
          for (const auto& [label, page] : labels) {
            if (page) found_elsewhere.insert(label);
          }
        }
        std::map<std::string, SnapshotSeries> series;
        for (const auto& [label, page] : resolved[lang]) {
          if (!page) continue;
          ensure_revisions(*page, false);
          const auto revisions = load_revisions(*page);
          try {
            series.emplace(label, build_series(revisions, *page, config_.span()));
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoRevisionInSpan) throw;
            series.emplace(label, SnapshotSeries{*page, {}});  // created after the span
          }
        }
        const ConsolidationMatrix m = consolidation_matrix(ego, lang, series, focal_titles, config_.span(), found_elsewhere);
        for (const RelatedKind kind : {RelatedKind::Country, RelatedKind::Event}) {
          TimelineBarsData d;
          for (const auto& month : m.months) d.x_labels.push_back(month.to_string());
          for (std::size_t r = 0; r < m.rows(); ++r) {
            if (m.kinds[r] != kind) continue;
            d.row_labels.push_back(m.labels[r]);
            for (std::size_t c = 0; c < m.cols(); ++c) d.cells.push_back(m.at(r, c));
          }
          const std::string name = lang + (kind == RelatedKind::Country ? "_countries" : "_events");
          write_figure("consolidation", name,
                       {FigureKind::TimelineBars,
                        lang + ": " + std::string(to_string(kind)) + " articles linking " + focal.title, false},
                       d);
        }
        std::size_t linking = 0, created = 0;
        for (std::size_t r = 0; r < m.rows() && m.cols() > 0; ++r) {
          created += m.created(r, m.cols() - 1);
          linking += m.included(r, m.cols() - 1);
        }
        summary += " " + lang + " " + std::to_string(linking) + " of " + std::to_string(created) + " related articles link the focal article in " +
                   (m.months.empty() ? std::string("-") : m.months.back().to_string());
        if (!m.not_found.empty()) summary += " (" + std::to_string(m.not_found.size()) + " not found)";
        summary += ";";
      }
      summary.pop_back();
      return summary;
    });
  }

  std::string cmd_report() {
    return guarded("report", [&] {
      detail::OutDirLock lock(config_.out_dir);
      const auto entries = write_index(config_.out_dir);
      return "report: " + std::to_string(entries.size()) + " files indexed in " +
             (config_.out_dir / std::string(kIndexName)).string();
    });
  }

  // Everything: fetch (when allowed), four constructs, index.
  std::vector<std::string> cmd_all() {
    std::vector<std::string> out;
    if (config_.fetch) out.push_back(cmd_fetch());
    out.push_back(cmd_salience());
    out.push_back(cmd_deliberate());
    out.push_back(cmd_contextualize());
    out.push_back(cmd_consolidate());
    out.push_back(cmd_report());
    return out;
  }

  // ---- data access (cache first, network when allowed) ----

  EgoConfig ego_config() const {
    return config_.ego_config ? load_ego_config(*config_.ego_config) : default_ego_config();
  }

  // The redirect-resolved page for a requested title; nullopt if it does not exist.
  std::optional<ArticleRef> resolve(const ArticleRef& requested) {
    if (const auto cached = cache_.get_json(requested, "resolved")) {
      if (cached->is_null()) return std::nullopt;
      return ArticleRef{requested.lang, cached->get<std::string>()};
    }
    require_online("title resolution for " + requested.to_string());
    const auto batch = client().resolve_redirects(requested.lang, {requested.title});
    const auto it = batch.find(requested.title);
    std::optional<ArticleRef> out;
    if (it != batch.end() && it->second) out = ArticleRef{requested.lang, *it->second};
    cache_.put_json(requested, "resolved", out ? nlohmann::json(out->title) : nlohmann::json(nullptr));
    return out;
  }

  ArticleRef focal_article(const ArticleRef& requested) {
    auto page = resolve(requested);
    if (!page) throw Error(ErrorKind::PageMissing, requested.to_string());
    return *page;
  }

  // Revisions up to `until`, hidden ones removed. Earlier ones are kept: the
  // last of them is the state the span opens with.
  std::vector<RevisionRecord> load_revisions(const ArticleRef& article) const {
    const std::set<std::uint64_t> hidden = load_hidden(article);
    std::vector<RevisionRecord> out;
    for (auto& rev : cache_.get(article)) {
      if (rev.timestamp > config_.until || hidden.count(rev.rev_id)) continue;
      out.push_back(std::move(rev));
    }
    return out;
  }

  SnapshotSeries focal_series(const std::string& lang) {
    const ArticleRef article = focal_article(config_.focal()[lang == "en" ? 0 : 1]);
    ensure_revisions(article, config_.per_revision);
    const auto revisions = load_revisions(article);
    return config_.per_revision ? build_revision_series(revisions, article, config_.span())
                                : build_series(revisions, article, config_.span());
  }

  // Makes sure the cache covers [since, until] with content for every
  // revision the analysis reads (all of them when `all_content`).
  void ensure_revisions(const ArticleRef& article, bool all_content) {
    std::vector<std::pair<Timestamp, Timestamp>> gaps;
    std::optional<CacheMeta> meta;
    if (cache_.contains(article)) meta = cache_.read_meta(article);
    if (!meta || !meta->fetched_since || !meta->fetched_until) {
      gaps.emplace_back(config_.since, config_.until);
    } else {
      if (config_.since < *meta->fetched_since) gaps.emplace_back(config_.since, *meta->fetched_since - std::chrono::seconds(1));
      if (config_.until > *meta->fetched_until) gaps.emplace_back(*meta->fetched_until + std::chrono::seconds(1), config_.until);
    }
    std::vector<RevisionRecord> merged;
    if (meta) merged = cache_.get(article);
    if (!gaps.empty()) {
      require_online("revisions of " + article.to_string());
      for (const auto& [from, to] : gaps) {
        auto fetched = client().fetch_revisions(article, from, to, all_content);
        merged.insert(merged.end(), std::make_move_iterator(fetched.begin()), std::make_move_iterator(fetched.end()));
        // The state the span opens with comes from the last earlier revision.
        if (from == config_.since) {
          if (auto anchor = client().fetch_revision_at(article, from - std::chrono::seconds(1))) {
            merged.push_back(std::move(*anchor));
          }
        }
      }
      log("fetched revision list of " + article.to_string());
    }
    std::set<std::uint64_t> hidden = load_hidden(article);
    const std::size_t hidden_before = hidden.size();
    auto in_span = [&](const RevisionRecord& r) { return r.timestamp <= config_.until; };
    auto missing_content = [&] {
      std::vector<RevisionRecord> visible;
      for (const auto& r : merged) {
        if (in_span(r) && !hidden.count(r.rev_id)) visible.push_back(r);
      }
      std::vector<std::uint64_t> ids;
      if (all_content) {
        for (const auto& r : visible) {
          if (!r.wikitext) ids.push_back(r.rev_id);
        }
      } else {
        std::map<std::uint64_t, bool> has;
        for (const auto& r : visible) has[r.rev_id] = has[r.rev_id] || r.wikitext.has_value();
        for (auto id : month_end_revisions(visible, config_.span())) {
          if (!has[id]) ids.push_back(id);
        }
      }
      return ids;
    };
    sort_revisions(merged);
    bool changed = !gaps.empty();
    for (auto ids = missing_content(); !ids.empty(); ids = missing_content()) {
      require_online("revision content of " + article.to_string());
      auto contents = client().fetch_revision_contents(article.lang, ids);
      for (auto id : ids) {
        if (!contents.count(id)) hidden.insert(id);  // deleted or suppressed; the previous revision takes its place
      }
      for (auto& r : merged) {
        auto it = contents.find(r.rev_id);
        if (it != contents.end() && !r.wikitext) r.wikitext = it->second.wikitext;
      }
      changed = true;
      log("fetched " + std::to_string(contents.size()) + " revision texts of " + article.to_string());
    }
    if (hidden.size() != hidden_before) {
      cache_.put_json(article, "hidden", nlohmann::json(std::vector<std::uint64_t>(hidden.begin(), hidden.end())));
    }
    if (changed) cache_.put(article, merged, config_.since, config_.until);
  }

 private:
  template <typename F>
  std::string guarded(std::string_view name, F&& body) {
    try {
      return body();
    } catch (const Error& e) {
      throw e.with_context(name);
    }
  }

  void require_online(const std::string& what) const {
    if (!online_) {
      throw Error(ErrorKind::CacheMiss, what + " is not cached; run `wikimem fetch` first or pass --fetch");
    }
  }

  WikiClient& client() {
    if (!client_) {
      if (!transport_) throw Error(ErrorKind::Config, "network access needs an HTTP transport");
      if (config_.user_agent.empty()) {
        throw Error(ErrorKind::Config, std::string("set ") + kUserAgentEnv +
                                           " to a User-Agent naming the tool and a contact, e.g. \"wikimem/1.0 (you@example.org)\"");
      }
      ClientConfig cc;
      if (config_.endpoint) cc.endpoint_template = *config_.endpoint;
      cc.user_agent = config_.user_agent;
      cc.requests_per_second = config_.requests_per_second;
      client_ = std::make_unique<WikiClient>(cc, transport_);
      if (sleeper_) client_->set_sleeper(sleeper_);
    }
    return *client_;
  }

  void log(const std::string& line) const {
    if (log_) *log_ << line << '\n';
  }

  static void sort_revisions(std::vector<RevisionRecord>& revs) {
    // Content-bearing copies first so dedup keeps them.
    std::stable_sort(revs.begin(), revs.end(), [](const RevisionRecord& a, const RevisionRecord& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      if (a.rev_id != b.rev_id) return a.rev_id < b.rev_id;
      return a.wikitext.has_value() && !b.wikitext.has_value();
    });
    revs.erase(std::unique(revs.begin(), revs.end(),
                           [](const RevisionRecord& a, const RevisionRecord& b) { return a.rev_id == b.rev_id; }),
               revs.end());
  }

  std::set<std::uint64_t> load_hidden(const ArticleRef& article) const {
    std::set<std::uint64_t> out;
    if (const auto j = cache_.get_json(article, "hidden")) {
      for (const auto& id : *j) out.insert(id.get<std::uint64_t>());
    }
    return out;
  }

  void ensure_focal_redirects(const ArticleRef& focal) {
    if (cache_.get_json(focal, "redirects")) return;
    require_online("redirects to " + focal.to_string());
    cache_.put_json(focal, "redirects", client().fetch_redirects_to(focal));
  }

  std::vector<std::string> load_focal_redirects(const ArticleRef& focal) {
    ensure_focal_redirects(focal);
    return cache_.get_json(focal, "redirects")->get<std::vector<std::string>>();
  }

  // Language links for every outlink the series ever had, and redirect
  // targets of the current outlinks (which the other direction matches
  // against). Returns the number of outlinks covered.
  std::size_t ensure_context_data(const std::string& lang, const SnapshotSeries& series) {
    const ArticleRef focal = series.article;
    std::set<std::string> all;
    for (const auto& s : series.snapshots) all.insert(s.outlinks.links.begin(), s.outlinks.links.end());

    nlohmann::json links = cache_.get_json(focal, "langlinks").value_or(nlohmann::json::object());
    std::vector<std::string> missing;
    for (const auto& t : all) {
      if (!links.contains(t)) missing.push_back(t);
    }
    if (!missing.empty()) {
      require_online("language links of " + lang + " outlinks");
      for (auto& [title, map] : client().fetch_langlinks_batch(lang, missing, true)) {
        links[title] = map ? nlohmann::json(map->links) : nlohmann::json(nullptr);
      }
      cache_.put_json(focal, "langlinks", links);
    }

    nlohmann::json targets = cache_.get_json(focal, "outlink_redirects").value_or(nlohmann::json::object());
    std::vector<std::string> unresolved;
    for (const auto& t : series.snapshots.back().outlinks.links) {
      if (!targets.contains(t)) unresolved.push_back(t);
    }
    if (!unresolved.empty()) {
      require_online("redirect targets of " + lang + " outlinks");
      for (auto& [title, target] : client().resolve_redirects(lang, unresolved)) {
        targets[title] = target ? nlohmann::json(*target) : nlohmann::json(nullptr);
      }
      cache_.put_json(focal, "outlink_redirects", targets);
    }
    return all.size();
  }

  std::map<std::string, std::optional<LangLinkMap>> load_langlinks(const std::string& lang) {
    const ArticleRef focal = focal_article(config_.focal()[lang == "en" ? 0 : 1]);
    std::map<std::string, std::optional<LangLinkMap>> out;
    const auto j = cache_.get_json(focal, "langlinks").value_or(nlohmann::json::object());
    for (const auto& [title, v] : j.items()) {
      if (v.is_null()) {
        out.emplace(title, std::nullopt);
      } else {
        out.emplace(title, LangLinkMap{{lang, title}, v.get<std::map<std::string, std::string>>()});
      }
    }
    return out;
  }

  // The other focal article's current outlinks, each also under its redirect target.
  std::set<std::string> other_targets(const std::string& lang, const SnapshotSeries& series) {
    ensure_context_data(lang, series);
    const auto& current = series.snapshots.back().outlinks.links;
    std::set<std::string> out(current.begin(), current.end());
    const auto targets = cache_.get_json(series.article, "outlink_redirects").value_or(nlohmann::json::object());
    for (const auto& t : current) {
      if (targets.contains(t) && targets[t].is_string()) out.insert(targets[t].get<std::string>());
    }
    return out;
  }

  void write(const std::string& construct, const std::string& file, const std::string& bytes) {
    write_output(config_.out_dir / construct / file, bytes);
  }

  void write_figure(const std::string& construct, const std::string& name, const FigureSpec& spec,
                    const FigureData& data) {
    write(construct, name + ".svg", render(spec, data));
    write(construct, name + ".csv", render_csv(data));
  }

  RunConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::ostream* log_;
  RevisionCache cache_;
  std::unique_ptr<WikiClient> client_;
  WikiClient::Sleeper sleeper_;
  bool online_ = false;
};

}  // namespace wikimem
