#pragma once

#include <map>
#include <string>
#include <vector>

#include "wikimem/article.hpp"
#include "wikimem/error.hpp"
#include "wikimem/time.hpp"
#include "wikimem/wikitext.hpp"

namespace wikimem {

// Article state at one sampling point: the last revision at or before the
// month boundary (monthly mode) or one revision (per-revision mode).
struct Snapshot {
  ArticleRef article;
  YearMonth month;
  std::string period;  // column label: "YYYY-MM" or the revision timestamp
  RevisionRecord rev;
  OutlinkSet outlinks;
};

struct SnapshotSeries {
  ArticleRef article;
  std::vector<Snapshot> snapshots;

  bool empty() const { return snapshots.empty(); }
  std::size_t size() const { return snapshots.size(); }
  MonthSpan span() const {
    if (snapshots.empty()) return {YearMonth{1, 1}, YearMonth{0, 12}};
    return {snapshots.front().month, snapshots.back().month};
  }
  std::vector<std::string> periods() const {
    std::vector<std::string> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s.period);
    return out;
  }
};

namespace detail {

inline void require_ascending(const std::vector<RevisionRecord>& revisions) {
  for (std::size_t i = 1; i < revisions.size(); ++i) {
    if (revisions[i].timestamp < revisions[i - 1].timestamp) {
      throw Error(ErrorKind::Config, "revisions are not in ascending timestamp order");
    }
  }
}

class OutlinkMemo {
 public:
  OutlinkMemo(const ArticleRef& article, const NamespaceTable& namespaces)
      : article_(article), namespaces_(namespaces) {}

  const OutlinkSet& get(const RevisionRecord& rev) {
    auto it = cache_.find(rev.rev_id);
    if (it != cache_.end()) return it->second;
    if (!rev.wikitext) {
      throw Error(ErrorKind::MissingContent,
                  "revision " + std::to_string(rev.rev_id) + " of " + article_.to_string() + " has no content");
    }
    OutlinkSet set = extract_outlinks(*rev.wikitext, article_.lang, namespaces_);
    set.source_rev = rev.rev_id;
    return cache_.emplace(rev.rev_id, std::move(set)).first->second;
  }

 private:
  const ArticleRef& article_;
  const NamespaceTable& namespaces_;
  std::map<std::uint64_t, OutlinkSet> cache_;
};

}  // namespace detail

// Monthly series over `span`; months before the first revision are omitted and
// later months carry the previous revision forward.
inline SnapshotSeries build_series(const std::vector<RevisionRecord>& revisions, const ArticleRef& article,
                                   const MonthSpan& span, const NamespaceTable& namespaces = default_namespaces()) {
  if (span.empty()) throw Error(ErrorKind::Config, "empty month span");
  detail::require_ascending(revisions);
  SnapshotSeries series{article, {}};
  detail::OutlinkMemo memo(article, namespaces);
  std::size_t next = 0;  // revisions[0..next) have timestamp <= end of current month
  for (const YearMonth& month : span.months()) {
    while (next < revisions.size() && revisions[next].timestamp <= month.end()) ++next;
    if (next == 0) continue;
    const RevisionRecord& rev = revisions[next - 1];
    series.snapshots.push_back(Snapshot{article, month, month.to_string(), rev, memo.get(rev)});
  }
  if (series.empty()) {
    throw Error(ErrorKind::NoRevisionInSpan, article.to_string() + " has no revision on or before " +
                                                 span.last.to_string());
  }
  return series;
}

// One snapshot per revision whose month falls inside `span`.
inline SnapshotSeries build_revision_series(const std::vector<RevisionRecord>& revisions, const ArticleRef& article,
                                            const MonthSpan& span,
                                            const NamespaceTable& namespaces = default_namespaces()) {
  if (span.empty()) throw Error(ErrorKind::Config, "empty month span");
  detail::require_ascending(revisions);
  SnapshotSeries series{article, {}};
  detail::OutlinkMemo memo(article, namespaces);
  for (const auto& rev : revisions) {
    const YearMonth month = YearMonth::of(rev.timestamp);
    if (!span.contains(month)) continue;
    series.snapshots.push_back(Snapshot{article, month, format_timestamp(rev.timestamp), rev, memo.get(rev)});
  }
  if (series.empty()) {
    throw Error(ErrorKind::NoRevisionInSpan, article.to_string() + " has no revision inside " +
                                                 span.first.to_string() + ".." + span.last.to_string());
  }
  return series;
}

// Revisions that serve as month-end snapshots over `span` (the only ones whose
// content monthly analysis needs).
inline std::vector<std::uint64_t> month_end_revisions(const std::vector<RevisionRecord>& revisions,
                                                      const MonthSpan& span) {
  std::vector<std::uint64_t> out;
  std::size_t next = 0;
  for (const YearMonth& month : span.months()) {
    while (next < revisions.size() && revisions[next].timestamp <= month.end()) ++next;
    if (next == 0) continue;
    const auto id = revisions[next - 1].rev_id;
    if (out.empty() || out.back() != id) out.push_back(id);
  }
  return out;
}

}  // namespace wikimem
