#pragma once

// Salience: article size and outlink count through time.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "wikimem/snapshot.hpp"

namespace wikimem {

enum class Metric { SizeBytes, OutlinkCount };

inline std::string_view to_string(Metric metric) {
  return metric == Metric::SizeBytes ? "size_bytes" : "outlink_count";
}

struct TimePoint {
  std::string period;
  std::int64_t value = 0;

  bool operator==(const TimePoint&) const = default;
};

struct TimeSeries {
  ArticleRef article;
  Metric metric = Metric::SizeBytes;
  std::vector<TimePoint> points;

  std::vector<std::int64_t> values() const {
    std::vector<std::int64_t> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
  }
};

struct SizeDiscrepancy {
  std::uint64_t rev_id = 0;
  std::uint64_t reported = 0;
  std::uint64_t measured = 0;
};

// Byte length of the content when present, otherwise the API's size field.
inline std::uint64_t revision_size(const RevisionRecord& rev) {
  return rev.wikitext ? rev.wikitext->size() : rev.size_bytes;
}

// Revisions whose API size disagrees with the fetched content length.
inline std::vector<SizeDiscrepancy> size_discrepancies(const SnapshotSeries& series) {
  std::vector<SizeDiscrepancy> out;
  std::uint64_t last = 0;
  for (const auto& s : series.snapshots) {
    if (!s.rev.wikitext || s.rev.rev_id == last) continue;
    last = s.rev.rev_id;
    if (s.rev.wikitext->size() != s.rev.size_bytes) {
      out.push_back({s.rev.rev_id, s.rev.size_bytes, s.rev.wikitext->size()});
    }
  }
  return out;
}

inline TimeSeries size_series(const SnapshotSeries& series) {
  TimeSeries ts{series.article, Metric::SizeBytes, {}};
  ts.points.reserve(series.size());
  for (const auto& s : series.snapshots) {
    ts.points.push_back({s.period, static_cast<std::int64_t>(revision_size(s.rev))});
  }
  return ts;
}

inline TimeSeries outlink_count_series(const SnapshotSeries& series) {
  TimeSeries ts{series.article, Metric::OutlinkCount, {}};
  ts.points.reserve(series.size());
  for (const auto& s : series.snapshots) {
    ts.points.push_back({s.period, static_cast<std::int64_t>(s.outlinks.size())});
  }
  return ts;
}

struct Delta {
  std::string period;  // the later period of the pair
  std::int64_t delta = 0;

  bool operator==(const Delta&) const = default;
};

// Every non-zero period-over-period change, in chronological order.
inline std::vector<Delta> all_deltas(const TimeSeries& ts) {
  std::vector<Delta> out;
  for (std::size_t i = 1; i < ts.points.size(); ++i) {
    const std::int64_t d = ts.points[i].value - ts.points[i - 1].value;
    if (d != 0) out.push_back({ts.points[i].period, d});
  }
  return out;
}

// The top_k largest |deltas|; ties go to the earlier period.
inline std::vector<Delta> delta_report(const TimeSeries& ts, std::size_t top_k) {
  if (top_k == 0) throw Error(ErrorKind::Config, "delta_report needs top_k >= 1");
  std::vector<Delta> deltas = all_deltas(ts);
  // all_deltas is chronological, so a stable sort keeps earlier periods first among ties.
  std::stable_sort(deltas.begin(), deltas.end(),
                   [](const Delta& a, const Delta& b) { return std::llabs(a.delta) > std::llabs(b.delta); });
  if (deltas.size() > top_k) deltas.resize(top_k);
  return deltas;
}

}  // namespace wikimem
