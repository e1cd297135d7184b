#include <random>

#include <gtest/gtest.h>

#include "support/temp_dir.hpp"
#include "wikimem/revision_cache.hpp"
#include "wikimem/salience.hpp"
#include "wikimem/snapshot.hpp"

namespace fs = std::filesystem;
using namespace wikimem;
using wikimem::testing::TempDir;

namespace {

RevisionRecord rev(std::uint64_t id, std::string_view ts, std::string text) {
  RevisionRecord r;
  r.rev_id = id;
  r.timestamp = parse_timestamp(ts);
  r.size_bytes = text.size();
  r.wikitext = std::move(text);
  return r;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Config;
}

std::string links(int n, int offset = 0) {
  std::string out;
  for (int i = 0; i < n; ++i) out += "[[Link " + std::to_string(offset + i) + "]] ";
  return out;
}

const ArticleRef kSpring = ArticleRef::make("en", "Arab Spring");

}  // namespace

TEST(RevisionCache, RoundTripIsByteExact) {
  TempDir dir;
  RevisionCache cache(dir.path());
  std::vector<RevisionRecord> revs = {
      rev(1, "2011-01-15T08:00:00Z", "الربيع العربي\n[[تونس]]\r\n"),
      rev(2, "2011-02-01T00:00:00Z", std::string("astral \xF0\x9F\x8C\x8D and a NUL \0 byte", 30)),
      rev(3, "2011-03-01T00:00:00Z", ""),
  };
  RevisionRecord bare;
  bare.rev_id = 4;
  bare.timestamp = parse_timestamp("2011-04-01");
  bare.size_bytes = 77;
  revs.push_back(bare);
  cache.put(kSpring, revs, parse_timestamp("2011-01-01"), parse_timestamp("2011-05-01"));
  EXPECT_EQ(cache.get(kSpring), revs);
  const auto meta = cache.read_meta(kSpring);
  EXPECT_EQ(meta.record_count, 4u);
  EXPECT_EQ(format_timestamp(*meta.fetched_until), "2011-05-01T00:00:00Z");
  EXPECT_TRUE(fs::exists(cache.article_dir(kSpring) / "revisions.dat"));
  EXPECT_EQ(cache.article_dir(kSpring).parent_path().filename(), "en");
}

TEST(RevisionCache, AppendsOnlyNewRecordsAndUpgradesContent) {
  TempDir dir;
  RevisionCache cache(dir.path());
  RevisionRecord a = rev(1, "2011-01-01T00:00:00Z", "a");
  RevisionRecord b = rev(2, "2011-02-01T00:00:00Z", "bb");
  RevisionRecord b_bare = b;
  b_bare.wikitext.reset();
  cache.put(kSpring, {a, b_bare});
  cache.put(kSpring, {a, b_bare});
  EXPECT_EQ(cache.read_meta(kSpring).record_count, 2u);
  cache.put(kSpring, {b});
  EXPECT_EQ(cache.read_meta(kSpring).record_count, 3u);
  EXPECT_EQ(cache.get(kSpring), (std::vector<RevisionRecord>{a, b}));
  cache.put(kSpring, {b_bare});
  EXPECT_EQ(cache.get(kSpring), (std::vector<RevisionRecord>{a, b}));
}

TEST(RevisionCache, ColdCacheIsCacheMiss) {
  TempDir dir;
  RevisionCache cache(dir.path());
  EXPECT_EQ(kind_of([&] { cache.get(kSpring); }), ErrorKind::CacheMiss);
  EXPECT_FALSE(cache.contains(kSpring));
}

TEST(RevisionCache, RejectsDescendingInput) {
  TempDir dir;
  RevisionCache cache(dir.path());
  EXPECT_EQ(kind_of([&] { cache.put(kSpring, {rev(2, "2011-02-01", "b"), rev(1, "2011-01-01", "a")}); }),
            ErrorKind::Config);
}

TEST(RevisionCache, TruncatedFileIsCorrupt) {
  TempDir dir;
  RevisionCache cache(dir.path());
  cache.put(kSpring, {rev(1, "2011-01-01", "first"), rev(2, "2011-02-01", "second revision text")});
  const auto dat = cache.article_dir(kSpring) / "revisions.dat";
  const auto size = fs::file_size(dat);
  for (std::uintmax_t cut : {size - 1, size - 10, size - 25}) {
    TempDir copy;
    fs::copy(dir.path(), copy.path(), fs::copy_options::recursive);
    RevisionCache damaged(copy.path());
    fs::resize_file(damaged.article_dir(kSpring) / "revisions.dat", cut);
    EXPECT_EQ(kind_of([&] { damaged.get(kSpring); }), ErrorKind::CorruptRecord) << cut;
  }
}

TEST(RevisionCache, FlippedByteIsCorrupt) {
  TempDir dir;
  RevisionCache cache(dir.path());
  cache.put(kSpring, {rev(1, "2011-01-01", "first"), rev(2, "2011-02-01", "second")});
  const auto dat = cache.article_dir(kSpring) / "revisions.dat";
  std::string bytes = wikimem::testing::read_all(dat);
  bytes[bytes.size() - 2] ^= 0x20;
  std::ofstream(dat, std::ios::binary | std::ios::trunc) << bytes;
  EXPECT_EQ(kind_of([&] { cache.get(kSpring); }), ErrorKind::CorruptRecord);
}

TEST(RevisionCache, RecordCountMismatchIsCorrupt) {
  TempDir dir;
  RevisionCache cache(dir.path());
  cache.put(kSpring, {rev(1, "2011-01-01", "first")});
  const auto dat = cache.article_dir(kSpring) / "revisions.dat";
  const std::string bytes = wikimem::testing::read_all(dat);
  std::ofstream(dat, std::ios::binary | std::ios::app) << bytes;
  EXPECT_EQ(kind_of([&] { cache.get(kSpring); }), ErrorKind::CorruptRecord);
}

TEST(RevisionCache, JsonSideFiles) {
  TempDir dir;
  RevisionCache cache(dir.path());
  EXPECT_FALSE(cache.get_json(kSpring, "langlinks"));
  cache.put_json(kSpring, "langlinks", {{"ar", "الربيع العربي"}});
  EXPECT_EQ((*cache.get_json(kSpring, "langlinks"))["ar"], "الربيع العربي");
}

TEST(BuildSeries, CarriesForward) {
  const std::vector<RevisionRecord> revs = {rev(1, "2011-01-15T00:00:00Z", "[[A]]"),
                                            rev(2, "2011-03-02T00:00:00Z", "[[A]] [[B]]")};
  const auto series = build_series(revs, kSpring, {{2011, 1}, {2011, 4}});
  ASSERT_EQ(series.size(), 4u);
  const std::vector<std::uint64_t> want = {1, 1, 2, 2};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(series.snapshots[i].rev.rev_id, want[i]);
    EXPECT_EQ(series.snapshots[i].month, (YearMonth{2011, static_cast<int>(i) + 1}));
    EXPECT_EQ(series.snapshots[i].outlinks.source_rev, want[i]);
  }
  EXPECT_EQ(series.snapshots[3].outlinks.size(), 2u);
  EXPECT_EQ(series.periods().front(), "2011-01");
}

TEST(BuildSeries, SingleRevisionFillsSpan) {
  const auto series = build_series({rev(9, "2011-05-31T23:59:59Z", "x")}, kSpring, {{2011, 5}, {2011, 9}});
  ASSERT_EQ(series.size(), 5u);
  for (const auto& s : series.snapshots) EXPECT_EQ(s.rev.rev_id, 9u);
}

TEST(BuildSeries, OmitsMonthsBeforeCreationAndUsesBoundary) {
  const auto series =
      build_series({rev(1, "2011-03-01T00:00:00Z", "x"), rev(2, "2011-03-31T23:59:59Z", "y")}, kSpring,
                   {{2011, 1}, {2011, 4}});
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series.snapshots[0].month, (YearMonth{2011, 3}));
  EXPECT_EQ(series.snapshots[0].rev.rev_id, 2u);
}

TEST(BuildSeries, ErrorsForLateArticleAndBadInput) {
  EXPECT_EQ(kind_of([&] { build_series({rev(1, "2012-01-01", "x")}, kSpring, {{2011, 1}, {2011, 12}}); }),
            ErrorKind::NoRevisionInSpan);
  EXPECT_EQ(kind_of([&] { build_series({}, kSpring, {{2011, 1}, {2011, 12}}); }), ErrorKind::NoRevisionInSpan);
  EXPECT_EQ(kind_of([&] { build_series({rev(1, "2011-01-01", "x")}, kSpring, {{2011, 2}, {2011, 1}}); }),
            ErrorKind::Config);
  RevisionRecord bare = rev(1, "2011-01-01", "x");
  bare.wikitext.reset();
  EXPECT_EQ(kind_of([&] { build_series({bare}, kSpring, {{2011, 1}, {2011, 2}}); }), ErrorKind::MissingContent);
}

TEST(BuildSeries, MatchesBruteForceOnRandomHistories) {
  std::mt19937 rng(2011);
  const Timestamp base = parse_timestamp("2010-11-01");
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RevisionRecord> revs;
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<std::int64_t> offsets;
    for (int i = 0; i < n; ++i) offsets.push_back(std::uniform_int_distribution<std::int64_t>(0, 200LL * 86400)(rng));
    std::sort(offsets.begin(), offsets.end());
    for (int i = 0; i < n; ++i) {
      revs.push_back(rev(100 + i, format_timestamp(base + std::chrono::seconds(offsets[i])), links(i)));
    }
    const MonthSpan span{{2011, 1}, {2011, 6}};
    std::vector<std::pair<YearMonth, std::uint64_t>> want;
    for (const auto& m : span.months()) {
      const RevisionRecord* last = nullptr;
      for (const auto& r : revs) {
        if (r.timestamp <= m.end()) last = &r;
      }
      if (last) want.push_back({m, last->rev_id});
    }
    if (want.empty()) {
      EXPECT_THROW(build_series(revs, kSpring, span), Error);
      continue;
    }
    const auto series = build_series(revs, kSpring, span);
    ASSERT_EQ(series.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(series.snapshots[i].month, want[i].first);
      EXPECT_EQ(series.snapshots[i].rev.rev_id, want[i].second);
      if (i > 0) {
        EXPECT_LE(series.snapshots[i - 1].rev.timestamp, series.snapshots[i].rev.timestamp);
      }
    }
  }
}

TEST(BuildSeries, PerRevisionMode) {
  const std::vector<RevisionRecord> revs = {rev(1, "2010-12-31T00:00:00Z", "a"), rev(2, "2011-01-15T10:00:00Z", "b"),
                                            rev(3, "2011-01-20T10:00:00Z", "c")};
  const auto series = build_revision_series(revs, kSpring, {{2011, 1}, {2011, 2}});
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series.snapshots[0].period, "2011-01-15T10:00:00Z");
  EXPECT_EQ(month_end_revisions(revs, {{2010, 12}, {2011, 2}}), (std::vector<std::uint64_t>{1, 3}));
}

TEST(Salience, NineteenByteDecrease) {
  const std::string text = "The protests began in Tunisia in December 2010.";
  const std::vector<RevisionRecord> revs = {rev(1, "2011-01-10", text), rev(2, "2011-02-10", text.substr(0, text.size() - 19))};
  const auto ts = size_series(build_series(revs, kSpring, {{2011, 1}, {2011, 2}}));
  ASSERT_EQ(ts.points.size(), 2u);
  EXPECT_EQ(ts.points[1].value - ts.points[0].value, -19);
  EXPECT_EQ(delta_report(ts, 1), (std::vector<Delta>{{"2011-02", -19}}));
}

TEST(Salience, TwentyThreeLinksAddedThenReverted) {
  const std::vector<RevisionRecord> revs = {rev(1, "2011-01-10", links(5)), rev(2, "2011-02-10", links(28)),
                                            rev(3, "2011-03-10", links(5))};
  const auto ts = outlink_count_series(build_series(revs, kSpring, {{2011, 1}, {2011, 3}}));
  EXPECT_EQ(ts.values(), (std::vector<std::int64_t>{5, 28, 5}));
  EXPECT_EQ(all_deltas(ts), (std::vector<Delta>{{"2011-02", 23}, {"2011-03", -23}}));
}

TEST(Salience, EmptyArticleAndConstantSeries) {
  const std::vector<RevisionRecord> revs = {rev(1, "2011-01-10", "")};
  const auto series = build_series(revs, kSpring, {{2011, 1}, {2011, 4}});
  EXPECT_EQ(outlink_count_series(series).values(), (std::vector<std::int64_t>(4, 0)));
  EXPECT_TRUE(delta_report(size_series(series), 3).empty());
  EXPECT_THROW(delta_report(size_series(series), 0), Error);
}

TEST(Salience, TopDeltaExample) {
  TimeSeries ts{kSpring, Metric::SizeBytes, {{"2011-01", 10}, {"2011-02", 100}, {"2011-03", 90}}};
  EXPECT_EQ(delta_report(ts, 1), (std::vector<Delta>{{"2011-02", 90}}));
  TimeSeries tie{kSpring, Metric::SizeBytes, {{"a", 0}, {"b", 5}, {"c", 0}}};
  EXPECT_EQ(delta_report(tie, 1), (std::vector<Delta>{{"b", 5}}));
}

TEST(Salience, RandomHistoriesMatchOracleAndTelescope) {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RevisionRecord> revs;
    const int n = std::uniform_int_distribution<int>(1, 15)(rng);
    for (int i = 0; i < n; ++i) {
      const int k = std::uniform_int_distribution<int>(0, 12)(rng);
      std::string text = links(k, std::uniform_int_distribution<int>(0, 4)(rng)) +
                         std::string(std::uniform_int_distribution<int>(0, 50)(rng), 'x');
      revs.push_back(rev(i + 1, format_timestamp(YearMonth{2011, 1}.start() + std::chrono::hours(24 * 20 * i)), text));
    }
    const auto series = build_series(revs, kSpring, {{2011, 1}, {2011, 12}});
    const auto sizes = size_series(series);
    const auto counts = outlink_count_series(series);
    ASSERT_EQ(sizes.points.size(), series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      EXPECT_EQ(sizes.points[i].value, static_cast<std::int64_t>(series.snapshots[i].rev.wikitext->size()));
      EXPECT_EQ(counts.points[i].value,
                static_cast<std::int64_t>(extract_outlinks(*series.snapshots[i].rev.wikitext, "en").size()));
      EXPECT_EQ(sizes.points[i].period, series.snapshots[i].period);
    }
    for (const auto* ts : {&sizes, &counts}) {
      std::int64_t sum = 0;
      for (const auto& d : delta_report(*ts, 1000)) sum += d.delta;
      EXPECT_EQ(sum, ts->points.back().value - ts->points.front().value);
      auto brute = all_deltas(*ts);
      std::stable_sort(brute.begin(), brute.end(),
                       [](const Delta& a, const Delta& b) { return std::llabs(a.delta) > std::llabs(b.delta); });
      brute.resize(std::min<std::size_t>(brute.size(), 3));
      EXPECT_EQ(delta_report(*ts, 3), brute);
    }
  }
}

TEST(Salience, SizeFallsBackToReportedSize) {
  RevisionRecord r = rev(1, "2011-01-10", "abc");
  r.size_bytes = 5;
  EXPECT_EQ(revision_size(r), 3u);
  const auto series = build_series({r}, kSpring, {{2011, 1}, {2011, 1}});
  EXPECT_EQ(size_discrepancies(series).size(), 1u);
  r.wikitext.reset();
  EXPECT_EQ(revision_size(r), 5u);
}
