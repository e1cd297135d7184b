#include <gtest/gtest.h>

#include "support/fake_wiki.hpp"
#include "wikimem/wiki_client.hpp"

using namespace wikimem;
using wikimem::testing::FakeWiki;

namespace {

ClientConfig fast_config() {
  ClientConfig config;
  config.endpoint_template = "https://{lang}.wikipedia.test/w/api.php";
  config.user_agent = "wikimem-tests/1.0 (tests@example.org)";
  config.requests_per_second = 0;  // no spacing unless a test asks for it
  config.max_retries = 3;
  return config;
}

struct ClientFixture : ::testing::Test {
  std::shared_ptr<FakeWiki> wiki = std::make_shared<FakeWiki>();
  std::vector<std::chrono::milliseconds> sleeps;

  std::unique_ptr<WikiClient> make_client(ClientConfig config = fast_config()) {
    auto client = std::make_unique<WikiClient>(config, wiki);
    client->set_sleeper([this](std::chrono::milliseconds d) { sleeps.push_back(d); });
    return client;
  }

  const ArticleRef spring = ArticleRef::make("en", "Arab Spring");
};

}  // namespace

TEST_F(ClientFixture, ThreeRecordedRevisionsComeBackInOrder) {
  wiki->add_revision("en", "Arab Spring", "2011-03-01T00:00:00Z", "c");
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "a");
  wiki->add_revision("en", "Arab Spring", "2011-02-01T00:00:00Z", "bb");
  auto client = make_client();
  const auto revs =
      client->fetch_revisions(spring, parse_timestamp("2011-01-01"), parse_timestamp("2024-03-01"), true);
  ASSERT_EQ(revs.size(), 3u);
  EXPECT_EQ(*revs[0].wikitext, "a");
  EXPECT_EQ(*revs[1].wikitext, "bb");
  EXPECT_EQ(revs[1].size_bytes, 2u);
  EXPECT_EQ(*revs[2].wikitext, "c");
  EXPECT_LT(revs[0].timestamp, revs[1].timestamp);
}

TEST_F(ClientFixture, ContinuationMergesPages) {
  Timestamp t = parse_timestamp("2011-01-01");
  for (int i = 0; i < 10; ++i) wiki->add_revision("en", "Arab Spring", t + std::chrono::hours(24 * i), "r" + std::to_string(i));
  auto client = make_client();
  const auto revs = client->fetch_revisions(spring, t, t + std::chrono::hours(24 * 30), false);
  ASSERT_EQ(revs.size(), 10u);
  for (std::size_t i = 0; i < revs.size(); ++i) EXPECT_FALSE(revs[i].wikitext);
  EXPECT_EQ(wiki->request_count(), 4u);  // page size 3
  const auto log = wiki->log();
  EXPECT_EQ(log[0].param("rvdir"), "newer");
  EXPECT_EQ(log[0].param("formatversion"), "2");
  EXPECT_FALSE(log[0].param("maxlag").empty());
  EXPECT_FALSE(log[1].param("rvcontinue").empty());
}

TEST_F(ClientFixture, SplitRangesConcatenateToWholeRange) {
  Timestamp t = parse_timestamp("2011-01-01");
  for (int i = 0; i < 12; ++i) wiki->add_revision("en", "Arab Spring", t + std::chrono::hours(100 * i), "x");
  auto client = make_client();
  const Timestamp mid = t + std::chrono::hours(550);
  const Timestamp end = t + std::chrono::hours(2000);
  auto first = client->fetch_revisions(spring, t, mid, false);
  const auto second = client->fetch_revisions(spring, mid + std::chrono::seconds(1), end, false);
  first.insert(first.end(), second.begin(), second.end());
  EXPECT_EQ(first, client->fetch_revisions(spring, t, end, false));
}

TEST_F(ClientFixture, EmptyRangeGivesEmptyList) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T10:00:00Z", "x");
  auto client = make_client();
  const Timestamp t = parse_timestamp("2011-01-01T09:00:00Z");
  EXPECT_TRUE(client->fetch_revisions(spring, t, t, true).empty());
  EXPECT_THROW(client->fetch_revisions(spring, t, t - std::chrono::seconds(1), true), Error);
}

TEST_F(ClientFixture, MissingPage) {
  auto client = make_client();
  try {
    client->fetch_revisions(ArticleRef::make("en", "No such page"), parse_timestamp("2011-01"),
                           parse_timestamp("2012-01"), false);
    FAIL() << "expected PageMissing";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PageMissing);
  }
  try {
    client->fetch_langlinks(ArticleRef::make("en", "No such page"));
    FAIL() << "expected PageMissing";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PageMissing);
  }
}

TEST_F(ClientFixture, HiddenRevisionsAreSkippedAndCounted) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "a");
  wiki->add_revision("en", "Arab Spring", "2011-01-02T00:00:00Z", "secret", true);
  wiki->add_revision("en", "Arab Spring", "2011-01-03T00:00:00Z", "c");
  auto client = make_client();
  const auto revs = client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), true);
  ASSERT_EQ(revs.size(), 2u);
  EXPECT_EQ(client->diagnostics().hidden_revisions.load(), 1u);
  const auto ids = wiki->revisions("en", "Arab Spring");
  const auto contents = client->fetch_revision_contents("en", {ids[0].id, ids[1].id, ids[2].id});
  EXPECT_EQ(contents.size(), 2u);
  EXPECT_FALSE(contents.count(ids[1].id));
}

TEST_F(ClientFixture, RevisionContentsBatchAtFifty) {
  std::vector<std::uint64_t> ids;
  Timestamp t = parse_timestamp("2011-01-01");
  for (int i = 0; i < 120; ++i) ids.push_back(wiki->add_revision("en", "Arab Spring", t + std::chrono::minutes(i), "x"));
  auto client = make_client();
  EXPECT_EQ(client->fetch_revision_contents("en", ids).size(), 120u);
  EXPECT_EQ(wiki->request_count(), 3u);
}

TEST_F(ClientFixture, LangLinksExactMap) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  wiki->set_langlinks("en", "Arab Spring", {{"ar", "الربيع العربي"}, {"fr", "Printemps arabe"}});
  wiki->add_revision("en", "Lonely", "2011-01-01T00:00:00Z", "x");
  auto client = make_client();
  const auto map = client->fetch_langlinks(spring);
  EXPECT_EQ(map.links, (std::map<std::string, std::string>{{"ar", "الربيع العربي"}, {"fr", "Printemps arabe"}}));
  EXPECT_EQ(map.source, spring);
  EXPECT_TRUE(client->fetch_langlinks(ArticleRef::make("en", "Lonely")).links.empty());
}

TEST_F(ClientFixture, LangLinksBatchFollowsRedirectsAndContinuation) {
  for (const char* t : {"A", "B", "C"}) wiki->add_revision("en", t, "2011-01-01T00:00:00Z", "x");
  wiki->set_langlinks("en", "A", {{"ar", "أ"}, {"de", "A"}, {"fr", "A"}, {"es", "A"}});
  wiki->set_langlinks("en", "B", {{"ar", "ب"}});
  wiki->add_redirect("en", "Bee", "B");
  auto client = make_client();
  const auto batch = client->fetch_langlinks_batch("en", {"A", "Bee", "C", "Gone"});
  ASSERT_EQ(batch.size(), 4u);
  EXPECT_EQ(batch.at("A")->links.size(), 4u);
  EXPECT_EQ(batch.at("Bee")->source.title, "B");
  EXPECT_EQ(batch.at("Bee")->title_in("ar"), "ب");
  EXPECT_TRUE(batch.at("C")->links.empty());
  EXPECT_FALSE(batch.at("Gone"));
}

TEST_F(ClientFixture, ResolveRedirect) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  wiki->add_redirect("en", "Arab spring protests", "Arab Spring");
  auto client = make_client();
  EXPECT_EQ(client->resolve_redirect(ArticleRef::make("en", "Arab spring protests")), spring);
  EXPECT_EQ(client->resolve_redirect(spring), spring);
  EXPECT_EQ(client->resolve_redirect(ArticleRef::make("en", "arab_Spring")), spring);
  EXPECT_THROW(client->resolve_redirect(ArticleRef::make("en", "Nowhere")), Error);
}

TEST_F(ClientFixture, RedirectsToPage) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  for (const char* from : {"Arab Revolution", "Arab uprisings", "Arab Awakening", "Arab spring"}) {
    wiki->add_redirect("en", from, "Arab Spring");
  }
  auto client = make_client();
  EXPECT_EQ(client->fetch_redirects_to(spring),
            (std::vector<std::string>{"Arab Awakening", "Arab Revolution", "Arab spring", "Arab uprisings"}));
}

TEST_F(ClientFixture, RetriesAfterTooManyRequests) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  wiki->fail_next(2, 429, std::chrono::seconds(7));
  auto client = make_client();
  EXPECT_EQ(client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), false).size(), 1u);
  EXPECT_EQ(client->diagnostics().retries.load(), 2u);
  // Retry-After is honored on top of exponential backoff.
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::seconds(7), std::chrono::seconds(1),
                                                            std::chrono::seconds(7), std::chrono::seconds(2)}));
}

TEST_F(ClientFixture, ExhaustedBudgetIsRateLimited) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  wiki->fail_next(10, 429);
  auto client = make_client();
  try {
    client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RateLimited);
  }
  EXPECT_EQ(wiki->request_count(), 4u);
}

TEST_F(ClientFixture, MaxlagIsRetriedThenRateLimited) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  wiki->maxlag_next(1);
  auto client = make_client();
  EXPECT_EQ(client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), false).size(), 1u);
  wiki->maxlag_next(10);
  try {
    client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RateLimited);
  }
}

TEST_F(ClientFixture, ServerErrorsBecomeTransport) {
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  wiki->fail_next(10, 503);
  auto client = make_client();
  try {
    client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Transport);
  }
}

TEST_F(ClientFixture, BrokenContinuationIsTruncated) {
  Timestamp t = parse_timestamp("2011-01-01");
  for (int i = 0; i < 10; ++i) wiki->add_revision("en", "Arab Spring", t + std::chrono::hours(i), "x");
  wiki->fail_after(2);
  auto client = make_client();
  try {
    client->fetch_revisions(spring, t, t + std::chrono::hours(24), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Truncated);
  }
}

TEST_F(ClientFixture, UserAgentIsRequiredAndSent) {
  ClientConfig config = fast_config();
  config.user_agent.clear();
  EXPECT_THROW(WikiClient(config, wiki), Error);
  wiki->add_revision("en", "Arab Spring", "2011-01-01T00:00:00Z", "x");
  auto client = make_client();
  client->fetch_revisions(spring, parse_timestamp("2011-01"), parse_timestamp("2011-02"), false);
  EXPECT_EQ(wiki->log().at(0).user_agent, fast_config().user_agent);
  EXPECT_EQ(wiki->log().at(0).url, "https://en.wikipedia.test/w/api.php");
}

TEST_F(ClientFixture, RequestsAreSpacedByTheRateLimit) {
  Timestamp t = parse_timestamp("2011-01-01");
  for (int i = 0; i < 12; ++i) wiki->add_revision("en", "Arab Spring", t + std::chrono::hours(i), "x");
  ClientConfig config = fast_config();
  config.requests_per_second = 40;  // 25 ms apart
  auto client = make_client(config);
  client->fetch_revisions(spring, t, t + std::chrono::hours(24), false);
  const auto log = wiki->log();
  ASSERT_EQ(log.size(), 4u);
  for (std::size_t i = 1; i < log.size(); ++i) {
    EXPECT_GE(log[i].at - log[i - 1].at, std::chrono::milliseconds(24));
  }
}

TEST_F(ClientFixture, EndpointTemplate) {
  ClientConfig config = fast_config();
  config.endpoint_template = "http://127.0.0.1:9/{lang}/api.php";
  EXPECT_EQ(make_client(config)->endpoint("ar"), "http://127.0.0.1:9/ar/api.php");
}

TEST_F(ClientFixture, RevisionInForceAtAMoment) {
  wiki->add_revision("en", "Arab Spring", "2009-01-01T00:00:00Z", "old");
  const auto before = wiki->add_revision("en", "Arab Spring", "2010-06-01T00:00:00Z", "before");
  wiki->add_revision("en", "Arab Spring", "2010-12-01T00:00:00Z", "hidden", true);
  wiki->add_revision("en", "Arab Spring", "2011-02-01T00:00:00Z", "after");
  auto client = make_client();
  const auto rev = client->fetch_revision_at(spring, parse_timestamp("2010-12-31T23:59:59Z"));
  ASSERT_TRUE(rev);
  EXPECT_EQ(rev->rev_id, before);
  EXPECT_EQ(*rev->wikitext, "before");
  EXPECT_EQ(wiki->request_count(), 2u);  // one revision per request, walking back past the hidden one
  EXPECT_EQ(wiki->log()[0].param("rvdir"), "older");
  EXPECT_FALSE(client->fetch_revision_at(spring, parse_timestamp("2008-01-01")));
  EXPECT_EQ(client->fetch_revision_at(spring, parse_timestamp("2011-02-01T00:00:00Z"))->wikitext, "after");
}
