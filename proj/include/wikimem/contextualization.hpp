#pragma once

// Contextualization: outlinks classified by the inter-language-link status of
// their target relative to the other edition's focal article.
//
// Language links are only available as current state, so one classification
// is applied to every period of the history.

#include <array>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wikimem/article.hpp"
#include "wikimem/deliberation.hpp"
#include "wikimem/wikitext.hpp"

namespace wikimem {

enum class IllStatus { NoIll = 0, IllNotOutlinked = 1, IllOutlinked = 2 };

inline constexpr std::array<IllStatus, 3> kIllStatuses = {IllStatus::NoIll, IllStatus::IllNotOutlinked,
                                                         IllStatus::IllOutlinked};

inline std::string_view to_string(IllStatus s) {
  switch (s) {
    case IllStatus::NoIll: return "NoIll";
    case IllStatus::IllNotOutlinked: return "IllNotOutlinked";
    case IllStatus::IllOutlinked: return "IllOutlinked";
  }
  return "NoIll";
}

// Row captions as they appear in the summary table.
inline std::string_view table_caption(IllStatus s) {
  switch (s) {
    case IllStatus::NoIll: return "No ILL";
    case IllStatus::IllNotOutlinked: return "ILL, no outlink";
    case IllStatus::IllOutlinked: return "ILL, outlinked";
  }
  return "";
}

// Current language links of a title in the source edition; nullopt when the
// page does not exist (a red link).
using LangLinkLookup = std::function<std::optional<LangLinkMap>(const std::string& title)>;

struct IllClassification {
  IllStatus status = IllStatus::NoIll;
  bool red_link = false;
  std::optional<std::string> mapped_title;
};

// `other_targets` holds the other focal article's current outlinks, each also
// under its redirect-resolved title.
inline IllClassification classify_outlink(const std::string& outlink, const std::string& other_lang,
                                          const LangLinkLookup& lookup, const std::set<std::string>& other_targets) {
  IllClassification out;
  const auto links = lookup(outlink);
  if (!links) {
    out.red_link = true;
    return out;
  }
  const auto mapped = links->title_in(other_lang);
  if (!mapped) return out;
  out.mapped_title = canonicalize_title(*mapped, other_lang);
  out.status = other_targets.count(*out.mapped_title) ? IllStatus::IllOutlinked : IllStatus::IllNotOutlinked;
  return out;
}

struct DirectionalIll {
  std::string source_lang;
  std::string other_lang;
  std::map<std::string, IllClassification> outlinks;

  std::string name() const { return source_lang + "_to_" + other_lang; }

  std::map<std::string, IllStatus> statuses() const {
    std::map<std::string, IllStatus> out;
    for (const auto& [title, c] : outlinks) out.emplace(title, c.status);
    return out;
  }
};

inline DirectionalIll classify_direction(const std::set<std::string>& outlinks, const std::string& source_lang,
                                         const std::string& other_lang, const LangLinkLookup& lookup,
                                         const std::set<std::string>& other_targets) {
  DirectionalIll d{source_lang, other_lang, {}};
  for (const auto& title : outlinks) d.outlinks.emplace(title, classify_outlink(title, other_lang, lookup, other_targets));
  return d;
}

struct IllCounts {
  std::string source_lang;
  std::string other_lang;
  std::array<std::size_t, 3> counts{};
  std::size_t total = 0;

  std::size_t count(IllStatus s) const { return counts[static_cast<std::size_t>(s)]; }
};

inline IllCounts count_statuses(const DirectionalIll& d, const std::set<std::string>* restrict_to = nullptr) {
  IllCounts c{d.source_lang, d.other_lang, {}, 0};
  for (const auto& [title, cls] : d.outlinks) {
    if (restrict_to && !restrict_to->count(title)) continue;
    ++c.counts[static_cast<std::size_t>(cls.status)];
    ++c.total;
  }
  return c;
}

struct IllTable {
  std::vector<IllCounts> directions;
};

// Table over each direction's current outlinks (all classified outlinks when
// no current set is given).
inline IllTable ill_table(const DirectionalIll& first, const DirectionalIll& second,
                          const std::set<std::string>* first_current = nullptr,
                          const std::set<std::string>* second_current = nullptr) {
  return {{count_statuses(first, first_current), count_statuses(second, second_current)}};
}

// Share of the direction total in percent, one decimal: 18 of 327 -> "5.5%".
inline std::string format_percent(std::size_t count, std::size_t total) {
  if (total == 0) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * static_cast<double>(count) / static_cast<double>(total));
  return buf;
}

struct IllSeries {
  std::vector<std::string> periods;
  std::array<std::vector<std::int64_t>, 3> counts;  // indexed by IllStatus

  std::int64_t total_at(std::size_t col) const { return counts[0][col] + counts[1][col] + counts[2][col]; }
};

inline IllSeries temporal_ill_series(const InclusionMatrix& m, const std::map<std::string, IllStatus>& classification) {
  IllSeries s;
  s.periods = m.periods;
  for (auto& v : s.counts) v.assign(m.cols(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto it = classification.find(m.outlinks[r]);
    if (it == classification.end()) {
      throw Error(ErrorKind::ShapeMismatch, "no ILL status for outlink '" + m.outlinks[r] + "'");
    }
    auto& row_counts = s.counts[static_cast<std::size_t>(it->second)];
    for (std::size_t c = 0; c < m.cols(); ++c) row_counts[c] += m.at(r, c);
  }
  return s;
}

}  // namespace wikimem
