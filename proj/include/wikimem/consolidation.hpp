#pragma once

// Consolidation: whether related articles (countries, events) link back to
// the focal article, month by month.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "wikimem/article.hpp"
#include "wikimem/error.hpp"
#include "wikimem/snapshot.hpp"
#include "wikimem/time.hpp"
#include "wikimem/wikitext.hpp"

namespace wikimem {

enum class RelatedKind { Country, Event };

inline std::string_view to_string(RelatedKind k) { return k == RelatedKind::Country ? "country" : "event"; }

struct RelatedArticle {
  std::string label;
  RelatedKind kind = RelatedKind::Country;
  std::map<std::string, ArticleRef> titles;  // by language; one entry means single-language

  bool single_language() const { return titles.size() == 1; }
  const ArticleRef* in(const std::string& lang) const {
    const auto it = titles.find(lang);
    return it == titles.end() ? nullptr : &it->second;
  }
};

struct EgoConfig {
  std::map<std::string, ArticleRef> focal;
  std::vector<RelatedArticle> related;

  const RelatedArticle* find(const std::string& label) const {
    for (const auto& r : related) {
      if (r.label == label) return &r;
    }
    return nullptr;
  }
};

// Kept byte-identical to data/ego_default.yaml.
inline constexpr std::string_view kDefaultEgoYaml = R"YAML(# Related articles checked for links back to the focal article.
# One entry per related article: label, kind (country|event), and its title in
# each edition. An entry with a single title is analysed in that edition only.
# Titles are resolved through redirects at fetch time.

focal:
  en: Arab Spring
  ar: الربيع العربي

related:
  - label: Oman
    kind: country
    en_title: Oman
    ar_title: سلطنة عمان
  - label: Morocco
    kind: country
    en_title: Morocco
    ar_title: المغرب
  - label: Jordan
    kind: country
    en_title: Jordan
    ar_title: الأردن
  - label: Iraq
    kind: country
    en_title: Iraq
    ar_title: العراق
  - label: Algeria
    kind: country
    en_title: Algeria
    ar_title: الجزائر
  - label: Bahrain
    kind: country
    en_title: Bahrain
    ar_title: البحرين
  - label: Syria
    kind: country
    en_title: Syria
    ar_title: سوريا
  - label: Yemen
    kind: country
    en_title: Yemen
    ar_title: اليمن
  - label: Libya
    kind: country
    en_title: Libya
    ar_title: ليبيا
  - label: Egypt
    kind: country
    en_title: Egypt
    ar_title: مصر
  - label: Tunisia
    kind: country
    en_title: Tunisia
    ar_title: تونس
  - label: Omani protests
    kind: event
    en_title: 2011 Omani protests
    ar_title: احتجاجات عمان 2011
  - label: Moroccan protests
    kind: event
    en_title: 2011–2012 Moroccan protests
    ar_title: احتجاجات المغرب 2011–2012
  - label: Jordanian protests
    kind: event
    en_title: 2011–2012 Jordanian protests
    ar_title: احتجاجات الأردن 2011–2012
  - label: Iraqi protests
    kind: event
    en_title: 2011 Iraqi protests
    ar_title: احتجاجات العراق 2011
  - label: Algerian protests
    kind: event
    en_title: 2010–2012 Algerian protests
    ar_title: احتجاجات الجزائر 2010–2012
  - label: Bahraini uprising
    kind: event
    en_title: 2011 Bahraini uprising
    ar_title: احتجاجات البحرين 2011
  # The Syrian event is tracked through the civil war article.
  - label: Syrian civil war
    kind: event
    en_title: Syrian civil war
    ar_title: الحرب الأهلية السورية
  - label: Yemeni Revolution
    kind: event
    en_title: Yemeni Revolution
    ar_title: الثورة اليمنية
  - label: Libyan civil war
    kind: event
    en_title: Libyan civil war (2011)
    ar_title: الثورة الليبية
  - label: Egyptian revolution
    kind: event
    en_title: 2011 Egyptian revolution
    ar_title: ثورة 25 يناير
  - label: Tunisian Revolution
    kind: event
    en_title: Tunisian Revolution
    ar_title: الثورة التونسية
)YAML";

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::optional<std::string> yaml_string(const YAML::Node& node, const char* key) {
  const YAML::Node v = node[key];
  if (!v || v.IsNull()) return std::nullopt;
  if (!v.IsScalar()) throw Error(ErrorKind::Config, std::string("ego config: '") + key + "' must be a string");
  std::string s = v.as<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace detail

inline EgoConfig parse_ego_config(std::string_view text, const std::string& origin = "ego config") {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, origin + ": " + e.what());
  }
  if (!root.IsMap()) throw Error(ErrorKind::Config, origin + ": top level must be a mapping");

  EgoConfig cfg;
  // Optional and informational; the run's focal titles come from the command line.
  if (const YAML::Node focal = root["focal"]) {
    if (!focal.IsMap()) throw Error(ErrorKind::Config, origin + ": 'focal' must map languages to titles");
    for (const auto& kv : focal) {
      const auto lang = kv.first.as<std::string>();
      cfg.focal.emplace(lang, ArticleRef::make(lang, kv.second.as<std::string>()));
    }
  }

  const YAML::Node related = root["related"];
  if (!related || !related.IsSequence()) throw Error(ErrorKind::Config, origin + ": missing 'related' list");
  std::set<std::string> labels;
  for (const auto& entry : related) {
    if (!entry.IsMap()) throw Error(ErrorKind::Config, origin + ": related entries must be mappings");
    RelatedArticle r;
    const auto label = detail::yaml_string(entry, "label");
    if (!label) throw Error(ErrorKind::Config, origin + ": related entry without a label");
    r.label = *label;
    if (!labels.insert(r.label).second) throw Error(ErrorKind::Config, origin + ": duplicate label '" + r.label + "'");
    const auto kind = detail::yaml_string(entry, "kind").value_or("country");
    if (kind == "country") {
      r.kind = RelatedKind::Country;
    } else if (kind == "event") {
      r.kind = RelatedKind::Event;
    } else {
      throw Error(ErrorKind::Config, origin + ": '" + r.label + "' has unknown kind '" + kind + "'");
    }
    for (const auto& kv : entry) {
      const auto key = kv.first.as<std::string>();
      if (key.size() < 7 || key.substr(key.size() - 6) != "_title") continue;
      const auto lang = key.substr(0, key.size() - 6);
      if (const auto title = detail::yaml_string(entry, key.c_str())) r.titles.emplace(lang, ArticleRef::make(lang, *title));
    }
    if (r.titles.empty()) {
      throw Error(ErrorKind::MissingArticle, origin + ": '" + r.label + "' has no title in any language");
    }
    cfg.related.push_back(std::move(r));
  }
  return cfg;
}

inline EgoConfig load_ego_config(const std::filesystem::path& path) {
  return parse_ego_config(detail::read_text_file(path), path.string());
}

inline EgoConfig default_ego_config() { return parse_ego_config(kDefaultEgoYaml, "default ego config"); }

// Titles that count as a link to the focal article: its canonical title plus,
// unless strict matching is asked for, every redirect to it.
inline std::set<std::string> focal_title_set(const ArticleRef& focal, const std::vector<std::string>& redirects,
                                             bool include_redirects = true) {
  std::set<std::string> out{focal.title};
  if (include_redirects) {
    for (const auto& r : redirects) out.insert(canonicalize_title(r, focal.lang));
  }
  return out;
}

struct EgoPoint {
  YearMonth month;
  bool included = false;

  bool operator==(const EgoPoint&) const = default;
};

struct EgoTimeline {
  std::string label;
  std::string lang;
  std::vector<EgoPoint> points;
};

inline EgoTimeline ego_timeline(const SnapshotSeries& related, const std::set<std::string>& focal_titles,
                                const std::string& label = {}) {
  EgoTimeline t{label.empty() ? related.article.title : label, related.article.lang, {}};
  t.points.reserve(related.size());
  for (const auto& s : related.snapshots) {
    const bool hit = std::any_of(focal_titles.begin(), focal_titles.end(),
                                 [&](const std::string& title) { return s.outlinks.contains(title); });
    t.points.push_back({s.month, hit});
  }
  return t;
}

enum class EgoCell : std::uint8_t { NotCreated = 0, Absent = 1, Included = 2 };

struct ConsolidationMatrix {
  std::string lang;
  std::vector<std::string> labels;
  std::vector<RelatedKind> kinds;
  std::vector<YearMonth> months;
  std::vector<EgoCell> cells;           // row-major, labels × months
  std::vector<std::string> not_found;   // configured here but no page in this edition

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return months.size(); }
  EgoCell at(std::size_t r, std::size_t c) const { return cells[r * months.size() + c]; }
  bool included(std::size_t r, std::size_t c) const { return at(r, c) == EgoCell::Included; }
  bool created(std::size_t r, std::size_t c) const { return at(r, c) != EgoCell::NotCreated; }
};

// One row per related article that exists in `lang`, over `span`. `series` is
// keyed by label; a label with a title in `lang` but no series is recorded in
// not_found. An entry missing from every edition is a MissingArticle error;
// `found_elsewhere` lists labels that did resolve in another edition.
inline ConsolidationMatrix consolidation_matrix(const EgoConfig& cfg, const std::string& lang,
                                               const std::map<std::string, SnapshotSeries>& series,
                                               const std::set<std::string>& focal_titles, const MonthSpan& span,
                                               const std::set<std::string>& found_elsewhere = {}) {
  if (span.empty()) throw Error(ErrorKind::Config, "empty month span");
  ConsolidationMatrix m;
  m.lang = lang;
  m.months = span.months();
  for (const auto& r : cfg.related) {
    if (!r.in(lang)) continue;
    const auto it = series.find(r.label);
    if (it == series.end()) {
      if (!found_elsewhere.count(r.label)) {
        throw Error(ErrorKind::MissingArticle, "'" + r.label + "' resolves in no language edition");
      }
      m.not_found.push_back(r.label);
      continue;
    }
    const EgoTimeline t = ego_timeline(it->second, focal_titles, r.label);
    m.labels.push_back(r.label);
    m.kinds.push_back(r.kind);
    std::vector<EgoCell> row(m.months.size(), EgoCell::NotCreated);
    for (const auto& p : t.points) {
      if (!span.contains(p.month)) continue;
      row[static_cast<std::size_t>(span.first.months_until(p.month))] = p.included ? EgoCell::Included : EgoCell::Absent;
    }
    m.cells.insert(m.cells.end(), row.begin(), row.end());
  }
  return m;
}

}  // namespace wikimem
