#pragma once

// Internal-link extraction from raw wikitext.
//
// Link recognition follows MediaWiki's own rule: the text is split at every
// "[[", and a piece is a link when it starts with a legal target, an optional
// "|label" and a closing "]]" before the next "[[". Links inside comments,
// <nowiki> and <pre> are not seen; links in template arguments are.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wikimem/article.hpp"
#include "wikimem/error.hpp"
#include "wikimem/title.hpp"

namespace wikimem {

enum class NamespaceClass { Article, Category, File, Portal, Template, Other };

enum class LinkKind { Article, Category, File, Portal, Template, Other, Interwiki, External };

inline std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Article: return "Article";
    case LinkKind::Category: return "Category";
    case LinkKind::File: return "File";
    case LinkKind::Portal: return "Portal";
    case LinkKind::Template: return "Template";
    case LinkKind::Other: return "Other";
    case LinkKind::Interwiki: return "Interwiki";
    case LinkKind::External: return "External";
  }
  return "Other";
}

inline std::optional<NamespaceClass> parse_namespace_class(std::string_view s) {
  if (s == "Article") return NamespaceClass::Article;
  if (s == "Category") return NamespaceClass::Category;
  if (s == "File") return NamespaceClass::File;
  if (s == "Portal") return NamespaceClass::Portal;
  if (s == "Template") return NamespaceClass::Template;
  if (s == "Other") return NamespaceClass::Other;
  return std::nullopt;
}

// Same rows as data/namespaces.tsv; the test suite keeps the two in sync.
inline constexpr std::string_view kDefaultNamespaceTsv = R"(# lang	alias	class
en	Media	File
en	Special	Other
en	Talk	Other
en	User	Other
en	User talk	Other
en	Wikipedia	Other
en	WP	Other
en	Project	Other
en	Wikipedia talk	Other
en	WT	Other
en	Project talk	Other
en	File	File
en	Image	File
en	File talk	Other
en	Image talk	Other
en	MediaWiki	Other
en	MediaWiki talk	Other
en	Template	Template
en	Template talk	Other
en	Help	Other
en	Help talk	Other
en	Category	Category
en	Category talk	Other
en	Portal	Portal
en	Portal talk	Other
en	Draft	Other
en	Draft talk	Other
en	TimedText	Other
en	TimedText talk	Other
en	Module	Other
en	Module talk	Other
en	MOS	Other
en	Event	Other
ar	ميديا	File
ar	خاص	Other
ar	نقاش	Other
ar	مستخدم	Other
ar	مستخدمة	Other
ar	نقاش المستخدم	Other
ar	نقاش المستخدمة	Other
ar	ويكيبيديا	Other
ar	وب	Other
ar	نقاش ويكيبيديا	Other
ar	ملف	File
ar	صورة	File
ar	نقاش الملف	Other
ar	نقاش الصورة	Other
ar	ميدياويكي	Other
ar	نقاش ميدياويكي	Other
ar	قالب	Template
ar	نقاش القالب	Other
ar	مساعدة	Other
ar	نقاش المساعدة	Other
ar	تصنيف	Category
ar	نقاش التصنيف	Other
ar	بوابة	Portal
ar	نقاش البوابة	Other
ar	ملحق	Other
ar	نقاش الملحق	Other
ar	مسودة	Other
ar	نقاش المسودة	Other
ar	وحدة	Other
ar	نقاش الوحدة	Other
ar	Media	File
ar	Special	Other
ar	Talk	Other
ar	User	Other
ar	User talk	Other
ar	Wikipedia	Other
ar	Project	Other
ar	File	File
ar	Image	File
ar	MediaWiki	Other
ar	Template	Template
ar	Help	Other
ar	Category	Category
ar	Portal	Portal
ar	Draft	Other
ar	Module	Other
)";

// Non-language interwiki prefixes valid on every Wikipedia.
inline const std::set<std::string, std::less<>>& project_interwiki_prefixes() {
  static const std::set<std::string, std::less<>> prefixes = {
      "b",         "c",        "commons",   "d",          "foundation", "m",          "mediawikiwiki",
      "meta",      "metawikimedia", "mw",   "n",          "phab",       "q",          "s",
      "species",   "v",        "voy",       "w",          "wikibooks",  "wikidata",   "wikimedia",
      "wikinews",  "wikiquote", "wikisource", "wikispecies", "wikiversity", "wikivoyage", "wikt",
      "wiktionary", "wmf",     "mediazilla", "outreach",  "incubator",  "wikitech",
  };
  return prefixes;
}

namespace detail {

// Namespace prefixes compare case-insensitively with '_' == ' '.
inline std::string fold_prefix(std::string_view s) {
  std::string folded = normalize_title_text(s, false);
  for (char& c : folded) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return folded;
}

}  // namespace detail

// Per-language namespace alias table.
class NamespaceTable {
 public:
  NamespaceTable() = default;

  static NamespaceTable defaults() {
    NamespaceTable table;
    table.load(kDefaultNamespaceTsv, "<built-in>");
    return table;
  }

  // Parses `lang<TAB>alias<TAB>class` lines; '#' starts a comment line.
  void load(std::string_view tsv, std::string_view origin = "<string>") {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= tsv.size()) {
      std::size_t end = tsv.find('\n', pos);
      if (end == std::string_view::npos) end = tsv.size();
      std::string_view line = tsv.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() || line.front() == '#') continue;
      const std::size_t t1 = line.find('\t');
      const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
      const auto cls = t2 == std::string_view::npos ? std::nullopt : parse_namespace_class(line.substr(t2 + 1));
      if (!cls || t1 == 0 || t2 == t1 + 1) {
        throw Error(ErrorKind::Config,
                    std::string(origin) + ":" + std::to_string(line_no) + ": expected lang<TAB>alias<TAB>class");
      }
      add(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), *cls);
    }
  }

  static NamespaceTable from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read namespace table " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    NamespaceTable table;
    table.load(buf.str(), path);
    return table;
  }

  void add(std::string_view lang, std::string_view alias, NamespaceClass cls) {
    aliases_[std::string(lang)][detail::fold_prefix(alias)] = cls;
  }

  std::optional<NamespaceClass> lookup(std::string_view lang, std::string_view prefix) const {
    auto lang_it = aliases_.find(std::string(lang));
    // Editions without their own rows still accept the canonical English names.
    if (lang_it == aliases_.end()) lang_it = aliases_.find("en");
    if (lang_it == aliases_.end()) return std::nullopt;
    const auto it = lang_it->second.find(detail::fold_prefix(prefix));
    if (it == lang_it->second.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const NamespaceTable&) const = default;

 private:
  std::map<std::string, std::map<std::string, NamespaceClass>> aliases_;
};

inline const NamespaceTable& default_namespaces() {
  static const NamespaceTable table = NamespaceTable::defaults();
  return table;
}

inline bool is_interwiki_prefix(std::string_view prefix) {
  const std::string folded = detail::fold_prefix(prefix);
  return is_known_language(folded) || project_interwiki_prefixes().count(folded) > 0;
}

namespace detail {

struct SplitTarget {
  bool leading_colon = false;
  std::string prefix;  // text before the first ':' (raw), empty when none
  std::string rest;
  bool has_prefix = false;
};

inline std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '_')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '_')) s.remove_suffix(1);
  return s;
}

inline SplitTarget split_target(std::string_view raw) {
  SplitTarget out;
  std::string_view s = trim_ascii(raw);
  if (!s.empty() && s.front() == ':') {
    out.leading_colon = true;
    s = trim_ascii(s.substr(1));
  }
  const std::size_t colon = s.find(':');
  if (colon != std::string_view::npos) {
    out.has_prefix = true;
    out.prefix = std::string(s.substr(0, colon));
    out.rest = std::string(s.substr(colon + 1));
  } else {
    out.rest = std::string(s);
  }
  return out;
}

}  // namespace detail

// Classifies a bracketed link target (anchor and label already removed or not;
// anything after '#' is ignored).
inline LinkKind classify_link(std::string_view raw_target, std::string_view lang,
                              const NamespaceTable& namespaces = default_namespaces()) {
  std::string_view target = raw_target;
  if (const auto hash = target.find('#'); hash != std::string_view::npos) target = target.substr(0, hash);
  const std::string_view trimmed = detail::trim_ascii(target);
  if (trimmed.find("://") != std::string_view::npos || trimmed.starts_with("//")) return LinkKind::External;
  const auto split = detail::split_target(target);
  if (!split.has_prefix) return LinkKind::Article;
  if (const auto cls = namespaces.lookup(lang, split.prefix)) {
    switch (*cls) {
      case NamespaceClass::Article: return LinkKind::Article;
      case NamespaceClass::Category: return LinkKind::Category;
      case NamespaceClass::File: return LinkKind::File;
      case NamespaceClass::Portal: return LinkKind::Portal;
      case NamespaceClass::Template: return LinkKind::Template;
      case NamespaceClass::Other: return LinkKind::Other;
    }
  }
  if (is_interwiki_prefix(split.prefix)) return LinkKind::Interwiki;
  return LinkKind::Article;
}

// Canonical page title: whitespace/underscore, entity and first-letter rules,
// with a recognized namespace or interwiki prefix normalized separately from
// the page name. Idempotent.
inline std::string canonicalize_title(std::string_view raw, std::string_view lang,
                                      const NamespaceTable& namespaces = default_namespaces()) {
  std::string decoded = normalize_title_text(raw, false);
  while (!decoded.empty() && decoded.front() == ':') decoded = normalize_title_text(decoded.substr(1), false);
  const std::size_t colon = decoded.find(':');
  if (colon != std::string::npos) {
    const std::string_view prefix = std::string_view(decoded).substr(0, colon);
    const std::string_view rest = std::string_view(decoded).substr(colon + 1);
    if (namespaces.lookup(lang, prefix)) {
      const std::string name = normalize_title_text(rest);
      return normalize_title_text(prefix) + ":" + name;
    }
    if (is_interwiki_prefix(prefix)) {
      return detail::fold_prefix(prefix) + ":" + normalize_title_text(rest);
    }
  }
  return normalize_title_text(decoded);
}

// Article-namespace outlinks of one revision; set semantics on canonical titles.
struct OutlinkSet {
  std::set<std::string> links;
  std::uint64_t source_rev = 0;

  bool contains(const std::string& title) const { return links.count(title) > 0; }
  std::size_t size() const { return links.size(); }
  bool empty() const { return links.empty(); }
  bool operator==(const OutlinkSet&) const = default;
};

// One bracket pair found in the text, before namespace filtering.
struct LinkCandidate {
  std::string raw_target;  // text between "[[" and the first '|' or "]]"
  LinkKind kind = LinkKind::Article;
  std::string target;      // canonical title, anchor stripped
  bool anchor_only = false;
};

namespace detail {

// Marks masked spans; MediaWiki replaces them with strip markers, which can
// never be part of a link target.
inline constexpr char kStripMarker = '\x7F';

inline bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
  }
  return true;
}

// Finds the end of an opening tag `<name ...>` at pos; returns npos if pos
// does not start such a tag. Sets self_closing for `<name/>`.
inline std::size_t match_open_tag(std::string_view text, std::size_t pos, std::string_view name,
                                  bool& self_closing) {
  if (text[pos] != '<' || !starts_with_ci(text, pos + 1, name)) return std::string_view::npos;
  const std::size_t after = pos + 1 + name.size();
  if (after >= text.size()) return std::string_view::npos;
  const char c = text[after];
  if (c != '>' && c != '/' && c != ' ' && c != '\t' && c != '\n') return std::string_view::npos;
  const std::size_t close = text.find('>', after);
  if (close == std::string_view::npos) return std::string_view::npos;
  self_closing = text[close - 1] == '/';
  return close + 1;
}

// Position just past `</name>` searching from pos, or npos.
inline std::size_t find_close_tag(std::string_view text, std::size_t pos, std::string_view name) {
  for (std::size_t p = text.find("</", pos); p != std::string_view::npos; p = text.find("</", p + 2)) {
    if (!starts_with_ci(text, p + 2, name)) continue;
    std::size_t q = p + 2 + name.size();
    while (q < text.size() && (text[q] == ' ' || text[q] == '\t' || text[q] == '\n')) ++q;
    if (q < text.size() && text[q] == '>') return q + 1;
  }
  return std::string_view::npos;
}

// Removes comments and replaces <nowiki>/<pre> spans with a strip marker.
// Unclosed <nowiki>/<pre> tags are literal text; an unclosed comment runs to
// the end of the document.
inline std::string mask_unparsed_spans(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '<') {
      out += text[pos++];
      continue;
    }
    if (text.compare(pos, 4, "<!--") == 0) {
      const std::size_t end = text.find("-->", pos + 4);
      pos = end == std::string_view::npos ? text.size() : end + 3;
      continue;
    }
    bool masked = false;
    for (std::string_view name : {std::string_view("nowiki"), std::string_view("pre")}) {
      bool self_closing = false;
      const std::size_t open_end = match_open_tag(text, pos, name, self_closing);
      if (open_end == std::string_view::npos) continue;
      if (self_closing) {
        out += kStripMarker;
        pos = open_end;
        masked = true;
        break;
      }
      const std::size_t close_end = find_close_tag(text, open_end, name);
      if (close_end == std::string_view::npos) continue;
      out += kStripMarker;
      pos = close_end;
      masked = true;
      break;
    }
    if (!masked) out += text[pos++];
  }
  return out;
}

inline bool is_legal_target(std::string_view target) {
  for (unsigned char c : target) {
    if (c < 0x20 || c == 0x7F || c == '[' || c == ']' || c == '{' || c == '}' || c == '|' || c == '<' ||
        c == '>') {
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Every bracket pair recognized as a link, in document order, with its class.
inline std::vector<LinkCandidate> extract_link_candidates(std::string_view wikitext, std::string_view lang,
                                                          const NamespaceTable& namespaces = default_namespaces()) {
  const std::string text = detail::mask_unparsed_spans(wikitext);
  std::vector<LinkCandidate> out;
  std::size_t open = text.find("[[");
  while (open != std::string::npos) {
    const std::size_t next_open = text.find("[[", open + 1);
    if (next_open == open + 1) {  // "[[[": only the innermost pair can open a link
      open = next_open;
      continue;
    }
    const std::size_t piece_end = next_open == std::string::npos ? text.size() : next_open;
    const std::string_view piece = std::string_view(text).substr(open + 2, piece_end - open - 2);
    const std::size_t close = piece.find("]]");
    if (close != std::string_view::npos) {
      const std::size_t pipe = piece.substr(0, close).find('|');
      const std::string_view raw = piece.substr(0, std::min(close, pipe));
      if (!raw.empty() && detail::is_legal_target(raw)) {
        LinkCandidate candidate;
        candidate.raw_target = std::string(raw);
        candidate.kind = classify_link(raw, lang, namespaces);
        std::string_view name = raw;
        if (const auto hash = name.find('#'); hash != std::string_view::npos) name = name.substr(0, hash);
        candidate.target = candidate.kind == LinkKind::External ? std::string(detail::trim_ascii(name))
                                                                : canonicalize_title(name, lang, namespaces);
        candidate.anchor_only = candidate.target.empty() && raw.find('#') != std::string_view::npos;
        if (!candidate.target.empty() || candidate.anchor_only) out.push_back(std::move(candidate));
      }
    }
    open = next_open;
  }
  return out;
}

inline OutlinkSet extract_outlinks(std::string_view wikitext, std::string_view lang,
                                   const NamespaceTable& namespaces = default_namespaces()) {
  OutlinkSet set;
  for (auto& candidate : extract_link_candidates(wikitext, lang, namespaces)) {
    if (candidate.kind == LinkKind::Article && !candidate.anchor_only) set.links.insert(std::move(candidate.target));
  }
  return set;
}

// Single-bracket external links ("[http://...]") and bare URLs are not
// outlinks; this count only feeds size diagnostics.
inline std::size_t count_external_links(std::string_view wikitext) {
  const std::string text = detail::mask_unparsed_spans(wikitext);
  std::size_t count = 0;
  for (std::size_t p = text.find('['); p != std::string::npos; p = text.find('[', p + 1)) {
    if (p + 1 < text.size() && text[p + 1] == '[') {
      ++p;
      continue;
    }
    const std::string_view rest = std::string_view(text).substr(p + 1);
    if (rest.starts_with("http://") || rest.starts_with("https://") || rest.starts_with("//")) ++count;
  }
  return count;
}

}  // namespace wikimem
