#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikimem/error.hpp"
#include "wikimem/time.hpp"
#include "wikimem/title.hpp"

namespace wikimem {

// Wikipedia edition codes (also the language prefixes recognized as interwiki links).
inline const std::vector<std::string_view>& wikipedia_language_codes() {
  static const std::vector<std::string_view> codes = {
      "aa", "ab", "ace", "ady", "af", "ak", "als", "alt", "am", "an", "ang", "ar", "arc", "ary", "arz",
      "as", "ast", "atj", "av", "avk", "awa", "ay", "az", "azb", "ba", "ban", "bar", "bat-smg", "bcl",
      "be", "be-tarask", "be-x-old", "bg", "bh", "bi", "bjn", "bm", "bn", "bo", "bpy", "br", "bs", "bug",
      "bxr", "ca", "cbk-zam", "cdo", "ce", "ceb", "ch", "cho", "chr", "chy", "ckb", "co", "cr", "crh",
      "cs", "csb", "cu", "cv", "cy", "da", "dag", "de", "din", "diq", "dsb", "dty", "dv", "dz", "ee",
      "el", "eml", "en", "eo", "es", "et", "eu", "ext", "fa", "ff", "fi", "fiu-vro", "fj", "fo", "fr",
      "frp", "frr", "fur", "fy", "ga", "gag", "gan", "gcr", "gd", "gl", "glk", "gn", "gom", "gor", "got",
      "gu", "gv", "ha", "hak", "haw", "he", "hi", "hif", "ho", "hr", "hsb", "ht", "hu", "hy", "hyw", "hz",
      "ia", "id", "ie", "ig", "ii", "ik", "ilo", "inh", "io", "is", "it", "iu", "ja", "jam", "jbo", "jv",
      "ka", "kaa", "kab", "kbd", "kbp", "kg", "ki", "kj", "kk", "kl", "km", "kn", "ko", "koi", "kr", "krc",
      "ks", "ksh", "ku", "kv", "kw", "ky", "la", "lad", "lb", "lbe", "lez", "lfn", "lg", "li", "lij",
      "lld", "lmo", "ln", "lo", "lrc", "lt", "ltg", "lv", "mad", "mai", "map-bms", "mdf", "mg", "mh",
      "mhr", "mi", "min", "mk", "ml", "mn", "mni", "mnw", "mr", "mrj", "ms", "mt", "mus", "mwl", "my",
      "myv", "mzn", "na", "nah", "nap", "nds", "nds-nl", "ne", "new", "ng", "nia", "nl", "nn", "no",
      "nov", "nqo", "nrm", "nso", "nv", "ny", "oc", "olo", "om", "or", "os", "pa", "pag", "pam", "pap",
      "pcd", "pdc", "pfl", "pi", "pih", "pl", "pms", "pnb", "pnt", "ps", "pt", "qu", "rm", "rmy", "rn",
      "ro", "roa-rup", "roa-tara", "ru", "rue", "rw", "sa", "sah", "sat", "sc", "scn", "sco", "sd", "se",
      "sg", "sh", "shi", "shn", "si", "simple", "sk", "skr", "sl", "sm", "smn", "sn", "so", "sq", "sr",
      "srn", "ss", "st", "stq", "su", "sv", "sw", "szl", "szy", "ta", "tay", "tcy", "te", "tet", "tg",
      "th", "ti", "tk", "tl", "tn", "to", "tpi", "tr", "trv", "ts", "tt", "tum", "tw", "ty", "tyv", "udm",
      "ug", "uk", "ur", "uz", "ve", "vec", "vep", "vi", "vls", "vo", "wa", "war", "wo", "wuu", "xal",
      "xh", "xmf", "yi", "yo", "za", "zea", "zh", "zh-classical", "zh-min-nan", "zh-yue", "zu",
  };
  return codes;
}

inline bool is_known_language(std::string_view code) {
  const auto& codes = wikipedia_language_codes();
  return std::find(codes.begin(), codes.end(), code) != codes.end();
}

// One article in one language edition.
struct ArticleRef {
  std::string lang;
  std::string title;

  auto operator<=>(const ArticleRef&) const = default;

  // Canonicalizes the title and validates both fields.
  static ArticleRef make(std::string_view lang, std::string_view raw_title) {
    if (!is_known_language(lang)) {
      throw Error(ErrorKind::Config, "unknown Wikipedia edition '" + std::string(lang) + "'");
    }
    std::string title = normalize_title_text(raw_title);
    if (title.empty()) throw Error(ErrorKind::Config, "empty title for edition '" + std::string(lang) + "'");
    return {std::string(lang), std::move(title)};
  }

  std::string to_string() const { return lang + ":" + title; }
};

struct RevisionRecord {
  std::uint64_t rev_id = 0;
  Timestamp timestamp{};
  std::uint64_t size_bytes = 0;
  // Absent when fetched without content.
  std::optional<std::string> wikitext;

  bool operator==(const RevisionRecord&) const = default;
};

struct LangLinkMap {
  ArticleRef source;
  std::map<std::string, std::string> links;  // language code -> title

  bool operator==(const LangLinkMap&) const = default;

  std::optional<std::string> title_in(std::string_view lang) const {
    const auto it = links.find(std::string(lang));
    if (it == links.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace wikimem
