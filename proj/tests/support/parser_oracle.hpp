#pragma once

#include <regex>
#include <string>
#include <vector>

namespace wikimem::testing {

// Bracket scan written as two regex passes: mask unparsed spans, then match
// link syntax. Returns raw targets in document order.
inline std::vector<std::string> regex_raw_targets(const std::string& text) {
  static const std::regex mask(
      "<!--[\\s\\S]*?(?:-->|$)|<nowiki\\s*/>|<nowiki>[\\s\\S]*?</nowiki\\s*>|<pre>[\\s\\S]*?</pre\\s*>");
  static const std::regex link("\\[\\[([^\\[\\]{}|<>\\x00-\\x1f\\x7f]+)(?:\\|(?:(?!\\[\\[)[\\s\\S])*?)?\\]\\]");
  const std::string masked = std::regex_replace(text, mask, "\x7f");
  std::vector<std::string> out;
  for (std::sregex_iterator it(masked.begin(), masked.end(), link), end; it != end; ++it) {
    const std::string raw = (*it)[1].str();
    const std::string name = raw.substr(0, raw.find('#'));
    std::string core;
    for (char c : name) {
      if (c != ' ' && c != '_' && c != ':') core += c;
    }
    if (core.empty() && raw.find('#') == std::string::npos) continue;
    out.push_back(raw);
  }
  return out;
}

}  // namespace wikimem::testing
