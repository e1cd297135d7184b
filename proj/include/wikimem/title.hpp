#pragma once

// Page-title normalization shared by the parser, the API client and the cache.

#include <cstdint>
#include <string>
#include <string_view>

namespace wikimem {

namespace utf8 {

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decodes one code point at s[pos]; returns 0xFFFD and advances one byte on bad input.
inline char32_t decode(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || pos + len > s.size()) {
    ++pos;
    return 0xFFFD;
  }
  char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

inline bool valid(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t before = pos;
    if (decode(s, pos) == 0xFFFD && !(pos - before == 3 && s.substr(before, 3) == "\xEF\xBF\xBD")) return false;
  }
  return true;
}

inline bool is_space(char32_t cp) {
  return cp == ' ' || cp == '_' || cp == '\t' || cp == 0xA0 || cp == 0x1680 || cp == 0x180E ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

// Simple uppercase mapping for the scripts MediaWiki capitalizes in practice:
// Latin, Latin-1, Latin Extended-A, Greek and Cyrillic. Caseless scripts pass through.
inline char32_t to_upper(char32_t cp) {
  if (cp >= 'a' && cp <= 'z') return cp - 0x20;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 0x20;
  if (cp == 0xFF) return 0x178;
  if (cp >= 0x100 && cp <= 0x17F) {
    const bool odd_lower = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if (cp == 0x131 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    if (odd_lower) return (cp % 2 == 0) ? cp - 1 : cp;
    return (cp % 2 == 1) ? cp - 1 : cp;
  }
  if (cp == 0x3C2) return 0x3A3;
  if (cp >= 0x3B1 && cp <= 0x3C9) return cp - 0x20;
  if (cp >= 0x430 && cp <= 0x44F) return cp - 0x20;
  if (cp >= 0x450 && cp <= 0x45F) return cp - 0x50;
  return cp;
}

}  // namespace utf8

namespace detail {

inline std::string decode_entities(std::string_view s) {
  struct Named {
    std::string_view name;
    char32_t cp;
  };
  static constexpr Named kNamed[] = {
      {"amp", '&'},     {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
      {"nbsp", 0xA0},   {"ndash", 0x2013}, {"mdash", 0x2014}, {"lrm", 0x200E},   {"rlm", 0x200F},
      {"shy", 0xAD},    {"hellip", 0x2026}, {"rsquo", 0x2019}, {"lsquo", 0x2018}, {"eacute", 0xE9},
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += s[i];
      continue;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    if (body.size() > 1 && body[0] == '#') {
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const std::string_view digits = body.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int v = (c >= '0' && c <= '9') ? c - '0'
                : (hex && c >= 'a' && c <= 'f') ? c - 'a' + 10
                : (hex && c >= 'A' && c <= 'F') ? c - 'A' + 10
                                                : -1;
        if (v < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
      }
      if (!ok || cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0;
    } else {
      for (const auto& n : kNamed) {
        if (n.name == body) cp = n.cp;
      }
    }
    if (cp == 0) {
      out += s[i];
      continue;
    }
    utf8::append(out, cp);
    i = semi;
  }
  return out;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// %XX sequences are decoded only when the result is valid UTF-8.
inline std::string decode_percent(std::string_view s) {
  if (s.find('%') == std::string_view::npos) return std::string(s);
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return utf8::valid(out) ? out : std::string(s);
}

}  // namespace detail

// Title normalization without namespace handling:
// entities and %XX decoded, underscore and Unicode space runs collapsed to one
// space, bidi marks removed, ends trimmed, first character uppercased when
// `capitalize` is set (MediaWiki's $wgCapitalLinks, on for every Wikipedia).
namespace detail {

inline std::string normalize_once(std::string_view raw, bool capitalize) {
  const std::string decoded = decode_percent(decode_entities(raw));
  std::string out;
  out.reserve(decoded.size());
  bool pending_space = false;
  bool first = true;
  std::size_t pos = 0;
  while (pos < decoded.size()) {
    char32_t cp = utf8::decode(decoded, pos);
    if (cp == 0x200E || cp == 0x200F || cp == 0x202A || cp == 0x202B || cp == 0x202C || cp == 0x202D ||
        cp == 0x202E) {
      continue;
    }
    if (utf8::is_space(cp) || cp == '\n' || cp == '\r') {
      pending_space = !first;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    if (first && capitalize) cp = utf8::to_upper(cp);
    first = false;
    utf8::append(out, cp);
  }
  return out;
}

}  // namespace detail

inline std::string normalize_title_text(std::string_view raw, bool capitalize = true) {
  // Every changing pass strictly shrinks or rewrites toward a fixed point, so
  // iterating makes the function idempotent.
  std::string current = detail::normalize_once(raw, capitalize);
  for (;;) {
    std::string next = detail::normalize_once(current, capitalize);
    if (next == current) return current;
    current = std::move(next);
  }
}

}  // namespace wikimem
