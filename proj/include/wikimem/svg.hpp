#pragma once

// Small deterministic SVG builder. Coordinates are printed with two decimals
// so output bytes do not depend on the platform's float printing.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "wikimem/csv.hpp"
#include "wikimem/title.hpp"

namespace wikimem::svg {

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default:
        // XML 1.0 forbids most C0 controls.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') {
          out += ' ';
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline bool is_rtl(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const char32_t cp = utf8::decode(s, pos);
    if ((cp >= 0x0590 && cp <= 0x08FF) || (cp >= 0xFB1D && cp <= 0xFDFF) || (cp >= 0xFE70 && cp <= 0xFEFF)) {
      return true;
    }
  }
  return false;
}

inline std::string num(double v) { return format_number(v, 2); }

struct Rgb {
  int r, g, b;
};

inline std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

// Linear ramp from white to dark blue over t in [0,1].
inline std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  constexpr Rgb lo{255, 255, 255}, hi{8, 48, 107};
  auto mix = [&](int a, int b) { return static_cast<int>(a + (b - a) * t + 0.5); };
  return hex({mix(lo.r, hi.r), mix(lo.g, hi.g), mix(lo.b, hi.b)});
}

inline std::string_view palette(std::size_t i) {
  static constexpr std::string_view colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % std::size(colors)];
}

class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void raw(std::string_view s) {
    body_ += s;
    body_ += '\n';
  }

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view extra = {}) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + std::string(fill) + "\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }

  // anchor: start | middle | end. Right-to-left text gets explicit direction.
  void text(double x, double y, std::string_view s, std::string_view anchor = "start", double size = 11,
            std::string_view extra = {}) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) + "\" text-anchor=\"" +
             std::string(anchor) + "\"";
    if (is_rtl(s)) body_ += " direction=\"rtl\" unicode-bidi=\"embed\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += ">" + escape(s) + "</text>\n";
  }

  std::string str(std::string_view title) const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width_) + "\" height=\"" +
           num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\" font-family=\"sans-serif\">\n";
    out += "<title>" + escape(title) + "</title>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) + "\" fill=\"#ffffff\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  double width_, height_;
  std::string body_;
};

}  // namespace wikimem::svg
