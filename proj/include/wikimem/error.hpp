#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wikimem {

enum class ErrorKind {
  PageMissing,
  RateLimited,
  Transport,
  Truncated,
  CacheMiss,
  CorruptRecord,
  NoRevisionInSpan,
  DegenerateInput,
  MissingArticle,
  ShapeMismatch,
  NothingToReport,
  MissingContent,
  Config,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PageMissing: return "PageMissing";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::CacheMiss: return "CacheMiss";
    case ErrorKind::CorruptRecord: return "CorruptRecord";
    case ErrorKind::NoRevisionInSpan: return "NoRevisionInSpan";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::MissingArticle: return "MissingArticle";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NothingToReport: return "NothingToReport";
    case ErrorKind::MissingContent: return "MissingContent";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

// Single exception type for the toolkit; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Prefix the message with the operation that was running, e.g. "deliberate".
  Error with_context(std::string_view context) const {
    Error copy = *this;
    copy.context_ = std::string(context) + ": " + context_;
    return copy;
  }

  std::string describe() const { return context_ + what(); }

 private:
  ErrorKind kind_;
  std::string context_;
};

}  // namespace wikimem
