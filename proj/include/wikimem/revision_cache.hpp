#pragma once

// On-disk revision cache.
//
// Layout: {root}/{lang}/{title-hash}/revisions.dat plus meta.json. The data
// file is append-only; each record is
//
//   u32 magic 'WMR1' | u32 payload length | u32 CRC-32 of payload | payload
//   payload = u64 rev_id | i64 unix seconds | u64 size | u8 has_content | text
//
// all little-endian. meta.json is rewritten atomically after each append and
// carries the record count, so a torn append is detected on read.

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimem/article.hpp"
#include "wikimem/error.hpp"
#include "wikimem/hash.hpp"
#include "wikimem/time.hpp"

namespace wikimem {

struct CacheMeta {
  ArticleRef article;
  std::optional<Timestamp> fetched_since;
  std::optional<Timestamp> fetched_until;
  std::uint64_t record_count = 0;
};

namespace detail {

inline constexpr std::uint32_t kRecordMagic = 0x31524D57;  // "WMR1"

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}
inline std::uint64_t get_le(std::string_view s, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[pos + i]);
  return v;
}

inline std::string encode_record(const RevisionRecord& rev) {
  std::string payload;
  put_u64(payload, rev.rev_id);
  put_u64(payload, static_cast<std::uint64_t>(rev.timestamp.time_since_epoch().count()));
  put_u64(payload, rev.size_bytes);
  payload += static_cast<char>(rev.wikitext ? 1 : 0);
  if (rev.wikitext) payload += *rev.wikitext;
  std::string record;
  put_u32(record, kRecordMagic);
  put_u32(record, static_cast<std::uint32_t>(payload.size()));
  put_u32(record, crc32_of(payload));
  record += payload;
  return record;
}

// RAII advisory lock on a file (one writer per cache key).
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) : fd_(::open(path.c_str(), O_RDWR | O_CREAT, 0644)) {
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
      if (fd_ >= 0) ::close(fd_);
      throw Error(ErrorKind::Config, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Config, "cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace detail

class RevisionCache {
 public:
  explicit RevisionCache(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path article_dir(const ArticleRef& article) const {
    return root_ / article.lang / sha256_hex(article.title).substr(0, 16);
  }

  bool contains(const ArticleRef& article) const {
    return std::filesystem::exists(article_dir(article) / "meta.json");
  }

  // Appends revisions not yet stored (or stored without content). `revisions`
  // must be ascending by timestamp.
  void put(const ArticleRef& article, const std::vector<RevisionRecord>& revisions,
           std::optional<Timestamp> fetched_since = std::nullopt,
           std::optional<Timestamp> fetched_until = std::nullopt) {
    for (std::size_t i = 1; i < revisions.size(); ++i) {
      if (revisions[i].timestamp < revisions[i - 1].timestamp) {
        throw Error(ErrorKind::Config, "store_put requires ascending revisions");
      }
    }
    const auto dir = article_dir(article);
    std::filesystem::create_directories(dir);
    detail::FileLock lock(dir / ".lock");

    CacheMeta meta{article, fetched_since, fetched_until, 0};
    std::map<std::uint64_t, bool> stored;  // rev_id -> has content
    if (std::filesystem::exists(dir / "meta.json")) {
      const CacheMeta old = read_meta(article);
      for (const auto& rev : read_records(dir, old.record_count)) {
        stored[rev.rev_id] = stored[rev.rev_id] || rev.wikitext.has_value();
      }
      meta.record_count = old.record_count;
      meta.fetched_since = min_opt(old.fetched_since, fetched_since);
      meta.fetched_until = max_opt(old.fetched_until, fetched_until);
    }

    std::string appended;
    for (const auto& rev : revisions) {
      auto it = stored.find(rev.rev_id);
      if (it != stored.end() && (it->second || !rev.wikitext)) continue;
      appended += detail::encode_record(rev);
      stored[rev.rev_id] = rev.wikitext.has_value();
      ++meta.record_count;
    }
    if (!appended.empty()) {
      std::ofstream out(dir / "revisions.dat", std::ios::binary | std::ios::app);
      out.write(appended.data(), static_cast<std::streamsize>(appended.size()));
      out.flush();
      if (!out) throw Error(ErrorKind::Config, "cannot append to " + (dir / "revisions.dat").string());
    } else if (!std::filesystem::exists(dir / "revisions.dat")) {
      std::ofstream(dir / "revisions.dat", std::ios::binary);
    }
    write_meta(dir, meta);
  }

  // Stored revisions ascending by timestamp; a record with content supersedes
  // an earlier content-less record of the same revision.
  std::vector<RevisionRecord> get(const ArticleRef& article) const {
    const auto dir = article_dir(article);
    if (!std::filesystem::exists(dir / "meta.json") && !std::filesystem::exists(dir / "revisions.dat")) {
      throw Error(ErrorKind::CacheMiss, article.to_string());
    }
    const CacheMeta meta = read_meta(article);
    std::map<std::uint64_t, RevisionRecord> merged;
    for (auto& rev : read_records(dir, meta.record_count)) {
      auto it = merged.find(rev.rev_id);
      if (it == merged.end() || (rev.wikitext && !it->second.wikitext)) merged[rev.rev_id] = std::move(rev);
    }
    std::vector<RevisionRecord> out;
    out.reserve(merged.size());
    for (auto& [id, rev] : merged) out.push_back(std::move(rev));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.rev_id < b.rev_id;
    });
    return out;
  }

  CacheMeta read_meta(const ArticleRef& article) const {
    const auto path = article_dir(article) / "meta.json";
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::CorruptRecord, "missing meta.json for " + article.to_string());
    const auto json = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (json.is_discarded() || !json.contains("record_count")) {
      throw Error(ErrorKind::CorruptRecord, "unreadable meta.json for " + article.to_string());
    }
    CacheMeta meta{ArticleRef{json.value("lang", article.lang), json.value("title", article.title)}, {}, {},
                   json["record_count"].get<std::uint64_t>()};
    if (json.contains("fetched_since")) meta.fetched_since = parse_timestamp(json["fetched_since"].get<std::string>());
    if (json.contains("fetched_until")) meta.fetched_until = parse_timestamp(json["fetched_until"].get<std::string>());
    if (meta.article != article) throw Error(ErrorKind::CorruptRecord, "cache key collision for " + article.to_string());
    return meta;
  }

  // Small JSON side files (language links, redirect lists) next to the revisions.
  void put_json(const ArticleRef& article, const std::string& name, const nlohmann::json& value) {
    const auto dir = article_dir(article);
    std::filesystem::create_directories(dir);
    nlohmann::json wrapped = {{"lang", article.lang}, {"title", article.title}, {"value", value}};
    detail::write_file_atomic(dir / (name + ".json"), wrapped.dump(1) + "\n");
  }

  std::optional<nlohmann::json> get_json(const ArticleRef& article, const std::string& name) const {
    const auto path = article_dir(article) / (name + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    auto json = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (json.is_discarded() || !json.contains("value")) {
      throw Error(ErrorKind::CorruptRecord, path.string());
    }
    return json["value"];
  }

 private:
  static std::optional<Timestamp> min_opt(std::optional<Timestamp> a, std::optional<Timestamp> b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
  }
  static std::optional<Timestamp> max_opt(std::optional<Timestamp> a, std::optional<Timestamp> b) {
    if (!a) return b;
    if (!b) return a;
    return std::max(*a, *b);
  }

  static void write_meta(const std::filesystem::path& dir, const CacheMeta& meta) {
    nlohmann::json json = {{"format", 1},
                           {"lang", meta.article.lang},
                           {"title", meta.article.title},
                           {"record_count", meta.record_count}};
    if (meta.fetched_since) json["fetched_since"] = format_timestamp(*meta.fetched_since);
    if (meta.fetched_until) json["fetched_until"] = format_timestamp(*meta.fetched_until);
    detail::write_file_atomic(dir / "meta.json", json.dump(1) + "\n");
  }

  static std::vector<RevisionRecord> read_records(const std::filesystem::path& dir, std::uint64_t expected) {
    const auto path = dir / "revisions.dat";
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::CorruptRecord, "missing " + path.string());
    const std::string data = detail::read_file(path);
    std::vector<RevisionRecord> out;
    std::size_t pos = 0;
    const auto corrupt = [&](const std::string& why) {
      return Error(ErrorKind::CorruptRecord, path.string() + " record " + std::to_string(out.size()) + ": " + why);
    };
    while (pos < data.size()) {
      if (data.size() - pos < 12) throw corrupt("truncated header");
      if (detail::get_le(data, pos, 4) != detail::kRecordMagic) throw corrupt("bad magic");
      const auto length = detail::get_le(data, pos + 4, 4);
      const auto crc = static_cast<std::uint32_t>(detail::get_le(data, pos + 8, 4));
      if (data.size() - pos - 12 < length) throw corrupt("truncated payload");
      const std::string_view payload = std::string_view(data).substr(pos + 12, length);
      if (crc32_of(payload) != crc) throw corrupt("checksum mismatch");
      if (payload.size() < 25) throw corrupt("short payload");
      RevisionRecord rev;
      rev.rev_id = detail::get_le(payload, 0, 8);
      rev.timestamp = Timestamp{std::chrono::seconds{static_cast<std::int64_t>(detail::get_le(payload, 8, 8))}};
      rev.size_bytes = detail::get_le(payload, 16, 8);
      if (payload[24] == 1) {
        rev.wikitext = std::string(payload.substr(25));
      } else if (payload.size() != 25) {
        throw corrupt("content bytes on a content-less record");
      }
      out.push_back(std::move(rev));
      pos += 12 + length;
    }
    if (out.size() != expected) {
      throw Error(ErrorKind::CorruptRecord, path.string() + ": " + std::to_string(out.size()) +
                                                " records on disk, meta.json says " + std::to_string(expected));
    }
    return out;
  }

  std::filesystem::path root_;
};

}  // namespace wikimem
