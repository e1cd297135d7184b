#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace wikimem {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
  std::optional<std::chrono::seconds> retry_after;
};

// Abstract GET transport. Implementations throw Error(ErrorKind::Transport)
// when no HTTP response could be obtained at all.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const QueryParams& params, const std::string& user_agent) = 0;
};

// Spaces request starts at least `min_interval` apart across all callers.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(double requests_per_second)
      : min_interval_(requests_per_second > 0
                          ? std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(1.0 / requests_per_second))
                          : Clock::duration::zero()) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    if (next_slot_ > Clock::now()) std::this_thread::sleep_until(next_slot_);
    // From the actual start, so an overslept wait does not shorten the next gap.
    next_slot_ = Clock::now() + min_interval_;
  }

  Clock::duration min_interval() const { return min_interval_; }

 private:
  std::mutex mutex_;
  Clock::duration min_interval_;
  Clock::time_point next_slot_{};
};

}  // namespace wikimem
