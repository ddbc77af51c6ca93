#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace contraverify {

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to per-index slots; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn)
{
  std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1)
  {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
  {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++)
      {
        try
        {
          fn(i);
        }
        catch (...)
        {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace contraverify
