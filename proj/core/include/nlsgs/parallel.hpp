#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nlsgs {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Results
/// are written by index, so the output order never depends on scheduling.
/// The first exception (by index) is rethrown after all tasks finish.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t n, Fn &&fn, unsigned max_threads = 0)
{
  std::vector<Result> out(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned threads = max_threads ? max_threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  auto run = [&](std::size_t i) {
    try
    {
      out[i] = fn(i);
    }
    catch (...)
    {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      run(i);
    }
  }
  else
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
    {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
          run(i);
        }
      });
    }
    for (auto &th : pool)
    {
      th.join();
    }
  }
  for (auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
  return out;
}

}  // namespace nlsgs
