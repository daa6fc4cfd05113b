#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fuzzyalign {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  const std::size_t count = jobs < n ? jobs : n;
  workers.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
}

}  // namespace fuzzyalign
