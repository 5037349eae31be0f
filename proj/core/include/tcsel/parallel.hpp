#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tcsel {

// Runs fn(begin, end) over `workers` contiguous blocks of [0, n). Exceptions
// from any block are rethrown on the calling thread.
template <typename Fn>
void parallel_blocks(std::size_t n, int workers, Fn&& fn) {
  std::size_t blocks = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                                               std::max<std::size_t>(n, 1));
  if (blocks == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(blocks);
  std::vector<std::thread> threads;
  threads.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t begin = n * b / blocks;
    std::size_t end = n * (b + 1) / blocks;
    threads.emplace_back([&, b, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace tcsel
