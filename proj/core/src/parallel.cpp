#include "striplab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace striplab {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STRIPLAB_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
      // Malformed value: fall through to the hardware default.
    }
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

void parallel_ranges(std::uint64_t count, int workers,
                     const std::function<void(std::uint64_t, std::uint64_t, int)>& body) {
  workers = std::max(1, workers);
  const auto chunks = static_cast<std::uint64_t>(workers);
  if (workers == 1 || count < chunks) {
    body(0, count, 0);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t begin = count * static_cast<std::uint64_t>(w) / chunks;
    const std::uint64_t end = count * static_cast<std::uint64_t>(w + 1) / chunks;
    threads.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace striplab
