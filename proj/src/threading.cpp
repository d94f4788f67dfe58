#include "kadtk/threading.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace kadtk {

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

namespace {
std::atomic<int> g_default_threads{0};
}

void set_default_threads(int n) { g_default_threads.store(n < 0 ? 0 : n); }

int default_threads() { return g_default_threads.load(); }

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : g_default_threads.load();
  if (n <= 0) n = hardware_threads();
  return n;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<bool> failed{false};
  std::exception_ptr first_error;

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::atomic<int> error_guard{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < count;
             i += static_cast<std::size_t>(workers)) {
          if (failed.load(std::memory_order_relaxed)) return;
          body(i);
        }
      } catch (...) {
        if (error_guard.fetch_add(1) == 0) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kadtk
