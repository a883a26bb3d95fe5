#include "capflow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "capflow/errors.hpp"

namespace capflow {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) {
  if (n < 1) throw ConfigError("thread count must be positive");
  g_threads = n;
}

int thread_count() { return g_threads; }

int configure_threads_from_env() {
  if (const char* s = std::getenv("CAPFLOW_THREADS")) {
    int n = 0;
    const std::string text(s);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || end != text.data() + text.size())
      throw ConfigError("CAPFLOW_THREADS is not an integer: " + text);
    set_thread_count(n);
  }
  return thread_count();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const auto t = static_cast<std::size_t>(std::max(1, thread_count()));
  if (t == 1 || n < 64) {
    body(0, n);
    return;
  }
  const std::size_t chunks = std::min(t, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(chunks);
  pool.reserve(chunks - 1);
  const std::size_t step = (n + chunks - 1) / chunks;
  auto guarded = [&](std::size_t c, std::size_t b, std::size_t e) {
    try {
      body(b, e);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t b = c * step, e = std::min(n, b + step);
    if (b < e) pool.emplace_back(guarded, c, b, e);
  }
  guarded(0, 0, std::min(n, step));
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace capflow
