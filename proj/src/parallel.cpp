#include "edstereo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace edstereo {
namespace {

std::atomic<int> g_override{0};

int workers_from_env() {
  const char* env = std::getenv("ED_STEREO_THREADS");
  if (env != nullptr && *env != '\0') {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // unparsable values fall back to auto
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int worker_count() {
  int forced = g_override.load();
  return forced > 0 ? forced : workers_from_env();
}

ScopedWorkerCount::ScopedWorkerCount(int workers)
    : previous_(g_override.exchange(std::max(1, workers))) {}

ScopedWorkerCount::~ScopedWorkerCount() { g_override.store(previous_); }

void parallel_for_ranges(int count,
                         const std::function<void(int, int)>& body) {
  if (count <= 0) return;
  const int workers = std::min(worker_count(), count);
  if (workers == 1) {
    body(0, count);
    return;
  }

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(count) * w / workers);
    const int end = static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
    threads.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace edstereo
