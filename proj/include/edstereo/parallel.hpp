#pragma once

#include <functional>

namespace edstereo {

/// Number of workers kernels may use. Reads ED_STEREO_THREADS
/// (0 or unset = hardware concurrency) unless an override is active.
int worker_count();

/// Pins worker_count() for the lifetime of the object. Used by tests that
/// check determinism across worker counts.
class ScopedWorkerCount {
public:
  explicit ScopedWorkerCount(int workers);
  ~ScopedWorkerCount();
  ScopedWorkerCount(const ScopedWorkerCount&) = delete;
  ScopedWorkerCount& operator=(const ScopedWorkerCount&) = delete;

private:
  int previous_;
};

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on
/// each, one chunk per worker. Exceptions from workers are rethrown.
void parallel_for_ranges(int count,
                         const std::function<void(int begin, int end)>& body);

}  // namespace edstereo
