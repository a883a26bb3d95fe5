#pragma once

#include <cstddef>
#include <functional>

namespace capflow {

// Worker count for node-parallel loops; 1 runs inline.
void set_thread_count(int n);
int thread_count();
// Reads CAPFLOW_THREADS if set; returns the resulting count.
int configure_threads_from_env();

// Calls body(begin, end) over contiguous chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace capflow
