#pragma once

#include <cstddef>
#include <functional>

namespace mdepth {

/// Caps the number of worker threads used by every parallel loop in the
/// library. 0 restores the default (hardware concurrency).
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs body(i) for i in [0, n). Each index is visited exactly once and
/// bodies must only write to slots they own. Nested calls run serially on the
/// calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mdepth
