#pragma once

#include <cstddef>
#include <functional>

namespace ksnd {

/// Worker count used by parallel_for. Defaults to 1; set once from the CLI.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker and
/// results are written by index, so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ksnd
