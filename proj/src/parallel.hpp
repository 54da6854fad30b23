#pragma once

#include <cstddef>
#include <functional>

namespace modalstab::detail {

/// Worker count: MODALSTAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
int thread_count();

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace modalstab::detail
