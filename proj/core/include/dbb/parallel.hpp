#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace dbb {

/// Worker count: explicit request, else DBB_THREADS, else hardware
/// concurrency (at least 1).
int resolve_threads(std::optional<int> requested = std::nullopt);

/// Calls body(i) for i in [0, n) on up to `threads` workers. Index i always
/// writes its own slot, so results do not depend on the thread count. The
/// first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace dbb
