#pragma once

#include <cstddef>
#include <functional>

namespace kadtk {

int hardware_threads();

/// Process-wide default worker count; 0 means "all hardware threads".
/// The CLI sets this from --threads / KADTK_THREADS.
void set_default_threads(int n);
int default_threads();

/// Resolve an explicit request (0 = use default) to a concrete count >= 1.
int resolve_threads(int requested);

/// Run body(i) for i in [0, count) on up to `threads` workers with a static
/// strided partition. Each index is executed exactly once; which worker runs
/// it never affects what it computes, so results are independent of the
/// worker count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace kadtk
