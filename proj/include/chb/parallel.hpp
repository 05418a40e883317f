#pragma once

#include <cstddef>
#include <functional>

namespace chb {

/// Worker count used by parallel_for; 0 restores the default (hardware cores).
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs fn(i) for i in [0, count). Work items must be independent; each item's
/// own arithmetic is sequential, so results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace chb
