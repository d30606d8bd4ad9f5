#pragma once

#include <functional>

namespace netmom {

int hardware_threads();

// OpenMP loop over [0, n) with exception capture: the first exception thrown
// by fn is rethrown after the region ends. fn(i) must write disjoint state.
// threads <= 1 runs the plain serial loop.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace netmom
