#include "netmom/parallel.hpp"

#include <omp.h>

#include <exception>
#include <mutex>

namespace netmom {

int hardware_threads() { return omp_get_max_threads(); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace netmom
