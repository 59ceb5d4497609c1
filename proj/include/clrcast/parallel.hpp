#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace clrcast {

/// Runs f(i) for i in [0, n) on the OpenMP team. An exception thrown by any
/// iteration is rethrown after the loop; the one with the lowest index wins.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace clrcast
