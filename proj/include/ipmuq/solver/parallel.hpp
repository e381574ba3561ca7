/// @file parallel.hpp
/// @brief Static-partition parallel loop over an index range.
#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace ipmuq {

/// Calls fn(i) for i in [0, n) on up to `workers` threads, each owning one
/// contiguous block. If calls throw, the exception of the lowest failing index
/// is rethrown, independent of the worker count.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<int> failed_at(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const int begin = static_cast<int>(static_cast<long>(n) * w / workers);
        const int end = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
        threads.emplace_back([&, w, begin, end] {
            for (int i = begin; i < end; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                    failed_at[static_cast<std::size_t>(w)] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    const auto first = std::min_element(failed_at.begin(), failed_at.end()) - failed_at.begin();
    if (errors[static_cast<std::size_t>(first)]) std::rethrow_exception(errors[static_cast<std::size_t>(first)]);
}

}  // namespace ipmuq
