#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace betheperm {

// Runs fn(i) for i in [0, count). Item i always sees the same inputs no matter
// the thread count, so results written by index are deterministic.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(jobs, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace betheperm
