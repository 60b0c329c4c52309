#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace sublevel {

// Runs body(begin, end) over a contiguous partition of [0, count) on up to
// `workers` threads. Results must be written to per-index slots by the body;
// combined with per-index RNG substreams this makes outputs independent of
// the worker count. The lowest-indexed exception wins.
inline void parallel_chunks(std::uint64_t count, int workers,
                            const std::function<void(std::uint64_t, std::uint64_t)>& body) {
    if (count == 0) return;
    if (workers < 1) workers = 1;
    const std::uint64_t w = std::min<std::uint64_t>(workers, count);
    if (w <= 1) {
        body(0, count);
        return;
    }

    std::vector<std::exception_ptr> errors(w, nullptr);
    std::vector<std::thread> threads;
    threads.reserve(w);
    const std::uint64_t chunk = (count + w - 1) / w;
    for (std::uint64_t t = 0; t < w; ++t) {
        const std::uint64_t begin = t * chunk;
        const std::uint64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, t, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace sublevel
