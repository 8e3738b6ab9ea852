#pragma once

// Index-ordered parallel map. Results land in slot i regardless of which
// worker computed them, so any reduction done afterwards in index order is
// independent of the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ergo {

/// Worker count used by parallel_map. Defaults to 1.
unsigned worker_count();
void set_worker_count(unsigned workers);

template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, Fn&& fn)
{
    std::vector<Result> out(count);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < count; i = next++)
                        out[i] = fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = count;
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

/// Splits [0, count) into contiguous chunks, one per slot of the result.
struct Chunk {
    std::size_t begin;
    std::size_t end;
};
std::vector<Chunk> make_chunks(std::size_t count, std::size_t max_chunks);

} // namespace ergo
