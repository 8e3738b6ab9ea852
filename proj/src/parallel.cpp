#include "ergo/parallel.hpp"

#include <atomic>

namespace ergo {

namespace {
std::atomic<unsigned> g_workers{1};
}

unsigned worker_count()
{
    return g_workers.load(std::memory_order_relaxed);
}

void set_worker_count(unsigned workers)
{
    g_workers.store(workers == 0 ? 1 : workers, std::memory_order_relaxed);
}

std::vector<Chunk> make_chunks(std::size_t count, std::size_t max_chunks)
{
    std::vector<Chunk> chunks;
    if (count == 0)
        return chunks;
    std::size_t pieces = std::min(count, std::max<std::size_t>(max_chunks, 1));
    std::size_t base = count / pieces, extra = count % pieces, at = 0;
    for (std::size_t p = 0; p < pieces; ++p) {
        std::size_t len = base + (p < extra ? 1 : 0);
        chunks.push_back({at, at + len});
        at += len;
    }
    return chunks;
}

} // namespace ergo
