#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace funcrate {

/// Runs body(block, worker) for every block in [0, block_count) on up to
/// `workers` threads. Blocks are claimed dynamically, so callers that need
/// reproducible results must store per-block output and reduce it in block
/// order afterwards. The first exception thrown by a body is rethrown here.
template <class Body>
void run_blocks(std::size_t block_count, unsigned workers, Body&& body) {
    workers = std::max(1u, workers);
    const auto threads = static_cast<unsigned>(std::min<std::size_t>(workers, block_count));
    if (threads <= 1) {
        for (std::size_t b = 0; b < block_count; ++b) {
            body(b, 0u);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&](unsigned id) {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= block_count || stop.load(std::memory_order_relaxed)) {
                return;
            }
            try {
                body(b, id);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                stop = true;
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned id = 0; id < threads; ++id) {
        pool.emplace_back(worker, id);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace funcrate
