#pragma once

#include "rosen/numeric.hpp"

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace rosen {

/**
 * Run `fn(block)` for block = 0..n_blocks-1 across a few threads and hand
 * the per-block results back in block order, so merges are deterministic.
 * The working precision must not be changed while blocks are in flight.
 */
template <typename Result>
std::vector<Result> run_blocks(int n_blocks, const std::function<Result(int)>& fn) {
    std::vector<Result> results(static_cast<std::size_t>(n_blocks));
    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = static_cast<int>(hw ? hw : 1);
    if (n_threads > n_blocks) n_threads = n_blocks;
    if (n_threads <= 1) {
        for (int b = 0; b < n_blocks; ++b) results[static_cast<std::size_t>(b)] = fn(b);
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    unsigned digits = Real::default_precision();
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            Real::default_precision(digits);
            try {
                for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    results[static_cast<std::size_t>(b)] = fn(b);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace rosen
