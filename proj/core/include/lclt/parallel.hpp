#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lclt {

/// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Splits [0, total) into `parts` contiguous ranges whose sizes differ by at most one.
inline IndexRange partition_range(std::size_t total, std::size_t parts, std::size_t index) {
    const std::size_t base = total / parts;
    const std::size_t extra = total % parts;
    const std::size_t begin = index * base + std::min(index, extra);
    return {begin, begin + base + (index < extra ? 1 : 0)};
}

inline std::size_t resolve_workers(std::size_t requested) {
    if (requested != 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs `body(batch_index, accumulator)` for every batch and returns the
/// accumulators in batch order. Batches are dealt to workers round-robin; each
/// batch owns its accumulator, so the result never depends on the worker count.
template <class Acc, class MakeAcc, class Body>
std::vector<Acc> run_batches(std::size_t num_batches, std::size_t workers, MakeAcc make_acc, Body body) {
    std::vector<Acc> accs;
    accs.reserve(num_batches);
    for (std::size_t b = 0; b < num_batches; ++b) accs.push_back(make_acc());

    workers = std::min(resolve_workers(workers), std::max<std::size_t>(1, num_batches));
    if (workers == 1) {
        for (std::size_t b = 0; b < num_batches; ++b) body(b, accs[b]);
        return accs;
    }

    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t b = w; b < num_batches; b += workers) body(b, accs[b]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return accs;
}

} // namespace lclt
