#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lclt/graph.hpp"
#include "lclt/parallel.hpp"

namespace lclt {

/// How a Monte Carlo run is carved up. Sample i is always drawn from stream i,
/// and batch b always covers the same contiguous sample range, so results are
/// identical for any worker count.
struct SamplingPlan {
    std::size_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t batches = 30;
    std::size_t workers = 1;
    std::uint64_t stream_offset = 0;
};

/// Calls visit(acc, triangle_count) for every sample of the plan, in sample
/// order within each batch, and returns the batch accumulators in batch order.
template <class Acc, class MakeAcc, class Visit>
std::vector<Acc> sample_triangle_counts(const SamplingPlan& plan, MakeAcc make_acc, Visit visit) {
    return run_batches<Acc>(plan.batches, plan.workers, make_acc, [&](std::size_t batch, Acc& acc) {
        const IndexRange range = partition_range(plan.samples, plan.batches, batch);
        GnpSample g;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            sample_gnp_into(g, plan.n, plan.p, plan.seed, plan.stream_offset + i);
            visit(acc, count_triangles(g));
        }
    });
}

} // namespace lclt
