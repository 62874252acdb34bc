#pragma once

#include "depas/sim_core.hpp"

#include <cstddef>
#include <cstdint>

namespace depas {

/// Outcome of a central-queue cluster run.
struct MmmResult
{
    double mean_response = 0.0;
    std::size_t completed = 0;
};

/// Plain M/M/m cluster behind a perfect router: one FIFO queue, m identical
/// servers of rate mu, Poisson arrivals of rate lambda. A request travels
/// client -> router and server -> client, each hop costing `latency`.
/// The first `discard` completions are dropped as warmup.
MmmResult simulate_mmm(std::size_t m, double lambda, double mu, std::size_t completions, std::uint64_t seed,
                       ConstantLatency latency = {0.0}, std::size_t discard = 1000);

} // namespace depas
