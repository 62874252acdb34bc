#pragma once

#include "depas/scenario.hpp"

#include <cmath>

namespace test {

/// Small quiet scenario: no arrivals, no scaling, one homogeneous node.
inline depas::ScenarioConfig quiet_config(std::size_t nodes = 1)
{
    depas::ScenarioConfig c;
    c.name = "unit";
    c.duration = 100.0;
    c.warmup = 0.0;
    c.initial_nodes = nodes;
    c.scaling_enabled = false;
    c.capacity = depas::CapacityDistribution::homogeneous(1.0);
    c.workload.constant_rate = 0.0;
    c.workload.transform = {1.0, 1.0};
    return c;
}

/// Three standard deviations of a sample mean.
inline double three_sigma(double variance, double n)
{
    return 3.0 * std::sqrt(variance / n);
}

} // namespace test
