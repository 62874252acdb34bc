#pragma once

#include "depas/autoscaler.hpp"
#include "depas/balancer.hpp"
#include "depas/cloud_env.hpp"
#include "depas/overlay.hpp"
#include "depas/sim_core.hpp"
#include "depas/workload.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace depas {

/// Where client requests come from. `trace` is a file path or "builtin:town-hall";
/// when `constant_rate` is set the trace is ignored.
struct WorkloadConfig
{
    std::string trace = "builtin:town-hall";
    std::optional<double> constant_rate;
    TraceTransform transform{1.0, town_hall_time_scale};

    bool operator==(const WorkloadConfig&) const = default;
};

struct ScenarioConfig
{
    std::string name = "scenario";
    double duration = 2700.0;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    std::vector<std::uint64_t> seeds; // explicit per-run seeds; derived from `seed` when empty
    std::size_t initial_nodes = 10;
    double warmup = 30.0;

    bool scaling_enabled = true;
    ScalerParams scaler;
    AdmissionPolicy admission;
    OverlayParams overlay;
    double balance_period = 0.3;
    bool dimension_exchange = true;
    ConstantLatency latency;
    CloudParams cloud;
    CapacityDistribution capacity;
    WorkloadConfig workload;
    ChurnParams churn;
    std::vector<DisruptiveEvent> disruptions;

    /// Check weak connectivity of the overlay at every one-second sample.
    bool track_connectivity = false;

    /// Mean service time of a capacity-1 node (mu); a node of capacity C serves in mean mu / C.
    double mean_service_time = 1.0;

    /// Throws std::invalid_argument naming the key and constraint.
    void validate() const;

    /// Seeds of the configured runs.
    std::vector<std::uint64_t> run_seeds() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parses the JSON scenario format; unknown keys and invariant violations are errors.
ScenarioConfig parse_config(const std::string& text, const std::string& source_name = "config");
ScenarioConfig parse_config_file(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);

/// Names of the packaged scenarios, in presentation order.
const std::vector<std::string>& preset_names();
std::optional<ScenarioConfig> preset(const std::string& name);

/// The reference capacity mixture: 50% at 0.5, 30% at 1.83, 20% at 1.0 req/s.
CapacityDistribution reference_capacity_mixture();

/// Materializes the configured workload.
RateTrace resolve_trace(const ScenarioConfig& config);

} // namespace depas
