#pragma once

#include "depas/overlay.hpp"
#include "depas/rng.hpp"
#include "depas/sim_core.hpp"

#include <cstddef>
#include <deque>
#include <span>

namespace depas {

/// Load band and timing of the per-node scaling loop. Loads are fractions of capacity.
struct ScalerParams
{
    double l_min = 0.6;
    double l_max = 0.8;
    double l_des = 0.7;
    double period = 5.0; // T_s
    double window = 5.0; // T_m

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;

    bool operator==(const ScalerParams&) const = default;
};

/// Arrivals observed by one node over [window_start, window_end].
struct LoadSample
{
    SimTime window_start = 0.0;
    SimTime window_end = 0.0;
    double arrivals = 0.0;
    double capacity = 1.0;

    double load() const noexcept
    {
        const double len = window_end - window_start;
        if (len <= 0.0 || arrivals <= 0.0) {
            return 0.0;
        }
        return arrivals / (capacity * len);
    }
};

/// Sliding record of request arrivals used to compute a node's own load.
/// Counts may be negative (requests handed away by dimension exchange).
class LoadWindow
{
public:
    LoadWindow() = default;
    LoadWindow(SimTime born_at, double length) : born_at_(born_at), length_(length) {}

    void record(SimTime t, int count = 1);
    LoadSample sample(SimTime now, double capacity);

private:
    void evict(SimTime now);

    SimTime born_at_ = 0.0;
    double length_ = 5.0;
    std::deque<std::pair<SimTime, int>> marks_;
    long total_ = 0;
};

/// A neighbor's (or the node's own) advertised capacity and load.
struct LoadHint
{
    double capacity = 1.0;
    double load = 0.0;
};

/// Capacity-weighted mean load over the node itself plus its neighbors.
double neighborhood_load(LoadHint self, std::span<const LoadHint> neighbors);
double neighborhood_load(LoadHint self, std::span<const ViewEntry> neighbors);

/// Relative distance of the estimated load from the desired load.
double compute_ratio(double l_tilde, double l_des);

/// True when the node should remove itself; the probability is |ratio|.
bool analyze_removal(double ratio, RngStream& rng);

/// Number of services to add: floor(ratio) plus one more with probability frac(ratio).
std::size_t analyze_addition(double ratio, RngStream& rng);

struct ScalingDecision
{
    enum class Kind { none, remove, add };
    Kind kind = Kind::none;
    std::size_t count = 0;
    double ratio = 0.0;
};

/// One pass of the decision loop given the neighborhood load estimate.
ScalingDecision decide_scaling(double l_tilde, const ScalerParams& params, RngStream& rng);

} // namespace depas
