#pragma once

#include "depas/overlay.hpp"
#include "depas/rng.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace depas {

struct CapacityClass
{
    double probability = 1.0;
    double capacity = 1.0; // req/sec

    bool operator==(const CapacityClass&) const = default;
};

/// Mixture from which new services draw their capacity.
struct CapacityDistribution
{
    std::vector<CapacityClass> classes{{1.0, 1.0}};

    void validate() const;
    double sample(RngStream& rng) const;
    double mean() const noexcept;

    static CapacityDistribution homogeneous(double capacity = 1.0) { return {{{1.0, capacity}}}; }

    bool operator==(const CapacityDistribution&) const = default;
};

/// Continuous random failures: every `period` seconds inside [start, end] each
/// live node fails independently with probability p_fail.
struct ChurnParams
{
    double p_fail = 0.0;
    double period = 10.0;
    double start = 0.0;
    double end = std::numeric_limits<double>::infinity();

    void validate() const;
    bool enabled() const noexcept { return p_fail > 0.0; }

    bool operator==(const ChurnParams&) const = default;
};

/// Simultaneous kill of a fraction of the live nodes.
struct DisruptiveEvent
{
    double at = 200.0;
    double fraction = 0.3;

    void validate() const;

    bool operator==(const DisruptiveEvent&) const = default;
};

struct CloudParams
{
    std::vector<std::string> providers{"cloud-a", "cloud-b", "cloud-c"};
    double boot_delay = 1.0;
    std::size_t min_nodes = 1;
    std::size_t max_nodes = 0; // 0 = unlimited
    std::size_t dns_entries = 30;
    double registration_probability = 0.1;

    void validate() const;

    bool operator==(const CloudParams&) const = default;
};

/// Round-robin DNS with a bounded entry list. Dead entries are only purged
/// when a registration finds the list full.
class DnsRegistry
{
public:
    explicit DnsRegistry(std::size_t max_entries = 30) : max_entries_(max_entries) {}

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t max_entries() const noexcept { return max_entries_; }
    std::span<const NodeId> entries() const noexcept { return entries_; }
    bool contains(NodeId node) const noexcept;

    /// Registers `node`; when full, first drops entries for which `alive` is false.
    bool try_register(NodeId node, const std::function<bool(NodeId)>& alive);
    void unregister(NodeId node);

    /// Next entry in round-robin order; nullopt when empty.
    std::optional<NodeId> resolve();

private:
    void erase_at(std::size_t i);

    std::size_t max_entries_;
    std::vector<NodeId> entries_;
    std::size_t cursor_ = 0;
};

/// Nodes that fail in one churn round.
std::vector<NodeId> churn_failures(std::span<const NodeId> live, double p_fail, RngStream& rng);

/// round(fraction * |live|) nodes sampled uniformly without replacement.
std::vector<NodeId> disruption_victims(std::span<const NodeId> live, double fraction, RngStream& rng);

} // namespace depas
