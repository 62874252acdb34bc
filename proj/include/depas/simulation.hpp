#pragma once

#include "depas/analytics.hpp"
#include "depas/autoscaler.hpp"
#include "depas/balancer.hpp"
#include "depas/cloud_env.hpp"
#include "depas/overlay.hpp"
#include "depas/request.hpp"
#include "depas/rng.hpp"
#include "depas/scenario.hpp"
#include "depas/sim_core.hpp"
#include "depas/workload.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

namespace depas {

namespace msg {
struct ClientIssue {};
struct RequestArrival { Request request; };
struct Response { Request request; };
struct ClientTimeout { Request request; };
struct ServiceDone {};
struct GossipTick {};
struct BalanceTick {};
struct ScalerTick {};
struct Boot { NodeId node; };
struct ChurnTick {};
struct Disrupt { double fraction; };
struct Sample {};
} // namespace msg

using Message = std::variant<msg::ClientIssue, msg::RequestArrival, msg::Response, msg::ClientTimeout,
                             msg::ServiceDone, msg::GossipTick, msg::BalanceTick, msg::ScalerTick, msg::Boot,
                             msg::ChurnTick, msg::Disrupt, msg::Sample>;

inline constexpr EntityId client_entity = 0;
inline constexpr EntityId environment_entity = 1;
inline constexpr NodeId first_node_id = 2;

/// One autonomic service.
struct NodeState
{
    NodeId id = 0;
    double capacity = 1.0;
    SimTime born_at = 0.0;
    std::size_t provider = 0;
    RequestQueue queue;
    std::optional<Request> in_service;
    NeighborView view;
    LoadWindow window;
    RngStream rng;
    bool registered = false;
    bool removing = false;

    NodeState(NodeId id_, double capacity_, SimTime born, std::uint64_t seed, std::size_t degree, double window_len)
        : id(id_), capacity(capacity_), born_at(born), view(id_, degree), window(born, window_len), rng(seed, id_)
    {
    }

    /// Requests at this node, waiting or in service.
    std::size_t length() const noexcept { return queue.size() + (in_service ? 1 : 0); }
};

/// Why a request was rejected.
enum class RejectCause : std::size_t
{
    admission,  // full queue and no forwarding budget left
    expired,    // pending longer than the limit
    timeout,    // sent to a node that was gone
    no_entry,   // the DNS had no entry to offer
    drain,      // left behind by a node that removed itself
};
inline constexpr std::size_t reject_cause_count = 5;

/// Counters the tests and the acceptance suite inspect.
struct SimulationStats
{
    std::array<std::size_t, reject_cause_count> rejected_by_cause{};
    std::size_t provisioned = 0;
    std::size_t provision_refused = 0;
    std::size_t removals = 0;
    std::size_t removal_refused = 0;
    std::size_t failures = 0;
    std::size_t forwarded = 0;
    std::size_t transferred = 0;
    std::size_t drained = 0;
    std::size_t connectivity_snapshots = 0;
    std::size_t connected_snapshots = 0;
};

/// A full DEPAS deployment driven by the discrete-event engine.
class Simulation
{
public:
    Simulation(const ScenarioConfig& config, std::uint64_t seed);
    Simulation(const ScenarioConfig& config, std::uint64_t seed, std::shared_ptr<const ArrivalProcess> arrivals);

    /// Deploys the initial nodes, runs to the configured duration and returns the metrics.
    RunResult run();

    /// Lower-level driving, used by tests.
    void start();
    void advance_to(SimTime t);
    RunResult finish();

    SimTime now() const noexcept { return engine_.now(); }
    const ScenarioConfig& config() const noexcept { return config_; }
    const SimulationStats& stats() const noexcept { return stats_; }
    MetricsRecorder& metrics() noexcept { return metrics_; }
    DnsRegistry& dns() noexcept { return dns_; }
    Engine<Message>& engine() noexcept { return engine_; }

    std::size_t live_count() const noexcept { return live_.size(); }
    const std::vector<NodeId>& live_ids() const noexcept { return live_; }
    NodeState* node(NodeId id) noexcept;
    const NodeState* node(NodeId id) const noexcept;
    bool is_live(NodeId id) const noexcept { return node(id) != nullptr; }

    /// Creates a node immediately (initial deployment and tests).
    NodeId spawn(double capacity, const NeighborView* bootstrap = nullptr, bool register_dns = false);

    /// Current windowed load of a node.
    double load_of(NodeState& n);
    ViewEntry self_entry(NodeState& n);

    // Node behaviour.
    void on_request(NodeState& n, Request request);
    void process_next(NodeState& n);
    void replicate(NodeState& n, std::size_t count);
    void self_remove(NodeState& n);
    std::size_t fail(NodeId id);
    void balance_step(NodeState& n);
    void gossip_step(NodeState& n);
    void depas_tick(NodeState& n);
    std::size_t expire(NodeState& n);

    /// Injects a client request addressed to `target` as if resolved by DNS.
    void inject_request(NodeId target);

    /// True when the overlay restricted to live nodes is weakly connected.
    bool overlay_connected() const;

    /// Called for every delivered event, after it is handled (tests, tracing).
    std::function<void(SimTime, EntityId, std::size_t)> on_trace;

private:
    void dispatch(const Engine<Message>::Event& ev);
    void dropped(const Engine<Message>::Event& ev);
    void on_client(const Engine<Message>::Event& ev);
    void on_environment(const Engine<Message>::Event& ev);
    void on_node(NodeState& n, const Engine<Message>::Event& ev);

    void issue_request();
    void start_node_timers(NodeState& n);
    void complete_service(NodeState& n);
    void deprovision(NodeState& n);
    void accept(NodeState& n, Request request);
    void reject(Request request, RejectCause cause);
    void boot(NodeId id);
    void sample();
    void try_register(NodeState& n);
    void add_live(NodeId id);
    void remove_live(NodeId id);
    std::size_t active_count() const noexcept;

    ScenarioConfig config_;
    std::uint64_t seed_;
    std::shared_ptr<const ArrivalProcess> arrivals_;
    Engine<Message> engine_;
    MetricsRecorder metrics_;
    DnsRegistry dns_;
    SimulationStats stats_;

    RngStream workload_rng_;
    RngStream churn_rng_;
    RngStream capacity_rng_;
    RngStream provider_rng_;
    RngStream disruption_rng_;

    std::vector<std::unique_ptr<NodeState>> nodes_; // indexed by id
    std::vector<NodeId> live_;
    std::vector<std::uint32_t> live_pos_;
    struct PendingBoot
    {
        double capacity;
        std::size_t provider;
        NeighborView view;
    };
    std::unordered_map<NodeId, PendingBoot> booting_;
    NodeId next_id_ = first_node_id;
    RequestId next_request_ = 1;
    std::size_t removing_count_ = 0;
    bool started_ = false;
};

/// Runs one seed of a scenario; `arrivals` may be shared across runs.
RunResult run_once(const ScenarioConfig& config, std::uint64_t seed,
                   std::shared_ptr<const ArrivalProcess> arrivals = nullptr);

/// Runs every configured seed (optionally on several threads) and aggregates.
RunAggregate run_scenario(const ScenarioConfig& config, std::size_t threads = 1,
                          std::vector<RunResult>* per_run = nullptr);

std::shared_ptr<const ArrivalProcess> make_arrivals(const ScenarioConfig& config);

} // namespace depas
