#pragma once

#include "depas/sim_core.hpp"

#include <cstdint>
#include <vector>

namespace depas {

using RequestId = std::uint64_t;

enum class RequestState : std::uint8_t
{
    in_flight,
    queued,
    processing,
    processed,
    rejected,
    lost,
};

/// A client job. `visited` starts with the entry node; hops == visited.size() - 1
/// once the request has reached a node.
struct Request
{
    RequestId id = 0;
    EntityId client = 0;
    SimTime issue_time = 0.0;
    SimTime enqueue_time = 0.0;
    std::uint32_t hops = 0;
    std::vector<EntityId> visited;
    RequestState state = RequestState::in_flight;
};

} // namespace depas
