#pragma once

#include "depas/request.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

namespace depas {

/// Per-request admission limits. hard_limit is the maximum queue length.
struct AdmissionPolicy
{
    std::size_t soft_limit = 2;
    std::size_t hard_limit = 20;
    std::uint32_t forward_limit = 3;
    double max_pending_time = 4.0; // PT_max, seconds

    void validate() const;

    bool operator==(const AdmissionPolicy&) const = default;
};

enum class Admission : std::uint8_t
{
    accept,
    forward,
    reject,
};

/// Accept below the soft limit, or with the hop budget spent and room below
/// the hard limit; forward while above the soft limit and hops remain;
/// otherwise reject.
Admission admit(std::size_t queue_length, std::uint32_t hops, const AdmissionPolicy& policy) noexcept;

/// Requests to move from A to B so that queue/capacity evens out.
/// Positive: A sends to B. Negative: B sends to A.
long exchange_amount(long queue_a, long queue_b, double capacity_a, double capacity_b) noexcept;

using RequestQueue = std::deque<Request>;

/// Removes every request pending longer than max_pending and returns them.
std::vector<Request> expire_pending(RequestQueue& queue, SimTime now, double max_pending);

/// Moves up to n requests from the head (oldest) of `from` to the tail of `to`.
/// Returns the number moved.
std::size_t move_oldest(RequestQueue& from, RequestQueue& to, std::size_t n);

} // namespace depas
