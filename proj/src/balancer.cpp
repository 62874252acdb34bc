#include "depas/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace depas {

void AdmissionPolicy::validate() const
{
    if (soft_limit == 0) {
        throw std::invalid_argument("admission.soft_limit: must be > 0");
    }
    if (soft_limit > hard_limit) {
        throw std::invalid_argument("admission.soft_limit: must be <= hard_limit");
    }
    if (!(max_pending_time > 0.0)) {
        throw std::invalid_argument("admission.max_pending_time: must be > 0");
    }
}

Admission admit(std::size_t queue_length, std::uint32_t hops, const AdmissionPolicy& policy) noexcept
{
    const bool hops_left = hops < policy.forward_limit;
    if (queue_length < policy.soft_limit) {
        return Admission::accept;
    }
    if (hops_left) {
        return Admission::forward;
    }
    return queue_length < policy.hard_limit ? Admission::accept : Admission::reject;
}

long exchange_amount(long queue_a, long queue_b, double capacity_a, double capacity_b) noexcept
{
    const double exact = (static_cast<double>(queue_a) * capacity_b - static_cast<double>(queue_b) * capacity_a)
                         / (capacity_a + capacity_b);
    // Absorb representation error so that exact integers are not floored down by one.
    return static_cast<long>(std::floor(exact + 1e-9));
}

std::vector<Request> expire_pending(RequestQueue& queue, SimTime now, double max_pending)
{
    std::vector<Request> expired;
    auto stale = [&](const Request& r) { return now - r.enqueue_time > max_pending; };
    if (std::none_of(queue.begin(), queue.end(), stale)) {
        return expired;
    }
    RequestQueue kept;
    for (auto& r : queue) {
        if (stale(r)) {
            r.state = RequestState::rejected;
            expired.push_back(std::move(r));
        } else {
            kept.push_back(std::move(r));
        }
    }
    queue = std::move(kept);
    return expired;
}

std::size_t move_oldest(RequestQueue& from, RequestQueue& to, std::size_t n)
{
    const std::size_t moved = std::min(n, from.size());
    for (std::size_t i = 0; i < moved; ++i) {
        to.push_back(std::move(from.front()));
        from.pop_front();
    }
    return moved;
}

} // namespace depas
