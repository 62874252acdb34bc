#include "depas/cloud_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace depas {

void CapacityDistribution::validate() const
{
    if (classes.empty()) {
        throw std::invalid_argument("capacity: at least one class is required");
    }
    double total = 0.0;
    for (const auto& c : classes) {
        if (!(c.probability >= 0.0)) {
            throw std::invalid_argument("capacity.probability: must be >= 0");
        }
        if (!(c.capacity > 0.0)) {
            throw std::invalid_argument("capacity.capacity: must be > 0");
        }
        total += c.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("capacity.probability: must sum to 1");
    }
}

double CapacityDistribution::sample(RngStream& rng) const
{
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& c : classes) {
        acc += c.probability;
        if (u < acc) {
            return c.capacity;
        }
    }
    return classes.back().capacity;
}

double CapacityDistribution::mean() const noexcept
{
    double m = 0.0;
    for (const auto& c : classes) {
        m += c.probability * c.capacity;
    }
    return m;
}

void ChurnParams::validate() const
{
    if (!(p_fail >= 0.0 && p_fail <= 1.0)) {
        throw std::invalid_argument("churn.p_fail: must be in [0, 1]");
    }
    if (!(period > 0.0)) {
        throw std::invalid_argument("churn.period: must be > 0");
    }
    if (!(end >= start)) {
        throw std::invalid_argument("churn.end: must be >= churn.start");
    }
}

void DisruptiveEvent::validate() const
{
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("disruptions.fraction: must be in [0, 1]");
    }
    if (!(at >= 0.0)) {
        throw std::invalid_argument("disruptions.at: must be >= 0");
    }
}

void CloudParams::validate() const
{
    if (providers.empty()) {
        throw std::invalid_argument("cloud.providers: at least one provider is required");
    }
    if (!(boot_delay >= 0.0)) {
        throw std::invalid_argument("cloud.boot_delay: must be >= 0");
    }
    if (max_nodes != 0 && max_nodes < min_nodes) {
        throw std::invalid_argument("cloud.max_nodes: must be >= min_nodes");
    }
    if (dns_entries == 0) {
        throw std::invalid_argument("cloud.dns_entries: must be > 0");
    }
    if (!(registration_probability >= 0.0 && registration_probability <= 1.0)) {
        throw std::invalid_argument("cloud.registration_probability: must be in [0, 1]");
    }
}

bool DnsRegistry::contains(NodeId node) const noexcept
{
    return std::find(entries_.begin(), entries_.end(), node) != entries_.end();
}

bool DnsRegistry::try_register(NodeId node, const std::function<bool(NodeId)>& alive)
{
    if (contains(node)) {
        return true;
    }
    if (entries_.size() >= max_entries_) {
        for (std::size_t i = entries_.size(); i-- > 0;) {
            if (!alive(entries_[i])) {
                erase_at(i);
            }
        }
    }
    if (entries_.size() >= max_entries_) {
        return false;
    }
    entries_.push_back(node);
    return true;
}

void DnsRegistry::unregister(NodeId node)
{
    auto it = std::find(entries_.begin(), entries_.end(), node);
    if (it != entries_.end()) {
        erase_at(static_cast<std::size_t>(it - entries_.begin()));
    }
}

void DnsRegistry::erase_at(std::size_t i)
{
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
    if (i < cursor_) {
        --cursor_;
    }
    if (cursor_ >= entries_.size()) {
        cursor_ = 0;
    }
}

std::optional<NodeId> DnsRegistry::resolve()
{
    if (entries_.empty()) {
        return std::nullopt;
    }
    if (cursor_ >= entries_.size()) {
        cursor_ = 0;
    }
    const NodeId n = entries_[cursor_];
    cursor_ = (cursor_ + 1) % entries_.size();
    return n;
}

std::vector<NodeId> churn_failures(std::span<const NodeId> live, double p_fail, RngStream& rng)
{
    std::vector<NodeId> failed;
    if (p_fail <= 0.0) {
        return failed;
    }
    for (NodeId n : live) {
        if (rng.uniform() < p_fail) {
            failed.push_back(n);
        }
    }
    return failed;
}

std::vector<NodeId> disruption_victims(std::span<const NodeId> live, double fraction, RngStream& rng)
{
    std::vector<NodeId> pool(live.begin(), live.end());
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool.size())));
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace depas
