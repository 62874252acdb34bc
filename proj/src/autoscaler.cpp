#include "depas/autoscaler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace depas {

void ScalerParams::validate() const
{
    if (!(l_min > 0.0)) {
        throw std::invalid_argument("scaler.l_min: must be > 0");
    }
    if (!(l_min < l_des)) {
        throw std::invalid_argument("scaler.l_des: must be > l_min");
    }
    if (!(l_des < l_max)) {
        throw std::invalid_argument("scaler.l_max: must be > l_des (and l_min)");
    }
    if (!(l_max <= 1.0)) {
        throw std::invalid_argument("scaler.l_max: must be <= 1");
    }
    if (!(period > 0.0)) {
        throw std::invalid_argument("scaler.period: must be > 0");
    }
    if (!(window > 0.0)) {
        throw std::invalid_argument("scaler.window: must be > 0");
    }
}

void LoadWindow::record(SimTime t, int count)
{
    if (!marks_.empty() && marks_.back().first == t) {
        marks_.back().second += count;
    } else {
        marks_.emplace_back(t, count);
    }
    total_ += count;
}

void LoadWindow::evict(SimTime now)
{
    const SimTime cutoff = now - length_;
    while (!marks_.empty() && marks_.front().first < cutoff) {
        total_ -= marks_.front().second;
        marks_.pop_front();
    }
}

LoadSample LoadWindow::sample(SimTime now, double capacity)
{
    evict(now);
    // A young node measures over its lifetime, but never over less than a second.
    const SimTime start = std::max(now - length_, born_at_);
    const double min_len = std::min(1.0, length_);
    LoadSample s;
    s.window_end = now;
    s.window_start = std::min(start, now - min_len);
    s.arrivals = static_cast<double>(std::max(total_, 0L));
    s.capacity = capacity;
    return s;
}

double neighborhood_load(LoadHint self, std::span<const LoadHint> neighbors)
{
    double weighted = self.capacity * self.load;
    double capacity = self.capacity;
    for (const auto& n : neighbors) {
        weighted += n.capacity * n.load;
        capacity += n.capacity;
    }
    return capacity > 0.0 ? weighted / capacity : 0.0;
}

double neighborhood_load(LoadHint self, std::span<const ViewEntry> neighbors)
{
    double weighted = self.capacity * self.load;
    double capacity = self.capacity;
    for (const auto& n : neighbors) {
        weighted += n.capacity_hint * n.load_hint;
        capacity += n.capacity_hint;
    }
    return capacity > 0.0 ? weighted / capacity : 0.0;
}

double compute_ratio(double l_tilde, double l_des)
{
    return (l_tilde - l_des) / l_des;
}

bool analyze_removal(double ratio, RngStream& rng)
{
    const double p = std::min(std::abs(ratio), 1.0);
    return rng.uniform() < p;
}

std::size_t analyze_addition(double ratio, RngStream& rng)
{
    if (!(ratio > 0.0)) {
        return 0;
    }
    const double whole = std::floor(ratio);
    const double frac = ratio - whole;
    auto n = static_cast<std::size_t>(whole);
    // The fractional part is the probability of one extra service.
    if (frac > 0.0 && rng.uniform() < frac) {
        ++n;
    }
    return n;
}

ScalingDecision decide_scaling(double l_tilde, const ScalerParams& params, RngStream& rng)
{
    ScalingDecision d;
    if (l_tilde < params.l_min) {
        d.ratio = compute_ratio(l_tilde, params.l_des);
        if (analyze_removal(d.ratio, rng)) {
            d.kind = ScalingDecision::Kind::remove;
            d.count = 1;
        }
    } else if (l_tilde > params.l_max) {
        d.ratio = compute_ratio(l_tilde, params.l_des);
        d.count = analyze_addition(d.ratio, rng);
        if (d.count > 0) {
            d.kind = ScalingDecision::Kind::add;
        }
    }
    return d;
}

} // namespace depas
