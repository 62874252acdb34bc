#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace depas {

/// Simulated seconds.
using SimTime = double;

/// Identifies anything that can receive events (client, environment, nodes).
using EntityId = std::uint32_t;

struct EventHandle
{
    std::uint64_t seq = 0;
};

/// Per-message network delay; a constant, paid once each way.
struct ConstantLatency
{
    double seconds = 0.01;

    SimTime delay(EntityId /*from*/, EntityId /*to*/) const noexcept { return seconds; }

    bool operator==(const ConstantLatency&) const = default;
};

/// Single-threaded deterministic discrete-event engine.
///
/// Events fire in (fire_at, seq) order, where seq is the insertion counter,
/// so equal-time events are delivered first-scheduled-first. Events whose
/// target has been killed are not delivered; they are handed to the drop
/// handler instead.
template <class Payload>
class Engine
{
public:
    struct Event
    {
        SimTime fire_at = 0.0;
        std::uint64_t seq = 0;
        EntityId target = 0;
        Payload payload{};
    };

    explicit Engine(ConstantLatency latency = {}) : latency_(latency) {}

    SimTime now() const noexcept { return now_; }
    std::size_t pending() const noexcept { return heap_.size(); }
    const ConstantLatency& latency() const noexcept { return latency_; }

    EventHandle schedule(SimTime delay, EntityId target, Payload payload)
    {
        if (!(delay >= 0.0)) {
            throw std::invalid_argument("schedule: negative delay " + std::to_string(delay));
        }
        return push(now_ + delay, target, std::move(payload));
    }

    EventHandle schedule_at(SimTime when, EntityId target, Payload payload)
    {
        if (!(when >= now_)) {
            throw std::invalid_argument("schedule_at: time " + std::to_string(when) + " is in the past");
        }
        return push(when, target, std::move(payload));
    }

    /// Delivers payload to `to` after the latency between the two entities.
    EventHandle send(EntityId from, EntityId to, Payload payload)
    {
        return push(now_ + latency_.delay(from, to), to, std::move(payload));
    }

    void cancel(EventHandle handle) { cancelled_.insert(handle.seq); }

    void kill(EntityId id)
    {
        if (id >= dead_.size()) {
            dead_.resize(static_cast<std::size_t>(id) + 1, false);
        }
        dead_[id] = true;
    }

    bool alive(EntityId id) const noexcept { return id >= dead_.size() || !dead_[id]; }

    /// Processes every event with fire_at <= horizon, then sets the clock to horizon.
    template <class OnEvent, class OnDrop>
    void run_until(SimTime horizon, OnEvent&& on_event, OnDrop&& on_drop)
    {
        while (!heap_.empty() && heap_.front().fire_at <= horizon) {
            std::pop_heap(heap_.begin(), heap_.end(), Later{});
            Event ev = std::move(heap_.back());
            heap_.pop_back();
            if (!cancelled_.empty()) {
                if (auto it = cancelled_.find(ev.seq); it != cancelled_.end()) {
                    cancelled_.erase(it);
                    continue;
                }
            }
            now_ = ev.fire_at;
            if (!alive(ev.target)) {
                on_drop(ev);
                continue;
            }
            on_event(ev);
        }
        if (horizon > now_) {
            now_ = horizon;
        }
    }

    template <class OnEvent>
    void run_until(SimTime horizon, OnEvent&& on_event)
    {
        run_until(horizon, std::forward<OnEvent>(on_event), [](const Event&) {});
    }

private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            if (a.fire_at != b.fire_at) {
                return a.fire_at > b.fire_at;
            }
            return a.seq > b.seq;
        }
    };

    EventHandle push(SimTime when, EntityId target, Payload payload)
    {
        const std::uint64_t seq = next_seq_++;
        heap_.push_back(Event{when, seq, target, std::move(payload)});
        std::push_heap(heap_.begin(), heap_.end(), Later{});
        return EventHandle{seq};
    }

    ConstantLatency latency_;
    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::vector<Event> heap_;
    std::unordered_set<std::uint64_t> cancelled_;
    std::vector<bool> dead_;
};

} // namespace depas
