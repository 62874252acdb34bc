#include "depas/overlay.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>

namespace depas {

const ViewEntry* NeighborView::find(NodeId node) const noexcept
{
    for (const auto& e : entries_) {
        if (e.node == node) {
            return &e;
        }
    }
    return nullptr;
}

ViewEntry* NeighborView::find(NodeId node) noexcept
{
    for (auto& e : entries_) {
        if (e.node == node) {
            return &e;
        }
    }
    return nullptr;
}

bool NeighborView::insert(const ViewEntry& entry)
{
    if (entry.node == owner_ || entries_.size() >= capacity_ || contains(entry.node)) {
        return false;
    }
    entries_.push_back(entry);
    return true;
}

void NeighborView::erase(NodeId node)
{
    std::erase_if(entries_, [node](const ViewEntry& e) { return e.node == node; });
}

void NeighborView::increment_ages() noexcept
{
    for (auto& e : entries_) {
        ++e.age;
    }
}

void NeighborView::prune(int max_age)
{
    std::erase_if(entries_, [max_age](const ViewEntry& e) { return e.age > max_age; });
}

void NeighborView::refresh_hints(NodeId node, double capacity, double load) noexcept
{
    if (auto* e = find(node)) {
        e->capacity_hint = capacity;
        e->load_hint = load;
    }
}

NeighborView merge_views(const NeighborView& local,
                         std::span<const ViewEntry> received,
                         const OverlayParams& params,
                         RngStream& rng)
{
    const NodeId owner = local.owner();
    const std::size_t c = local.capacity();

    // Pool in protocol order: local entries (the head) first, then received ones.
    std::vector<ViewEntry> pool;
    pool.reserve(local.size() + received.size());
    std::size_t head = 0;
    for (const auto& e : local.entries()) {
        if (e.age <= params.max_age && e.node != owner) {
            pool.push_back(e);
            ++head;
        }
    }
    for (const auto& e : received) {
        if (e.age <= params.max_age && e.node != owner) {
            pool.push_back(e);
        }
    }

    // Duplicate removal keeps the freshest copy at the position of the first occurrence.
    // Node ids are dense, so a generation-stamped table indexed by id finds copies in O(n).
    thread_local std::vector<std::uint32_t> stamp;
    thread_local std::vector<std::uint32_t> slot;
    thread_local std::uint32_t generation = 0;
    if (++generation == 0) {
        std::fill(stamp.begin(), stamp.end(), 0u);
        generation = 1;
    }
    thread_local std::vector<char> keep;
    keep.assign(pool.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const NodeId node = pool[i].node;
        if (node >= stamp.size()) {
            stamp.resize(static_cast<std::size_t>(node) * 2 + 64, 0u);
            slot.resize(stamp.size(), 0u);
        }
        if (stamp[node] != generation) {
            stamp[node] = generation;
            slot[node] = static_cast<std::uint32_t>(i);
            keep[i] = 1;
        } else if (pool[i].age < pool[slot[node]].age) {
            pool[slot[node]] = pool[i];
        }
    }
    std::vector<ViewEntry> merged;
    merged.reserve(pool.size());
    std::size_t merged_head = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (keep[i]) {
            merged.push_back(pool[i]);
            if (i < head) {
                ++merged_head;
            }
        }
    }

    // H: drop the oldest entries first; among equal ages the later position goes first.
    if (merged.size() > c && params.heal > 0) {
        const std::size_t drop = std::min(params.heal, merged.size() - c);
        // Ages are bounded by o, so a counting pass finds the cut-off age.
        thread_local std::vector<std::size_t> per_age;
        per_age.assign(static_cast<std::size_t>(std::max(params.max_age, 0)) + 1, 0);
        for (const auto& e : merged) {
            ++per_age[static_cast<std::size_t>(e.age)];
        }
        std::size_t cut = per_age.size();
        std::size_t older = 0; // entries strictly older than `cut`
        while (cut > 0 && older + per_age[cut - 1] < drop) {
            older += per_age[--cut];
        }
        // Everything older than cut-1 goes, plus the latest-positioned entries of age cut-1.
        const int boundary = static_cast<int>(cut) - 1;
        std::size_t at_boundary = drop - older;
        keep.assign(merged.size(), 1);
        for (std::size_t i = merged.size(); i-- > 0;) {
            if (merged[i].age > boundary) {
                keep[i] = 0;
            } else if (merged[i].age == boundary && at_boundary > 0) {
                keep[i] = 0;
                --at_boundary;
            }
        }
        std::size_t out = 0;
        std::size_t kept_head = 0;
        for (std::size_t i = 0; i < merged.size(); ++i) {
            if (keep[i]) {
                merged[out++] = merged[i];
                if (i < merged_head) {
                    ++kept_head;
                }
            }
        }
        merged.resize(out);
        merged_head = kept_head;
    }

    // S: drop from the head, i.e. entries this node already handed to the peer.
    if (merged.size() > c && params.swap > 0) {
        const std::size_t drop = std::min({params.swap, merged.size() - c, merged_head});
        merged.erase(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    while (merged.size() > c) {
        const auto victim = static_cast<std::ptrdiff_t>(rng.below(merged.size()));
        merged.erase(merged.begin() + victim);
    }

    NeighborView out(owner, c);
    out.assign(std::move(merged));
    return out;
}

std::optional<NodeId> select_gossip_peer(const NeighborView& view,
                                         const OverlayParams& params,
                                         RngStream& rng)
{
    if (view.empty()) {
        return std::nullopt;
    }
    const auto entries = view.entries();
    if (params.heal > 0) {
        const auto oldest = std::max_element(entries.begin(), entries.end(),
                                             [](const ViewEntry& a, const ViewEntry& b) { return a.age < b.age; });
        return oldest->node;
    }
    return entries[rng.below(entries.size())].node;
}

void exchange_views(NeighborView& initiator,
                    const ViewEntry& initiator_self,
                    NeighborView& peer,
                    const ViewEntry& peer_self,
                    const OverlayParams& params,
                    RngStream& initiator_rng,
                    RngStream& peer_rng)
{
    peer.increment_ages();
    peer.prune(params.max_age);
    std::vector<ViewEntry> to_peer(initiator.entries().begin(), initiator.entries().end());
    to_peer.push_back(initiator_self);
    std::vector<ViewEntry> to_initiator(peer.entries().begin(), peer.entries().end());
    to_initiator.push_back(peer_self);

    initiator = merge_views(initiator, to_initiator, params, initiator_rng);
    peer = merge_views(peer, to_peer, params, peer_rng);
}

std::optional<NodeId> random_neighbor(const NeighborView& view,
                                      std::span<const NodeId> exclude,
                                      RngStream& rng)
{
    auto excluded = [&](NodeId n) { return std::find(exclude.begin(), exclude.end(), n) != exclude.end(); };
    std::size_t candidates = 0;
    for (const auto& e : view.entries()) {
        if (!excluded(e.node)) {
            ++candidates;
        }
    }
    if (candidates == 0) {
        return std::nullopt;
    }
    std::size_t pick = rng.below(candidates);
    for (const auto& e : view.entries()) {
        if (!excluded(e.node)) {
            if (pick == 0) {
                return e.node;
            }
            --pick;
        }
    }
    return std::nullopt;
}

NeighborView bootstrap_view(NodeId owner,
                            std::size_t capacity,
                            const ViewEntry& creator_self,
                            const NeighborView& creator_view)
{
    std::vector<ViewEntry> entries;
    entries.reserve(creator_view.size() + 1);
    if (creator_self.node != owner) {
        entries.push_back(creator_self);
        entries.back().age = 0;
    }
    for (const auto& e : creator_view.entries()) {
        if (e.node != owner && e.node != creator_self.node) {
            entries.push_back(e);
        }
    }
    if (entries.size() > capacity) {
        // Keep the creator, drop the oldest of the rest.
        std::stable_sort(entries.begin() + 1, entries.end(),
                         [](const ViewEntry& a, const ViewEntry& b) { return a.age < b.age; });
        entries.resize(capacity);
    }
    NeighborView view(owner, capacity);
    view.assign(std::move(entries));
    return view;
}

} // namespace depas
