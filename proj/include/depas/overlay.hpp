#pragma once

#include "depas/rng.hpp"
#include "depas/sim_core.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace depas {

using NodeId = EntityId;

struct OverlayParams
{
    std::size_t degree = 60; // c
    double period = 0.3;     // seconds between protocol iterations
    int max_age = 30;        // o
    std::size_t heal = 15;   // H
    std::size_t swap = 0;    // S

    bool operator==(const OverlayParams&) const = default;
};

/// A neighbor reference plus the last capacity/load it advertised.
struct ViewEntry
{
    NodeId node = 0;
    double capacity_hint = 0.0;
    double load_hint = 0.0;
    int age = 0;
};

/// Fixed-size unidirectional neighbor view owned by one node.
class NeighborView
{
public:
    NeighborView() = default;
    NeighborView(NodeId owner, std::size_t capacity) : owner_(owner), capacity_(capacity) {}

    NodeId owner() const noexcept { return owner_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const ViewEntry> entries() const noexcept { return entries_; }

    const ViewEntry* find(NodeId node) const noexcept;
    ViewEntry* find(NodeId node) noexcept;
    bool contains(NodeId node) const noexcept { return find(node) != nullptr; }

    /// Appends an entry unless it is the owner, a duplicate, or the view is full.
    bool insert(const ViewEntry& entry);
    void erase(NodeId node);
    void increment_ages() noexcept;

    /// Drops entries whose age exceeds max_age.
    void prune(int max_age);
    /// Updates the hints of `node` if it is present; age is left untouched.
    void refresh_hints(NodeId node, double capacity, double load) noexcept;

    /// Replaces the contents; the caller guarantees the view invariants.
    void assign(std::vector<ViewEntry> entries) { entries_ = std::move(entries); }

private:
    NodeId owner_ = 0;
    std::size_t capacity_ = 0;
    std::vector<ViewEntry> entries_;
};

/// Age-capped merge: drops entries older than o from both sides, unions
/// without duplicates (fresher copy wins), removes the owner, then trims to c
/// by removing up to H oldest, up to S from the head (the local entries that
/// were sent), and the rest at random.
NeighborView merge_views(const NeighborView& local,
                         std::span<const ViewEntry> received,
                         const OverlayParams& params,
                         RngStream& rng);

/// Peer selection for a gossip round: the oldest entry when H > 0, otherwise uniform.
std::optional<NodeId> select_gossip_peer(const NeighborView& view,
                                         const OverlayParams& params,
                                         RngStream& rng);

/// Push-pull exchange between an initiator and its selected peer. Each side
/// sends its whole view plus a fresh descriptor of itself and merges what it
/// receives. Ages of the initiator must already have been incremented; the
/// passive peer ages its own view on receipt, so every exchange moves the
/// copies of a departed node one round further from being fresh.
void exchange_views(NeighborView& initiator,
                    const ViewEntry& initiator_self,
                    NeighborView& peer,
                    const ViewEntry& peer_self,
                    const OverlayParams& params,
                    RngStream& initiator_rng,
                    RngStream& peer_rng);

/// Uniform draw among entries not listed in `exclude`.
std::optional<NodeId> random_neighbor(const NeighborView& view,
                                      std::span<const NodeId> exclude,
                                      RngStream& rng);

/// Initial view of a newborn: the creator (age 0) followed by the creator's
/// view, without the newborn itself, truncated to the newborn's capacity.
NeighborView bootstrap_view(NodeId owner,
                            std::size_t capacity,
                            const ViewEntry& creator_self,
                            const NeighborView& creator_view);

} // namespace depas
