#pragma once

#include "ghznet/rng.hpp"
#include "ghznet/topology.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ghznet {

/// Cut-off value meaning "qubits never decohere".
inline constexpr int kUnboundedCutoff = std::numeric_limits<int>::max();

enum class LinkPhase : std::uint8_t
{
    kAbsent,
    kPresent,   // entanglement link stored at both edge ends
    kConsumed,  // swapped or fused this slot; regenerates from the next slot
    kHeld,      // an edge-end memory holds a delivered Bell-pair qubit
};

struct LinkStatus
{
    LinkPhase phase = LinkPhase::kAbsent;
    int age = 0;  // slots since generation, meaningful while kPresent
};

/// How long a delivered user-centre Bell pair survives in memory.
enum class BellPairLifetime
{
    kCutoff,     // decoheres like any other stored qubit, Q_c slots after generation
    kUnlimited,  // held until fusion regardless of Q_c
};

struct BellPairRecord
{
    NodeId user = 0;
    NodeId centre = 0;
    std::optional<EdgeId> edge_at_user;    // empty only when user == centre
    std::optional<EdgeId> edge_at_centre;
    int age = 0;
};

/// Snapshot of the present entanglement links (the subgraph G').
struct LinkSubgraph
{
    std::vector<std::uint8_t> present;  // one flag per topology edge

    bool contains(EdgeId e) const { return present[static_cast<std::size_t>(e)] != 0; }
    std::size_t edge_count() const;
    std::vector<EdgeId> edges() const;
};

/// Per-trial stochastic network state: link generation, cut-off decoherence,
/// memory blocking and the registry of delivered Bell pairs.
///
/// Not thread-safe; each trial owns one instance.
class NetworkState
{
public:
    NetworkState(const Topology& topology, int q_c, Rng rng,
                 BellPairLifetime lifetime = BellPairLifetime::kCutoff);

    /// One slot of link dynamics, in this order: consumed links free up,
    /// stored links and Bell pairs age (dropping those that reach Q_c), then every
    /// absent edge attempts generation in edge-id order.
    void advance_timeslot();

    LinkSubgraph link_subgraph() const { return {present_}; }
    std::span<const std::uint8_t> present_mask() const { return present_; }
    bool is_present(EdgeId e) const { return present_[static_cast<std::size_t>(e)] != 0; }

    /// Swaps a path of present links into a user-centre Bell pair. Inner links are
    /// consumed; the terminal links stay held in memory until fusion.
    /// Path edges are listed from the user towards the centre. An empty path is
    /// only valid when user == centre.
    void consume_path(std::span<const EdgeId> path, NodeId user, NodeId centre);

    /// Consumes a tree of present links into a GHZ state delivered this slot.
    void consume_tree(std::span<const EdgeId> tree);

    /// Fusion at the centre: clears every Bell pair and frees its memories.
    void release_bell_pairs();

    bool has_bell_pair(NodeId user) const;
    std::span<const BellPairRecord> bell_pairs() const { return pairs_; }

    const LinkStatus& status(EdgeId e) const { return links_[static_cast<std::size_t>(e)]; }
    std::span<const LinkStatus> statuses() const { return links_; }
    const Topology& topology() const { return *topology_; }
    int q_c() const { return q_c_; }
    long timeslot() const { return timeslot_; }

    /// Human-readable edge -> status listing for golden tests.
    std::string debug_dump() const;

    /// Forces an edge into a given phase. Test fixtures only.
    void set_status_for_test(EdgeId e, LinkStatus s);

private:
    void require_present(EdgeId e, const char* op) const;
    void set_phase(EdgeId e, LinkPhase phase);

    const Topology* topology_;
    int q_c_;
    BellPairLifetime lifetime_;
    Rng rng_;
    std::vector<LinkStatus> links_;
    std::vector<std::uint8_t> present_;
    std::vector<BellPairRecord> pairs_;
    long timeslot_ = 0;
};

} // namespace ghznet
