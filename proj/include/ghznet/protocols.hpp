#pragma once

#include "ghznet/netstate.hpp"
#include "ghznet/rng.hpp"
#include "ghznet/topology.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ghznet {

enum class ProtocolKind
{
    kSp,       // centre node, pre-computed edge-disjoint shortest paths
    kSpTree,   // pre-computed minimum Steiner tree, all links in one slot
    kMpGPlus,  // centre node, per-slot edge-disjoint paths in G'
    kMpC,      // per-slot Steiner tree in G'
    kMpP,      // per-slot greedy Steiner tree packing in G'
};

std::string_view to_string(ProtocolKind kind);
/// Accepts "SP", "SP-tree", "MP-G+", "MP-C", "MP-P" (case-insensitive).
ProtocolKind parse_protocol(std::string_view name);

struct ProtocolConfig
{
    std::vector<NodeId> users;
    int max_timeslots = 5000;
    int q_c = 1;  // kUnboundedCutoff for ideal memories
    BellPairLifetime bell_pairs = BellPairLifetime::kCutoff;
};

struct ProtocolOutcome
{
    bool succeeded = false;
    int timeslots_used = 0;
    int ghz_count = 0;
    std::vector<int> ghz_sizes;
    std::size_t links_consumed = 0;
};

/// Throws ValidationError for a malformed config (fewer than two distinct users,
/// users outside the topology, non-positive limits).
void validate_config(const Topology& t, const ProtocolConfig& cfg);

/// The static routing an SP run commits to: the centre paths or the Steiner tree.
std::vector<EdgeId> sp_route(const Topology& t, std::span<const NodeId> users, ProtocolKind kind);

ProtocolOutcome run_sp(const Topology& t, const ProtocolConfig& cfg, Rng rng);
ProtocolOutcome run_sp_tree(const Topology& t, const ProtocolConfig& cfg, Rng rng);
ProtocolOutcome run_mp_gplus(const Topology& t, const ProtocolConfig& cfg, Rng rng);
ProtocolOutcome run_mp_c(const Topology& t, const ProtocolConfig& cfg, Rng rng);
ProtocolOutcome run_mp_p(const Topology& t, const ProtocolConfig& cfg, Rng rng);

ProtocolOutcome run_protocol(ProtocolKind kind, const Topology& t, const ProtocolConfig& cfg,
                             Rng rng);

} // namespace ghznet
