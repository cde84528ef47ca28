#pragma once

#include "ghznet/topology.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ghznet {

/// A topology restricted to a subset of its edges (all edges when no mask is given).
/// Non-owning: the topology and mask must outlive the view.
class GraphView
{
public:
    explicit GraphView(const Topology& t) : topology_(&t) {}
    GraphView(const Topology& t, std::span<const std::uint8_t> present);

    const Topology& topology() const { return *topology_; }
    std::size_t node_count() const { return topology_->node_count(); }
    bool usable(EdgeId e) const
    {
        return mask_.empty() || mask_[static_cast<std::size_t>(e)] != 0;
    }

    template <typename F>
    void for_each_neighbor(NodeId n, F&& f) const
    {
        for (const Incidence& inc : topology_->neighbors(n))
            if (usable(inc.edge))
                f(inc);
    }

private:
    const Topology* topology_;
    std::span<const std::uint8_t> mask_;
};

/// Minimum-hop path from a to b as an edge sequence starting at a. Among equal-length
/// paths the lexicographically smallest node sequence wins. nullopt if disconnected.
std::optional<std::vector<EdgeId>> shortest_path(const GraphView& g, NodeId a, NodeId b);

/// Node sequence visited by walking `path` from `start`.
std::vector<NodeId> path_nodes(const Topology& t, NodeId start, std::span<const EdgeId> path);

struct UserPath
{
    NodeId user = 0;
    std::vector<EdgeId> edges;  // ordered from the user to the centre
};

struct RoutingSolution
{
    NodeId centre = 0;
    std::vector<UserPath> paths;  // sorted by user; unserved users are absent
    std::size_t total_edges = 0;
    std::size_t users_served = 0;
};

/// Edge-disjoint paths from the centre to as many users as possible, using the fewest
/// edges among maximum solutions (unit-capacity min-cost max-flow). A user equal to
/// the centre is served by an empty path.
RoutingSolution disjoint_paths_to_centre(const GraphView& g, NodeId centre,
                                         std::span<const NodeId> users);

struct SteinerTree
{
    std::vector<EdgeId> edges;      // sorted
    std::vector<NodeId> terminals;  // sorted, deduplicated
};

/// Terminal counts up to this bound are solved exactly (Dreyfus-Wagner);
/// larger sets use the KMB 2-approximation.
inline constexpr std::size_t kExactSteinerTerminalLimit = 4;

/// Minimum-edge Steiner tree on unit weights. Throws std::domain_error for fewer
/// than two distinct terminals; nullopt when the terminals are not connected.
std::optional<SteinerTree> steiner_tree(const GraphView& g, std::span<const NodeId> terminals);

/// KMB heuristic: metric closure MST, path expansion, spanning tree, leaf pruning.
std::optional<SteinerTree> steiner_tree_kmb(const GraphView& g, std::span<const NodeId> terminals);

/// Exact Dreyfus-Wagner dynamic programme; cost grows as 3^|terminals|.
std::optional<SteinerTree> steiner_tree_exact(const GraphView& g,
                                              std::span<const NodeId> terminals);

/// True iff every terminal lies in one connected component.
bool has_connecting_tree(const GraphView& g, std::span<const NodeId> terminals);

/// Repeatedly extracts a Steiner tree and deletes its edges until none remains.
std::vector<SteinerTree> greedy_tree_packing(const GraphView& g, std::span<const NodeId> terminals);

/// Centre candidate chosen for SP / MP-G+, with its routing on the full topology.
struct CentrePlan
{
    NodeId centre = 0;
    RoutingSolution routing;
    double log_rate = 0.0;  // sum of log p_e over routing edges
};

/// Degree-feasible centre maximising the product of p_e over its edge-disjoint
/// shortest-path routing to all users; ties go to the lowest node id.
/// Throws InfeasibleError when no node satisfies the memory constraint.
CentrePlan select_centre(const Topology& t, std::span<const NodeId> users);
NodeId select_centre_node(const Topology& t, std::span<const NodeId> users);

/// Minimum over users of the edge cut separating that user from the other users.
int min_user_cut_bound(const Topology& t, std::span<const NodeId> users);

/// Component label per node (labels dense from 0 in node order).
std::vector<int> component_labels(const GraphView& g);
std::size_t largest_component_size(const GraphView& g);

} // namespace ghznet
