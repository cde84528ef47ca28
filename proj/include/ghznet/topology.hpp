#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghznet {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr double kDefaultAttenuationDbPerKm = 0.2;

/// Probability of heralding an entanglement link over a fibre of the given length.
/// The attenuation term is read as the channel transmittance, so a zero-length
/// edge succeeds with exactly p_op.
double edge_success_probability(double length_km, double p_op,
                                double attenuation_db_per_km = kDefaultAttenuationDbPerKm);

struct Edge
{
    NodeId u = 0;  // u < v
    NodeId v = 0;
    double length_km = 0.0;
    double p_op = 1.0;
    double p_e = 1.0;

    NodeId other(NodeId n) const { return n == u ? v : u; }
    bool touches(NodeId n) const { return n == u || n == v; }
};

struct Incidence
{
    NodeId neighbor;
    EdgeId edge;
};

struct CatalogStats
{
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    double mean_edge_length_km = 0.0;
    double mean_nodal_degree = 0.0;
};

/// Reference values a topology document may declare about itself.
struct DeclaredStats
{
    std::optional<std::size_t> nodes;
    std::optional<std::size_t> edges;
    std::optional<double> mean_length_km;
};

/// Immutable simple undirected graph with per-edge link probabilities.
///
/// Edge ids are positions in edges(); every per-edge random draw in the
/// simulator walks edges in id order. Adjacency lists are sorted by neighbour id.
class Topology
{
public:
    Topology() = default;

    /// Validates a simple graph (no self-loops, no duplicate edges, endpoints in
    /// range, probabilities in [0,1], non-negative lengths). Connectivity is not
    /// required here; load_topology() enforces it for documents.
    Topology(std::string name, std::size_t node_count, std::vector<Edge> edges,
             double attenuation_db_per_km = kDefaultAttenuationDbPerKm);

    const std::string& name() const { return name_; }
    std::size_t node_count() const { return node_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    double attenuation_db_per_km() const { return attenuation_; }

    std::span<const Edge> edges() const { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
    std::span<const Incidence> neighbors(NodeId n) const
    {
        return adjacency_[static_cast<std::size_t>(n)];
    }
    std::size_t degree(NodeId n) const { return neighbors(n).size(); }
    std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;

    bool is_connected() const;
    double max_p_e() const;
    double mean_p_e() const;

    /// Copy with every edge's p_op replaced and p_e recomputed from its length.
    Topology with_p_op(double p_op) const;
    /// Copy with every edge's p_e forced to p (and p_op = p, attenuation off).
    Topology with_uniform_p(double p) const;

    DeclaredStats declared;

private:
    std::string name_;
    std::size_t node_count_ = 0;
    double attenuation_ = kDefaultAttenuationDbPerKm;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> adjacency_;
};

/// M x M lattice, node index = row * M + column, 2M(M-1) edges of length 1 km.
/// Grid edges carry the uniform probability p directly (attenuation disabled).
Topology build_grid(int width, double p);

/// The four corner nodes of an M x M grid in ascending order.
std::vector<NodeId> grid_corners(int width);

/// Multiplies every edge length by factor (> 0) and recomputes p_e.
Topology scale_lengths(const Topology& t, double factor);

CatalogStats catalog_stats(const Topology& t);

/// Parses a topology document (line-oriented text or JSON, auto-detected).
/// Throws ValidationError naming the offending line for malformed records,
/// self-loops, duplicate edges, disconnected graphs and declared-stat mismatches.
Topology load_topology(std::string_view document);
Topology load_topology_file(const std::string& path);

std::string serialize_topology(const Topology& t);
std::string serialize_topology_json(const Topology& t);

} // namespace ghznet
