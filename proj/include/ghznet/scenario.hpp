#pragma once

#include "ghznet/netstate.hpp"
#include "ghznet/protocols.hpp"
#include "ghznet/rng.hpp"
#include "ghznet/topology.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghznet {

struct UserSpec
{
    enum class Kind
    {
        kExplicit,
        kCorners,  // the four corners of a grid
        kRandom,   // fresh uniform sample without replacement per trial
    };
    Kind kind = Kind::kRandom;
    std::vector<NodeId> nodes;
    int count = 4;

    /// "corners", "random:k", or a comma-separated node list.
    static UserSpec parse(std::string_view text);
    std::string to_string() const;
    std::size_t size() const;
};

/// One experiment: a topology, a protocol, a user placement rule and trial budget.
struct Scenario
{
    // An empty topology_file means a width x width grid with uniform probability p.
    std::string topology_file;
    int grid_m = 6;
    double p = 0.75;
    std::optional<double> p_op;  // file topologies: overrides the document's p_op
    double length_scale = 1.0;

    ProtocolKind protocol = ProtocolKind::kMpC;
    UserSpec users;
    int q_c = 1;
    int trials = 1000;
    int max_timeslots = 5000;
    std::uint64_t seed = 1;
    BellPairLifetime bell_pairs = BellPairLifetime::kCutoff;

    bool is_grid() const { return topology_file.empty(); }
    void validate() const;
};

/// Parses "key = value" lines (# comments) or an equivalent JSON object.
/// A relative topology path is resolved against `base_dir`.
Scenario parse_scenario(std::string_view document, const std::string& base_dir = "");
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& s);

/// Q_c from text: a positive integer or "inf".
int parse_cutoff(std::string_view text);
std::string format_cutoff(int q_c);

/// The scenario's topology with scaling and probability overrides applied.
Topology build_topology(const Scenario& s);

/// Users for one trial. Random specs draw from `rng`; other kinds ignore it.
std::vector<NodeId> resolve_users(const UserSpec& spec, const Scenario& s, const Topology& t,
                                  Rng& rng);

} // namespace ghznet
