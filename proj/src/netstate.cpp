#include "ghznet/netstate.hpp"

#include "ghznet/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ghznet {

std::size_t LinkSubgraph::edge_count() const
{
    return static_cast<std::size_t>(std::count(present.begin(), present.end(), 1));
}

std::vector<EdgeId> LinkSubgraph::edges() const
{
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i < present.size(); ++i)
        if (present[i])
            out.push_back(static_cast<EdgeId>(i));
    return out;
}

NetworkState::NetworkState(const Topology& topology, int q_c, Rng rng, BellPairLifetime lifetime)
    : topology_(&topology), q_c_(q_c), lifetime_(lifetime), rng_(std::move(rng)),
      links_(topology.edge_count()), present_(topology.edge_count(), 0)
{
    if (q_c < 1)
        throw ValidationError("cut-off Q_c must be at least 1");
}

void NetworkState::set_phase(EdgeId e, LinkPhase phase)
{
    auto i = static_cast<std::size_t>(e);
    links_[i].phase = phase;
    links_[i].age = 0;
    present_[i] = phase == LinkPhase::kPresent ? 1 : 0;
}

void NetworkState::advance_timeslot()
{
    const bool bounded = q_c_ != kUnboundedCutoff;
    for (std::size_t i = 0; i < links_.size(); ++i) {
        LinkStatus& s = links_[i];
        if (s.phase == LinkPhase::kConsumed) {
            s = {};
        } else if (s.phase == LinkPhase::kPresent && bounded) {
            if (++s.age >= q_c_) {
                s = {};
                present_[i] = 0;
            }
        }
    }

    if (bounded && lifetime_ == BellPairLifetime::kCutoff) {
        auto expired = [&](BellPairRecord& r) {
            if (++r.age < q_c_)
                return false;
            for (auto held : {r.edge_at_user, r.edge_at_centre})
                if (held)
                    set_phase(*held, LinkPhase::kAbsent);
            return true;
        };
        pairs_.erase(std::remove_if(pairs_.begin(), pairs_.end(), expired), pairs_.end());
    }

    auto edges = topology_->edges();
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (links_[i].phase == LinkPhase::kAbsent && bernoulli(rng_, edges[i].p_e)) {
            links_[i] = {LinkPhase::kPresent, 0};
            present_[i] = 1;
        }
    }
    ++timeslot_;
}

void NetworkState::require_present(EdgeId e, const char* op) const
{
    if (e < 0 || static_cast<std::size_t>(e) >= links_.size())
        throw ProtocolLogicError(std::string(op) + ": edge id out of range");
    if (!is_present(e))
        throw ProtocolLogicError(std::string(op) + ": edge " + std::to_string(e) +
                                 " holds no entanglement link");
}

bool NetworkState::has_bell_pair(NodeId user) const
{
    return std::any_of(pairs_.begin(), pairs_.end(),
                       [&](const BellPairRecord& r) { return r.user == user; });
}

void NetworkState::consume_path(std::span<const EdgeId> path, NodeId user, NodeId centre)
{
    if (has_bell_pair(user))
        throw ProtocolLogicError("consume_path: user " + std::to_string(user) +
                                 " already shares a Bell pair");
    if (path.empty()) {
        if (user != centre)
            throw ProtocolLogicError("consume_path: empty path between distinct nodes");
        pairs_.push_back({user, centre, std::nullopt, std::nullopt, 0});
        return;
    }

    // Walk the path from the user to check it is a connected walk ending at the centre.
    NodeId at = user;
    int age = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        EdgeId e = path[k];
        require_present(e, "consume_path");
        if (std::find(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k), e) !=
            path.begin() + static_cast<std::ptrdiff_t>(k))
            throw ProtocolLogicError("consume_path: edge repeated in path");
        const Edge& edge = topology_->edge(e);
        if (!edge.touches(at))
            throw ProtocolLogicError("consume_path: path is not a walk from the user");
        at = edge.other(at);
        age = std::max(age, links_[static_cast<std::size_t>(e)].age);
    }
    if (at != centre)
        throw ProtocolLogicError("consume_path: path does not end at the centre");

    for (EdgeId e : path)
        set_phase(e, LinkPhase::kConsumed);
    set_phase(path.front(), LinkPhase::kHeld);
    set_phase(path.back(), LinkPhase::kHeld);
    pairs_.push_back({user, centre, path.front(), path.back(), age});
}

void NetworkState::consume_tree(std::span<const EdgeId> tree)
{
    if (tree.empty())
        throw ProtocolLogicError("consume_tree: empty tree");
    std::vector<NodeId> parent(topology_->node_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](NodeId x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    };
    std::vector<NodeId> touched;
    for (EdgeId e : tree) {
        require_present(e, "consume_tree");
        const Edge& edge = topology_->edge(e);
        NodeId a = find(edge.u), b = find(edge.v);
        if (a == b)
            throw ProtocolLogicError("consume_tree: edge set contains a cycle");
        parent[static_cast<std::size_t>(a)] = b;
        touched.push_back(edge.u);
        touched.push_back(edge.v);
    }
    // Acyclic with |nodes| = |edges| + 1 means connected.
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    if (touched.size() != tree.size() + 1)
        throw ProtocolLogicError("consume_tree: edge set is not connected");

    for (EdgeId e : tree)
        set_phase(e, LinkPhase::kConsumed);
}

void NetworkState::release_bell_pairs()
{
    for (const BellPairRecord& r : pairs_)
        for (auto held : {r.edge_at_user, r.edge_at_centre})
            if (held)
                set_phase(*held, LinkPhase::kAbsent);
    pairs_.clear();
}

void NetworkState::set_status_for_test(EdgeId e, LinkStatus s)
{
    links_[static_cast<std::size_t>(e)] = s;
    present_[static_cast<std::size_t>(e)] = s.phase == LinkPhase::kPresent ? 1 : 0;
}

std::string NetworkState::debug_dump() const
{
    std::ostringstream out;
    out << "timeslot " << timeslot_ << "\n";
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const Edge& e = topology_->edge(static_cast<EdgeId>(i));
        out << i << " " << e.u << "-" << e.v << " ";
        switch (links_[i].phase) {
        case LinkPhase::kAbsent: out << "absent"; break;
        case LinkPhase::kPresent: out << "present(" << links_[i].age << ")"; break;
        case LinkPhase::kConsumed: out << "consumed"; break;
        case LinkPhase::kHeld: out << "held"; break;
        }
        out << "\n";
    }
    for (const BellPairRecord& r : pairs_)
        out << "pair " << r.user << "<->" << r.centre << " age " << r.age << "\n";
    return out.str();
}

} // namespace ghznet
