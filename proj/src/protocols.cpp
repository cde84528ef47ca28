#include "ghznet/protocols.hpp"

#include "ghznet/errors.hpp"
#include "ghznet/routing.hpp"

#include <algorithm>
#include <cctype>

namespace ghznet {

std::string_view to_string(ProtocolKind kind)
{
    switch (kind) {
    case ProtocolKind::kSp: return "SP";
    case ProtocolKind::kSpTree: return "SP-tree";
    case ProtocolKind::kMpGPlus: return "MP-G+";
    case ProtocolKind::kMpC: return "MP-C";
    case ProtocolKind::kMpP: return "MP-P";
    }
    return "?";
}

ProtocolKind parse_protocol(std::string_view name)
{
    std::string up;
    for (char c : name)
        up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "SP")
        return ProtocolKind::kSp;
    if (up == "SP-TREE")
        return ProtocolKind::kSpTree;
    if (up == "MP-G+" || up == "MP-GPLUS")
        return ProtocolKind::kMpGPlus;
    if (up == "MP-C")
        return ProtocolKind::kMpC;
    if (up == "MP-P")
        return ProtocolKind::kMpP;
    throw ValidationError("unknown protocol '" + std::string(name) + "'");
}

void validate_config(const Topology& t, const ProtocolConfig& cfg)
{
    std::vector<NodeId> u = cfg.users;
    std::sort(u.begin(), u.end());
    if (std::adjacent_find(u.begin(), u.end()) != u.end())
        throw ValidationError("user set contains duplicates");
    if (u.size() < 2)
        throw ValidationError("at least two users are required");
    if (u.front() < 0 || static_cast<std::size_t>(u.back()) >= t.node_count())
        throw ValidationError("user node outside the topology");
    if (cfg.max_timeslots < 1)
        throw ValidationError("max_timeslots must be positive");
    if (cfg.q_c < 1)
        throw ValidationError("Q_c must be at least 1");
}

namespace {

ProtocolOutcome failure(const ProtocolConfig& cfg, std::size_t consumed)
{
    ProtocolOutcome out;
    out.timeslots_used = cfg.max_timeslots;
    out.links_consumed = consumed;
    return out;
}

ProtocolOutcome success(int slot, int ghz, std::size_t size, std::size_t consumed)
{
    ProtocolOutcome out;
    out.succeeded = true;
    out.timeslots_used = slot;
    out.ghz_count = ghz;
    out.ghz_sizes.assign(static_cast<std::size_t>(ghz), static_cast<int>(size));
    out.links_consumed = consumed;
    return out;
}

bool all_served(const NetworkState& state, const std::vector<NodeId>& users, NodeId centre)
{
    return std::all_of(users.begin(), users.end(),
                       [&](NodeId u) { return u == centre || state.has_bell_pair(u); });
}

} // namespace

std::vector<EdgeId> sp_route(const Topology& t, std::span<const NodeId> users, ProtocolKind kind)
{
    std::vector<EdgeId> route;
    if (kind == ProtocolKind::kSpTree) {
        auto tree = steiner_tree(GraphView(t), users);
        if (!tree)
            throw InfeasibleError("users are not connected in the topology");
        return tree->edges;
    }
    CentrePlan plan = select_centre(t, users);
    for (const UserPath& p : plan.routing.paths)
        route.insert(route.end(), p.edges.begin(), p.edges.end());
    std::sort(route.begin(), route.end());
    return route;
}

ProtocolOutcome run_sp(const Topology& t, const ProtocolConfig& cfg, Rng rng)
{
    validate_config(t, cfg);
    const CentrePlan plan = select_centre(t, cfg.users);
    NetworkState state(t, cfg.q_c, std::move(rng), cfg.bell_pairs);
    std::size_t consumed = 0;
    for (int slot = 1; slot <= cfg.max_timeslots; ++slot) {
        state.advance_timeslot();
        for (const UserPath& p : plan.routing.paths) {
            if (p.user == plan.centre || state.has_bell_pair(p.user))
                continue;
            if (std::all_of(p.edges.begin(), p.edges.end(),
                            [&](EdgeId e) { return state.is_present(e); })) {
                state.consume_path(p.edges, p.user, plan.centre);
                consumed += p.edges.size();
            }
        }
        if (all_served(state, cfg.users, plan.centre)) {
            state.release_bell_pairs();
            return success(slot, 1, cfg.users.size(), consumed);
        }
    }
    return failure(cfg, consumed);
}

ProtocolOutcome run_sp_tree(const Topology& t, const ProtocolConfig& cfg, Rng rng)
{
    validate_config(t, cfg);
    const std::vector<EdgeId> tree = sp_route(t, cfg.users, ProtocolKind::kSpTree);
    NetworkState state(t, cfg.q_c, std::move(rng), cfg.bell_pairs);
    for (int slot = 1; slot <= cfg.max_timeslots; ++slot) {
        state.advance_timeslot();
        if (std::all_of(tree.begin(), tree.end(), [&](EdgeId e) { return state.is_present(e); })) {
            state.consume_tree(tree);
            return success(slot, 1, cfg.users.size(), tree.size());
        }
    }
    return failure(cfg, 0);
}

ProtocolOutcome run_mp_gplus(const Topology& t, const ProtocolConfig& cfg, Rng rng)
{
    validate_config(t, cfg);
    const NodeId centre = select_centre_node(t, cfg.users);
    NetworkState state(t, cfg.q_c, std::move(rng), cfg.bell_pairs);
    std::size_t consumed = 0;
    std::vector<NodeId> pending;
    for (int slot = 1; slot <= cfg.max_timeslots; ++slot) {
        state.advance_timeslot();
        pending.clear();
        for (NodeId u : cfg.users)
            if (u != centre && !state.has_bell_pair(u))
                pending.push_back(u);
        if (!pending.empty()) {
            RoutingSolution sol =
                disjoint_paths_to_centre(GraphView(t, state.present_mask()), centre, pending);
            for (const UserPath& p : sol.paths) {
                state.consume_path(p.edges, p.user, centre);
                consumed += p.edges.size();
            }
        }
        if (all_served(state, cfg.users, centre)) {
            state.release_bell_pairs();
            return success(slot, 1, cfg.users.size(), consumed);
        }
    }
    return failure(cfg, consumed);
}

ProtocolOutcome run_mp_c(const Topology& t, const ProtocolConfig& cfg, Rng rng)
{
    validate_config(t, cfg);
    NetworkState state(t, cfg.q_c, std::move(rng), cfg.bell_pairs);
    for (int slot = 1; slot <= cfg.max_timeslots; ++slot) {
        state.advance_timeslot();
        GraphView live(t, state.present_mask());
        if (!has_connecting_tree(live, cfg.users))
            continue;
        std::optional<SteinerTree> tree = steiner_tree(live, cfg.users);
        state.consume_tree(tree->edges);
        return success(slot, 1, cfg.users.size(), tree->edges.size());
    }
    return failure(cfg, 0);
}

ProtocolOutcome run_mp_p(const Topology& t, const ProtocolConfig& cfg, Rng rng)
{
    validate_config(t, cfg);
    NetworkState state(t, cfg.q_c, std::move(rng), cfg.bell_pairs);
    for (int slot = 1; slot <= cfg.max_timeslots; ++slot) {
        state.advance_timeslot();
        if (!has_connecting_tree(GraphView(t, state.present_mask()), cfg.users))
            continue;
        int trees = 0;
        std::size_t consumed = 0;
        // The view is rebuilt after each consumption, so every tree only sees live links.
        while (has_connecting_tree(GraphView(t, state.present_mask()), cfg.users)) {
            std::optional<SteinerTree> tree =
                steiner_tree(GraphView(t, state.present_mask()), cfg.users);
            state.consume_tree(tree->edges);
            consumed += tree->edges.size();
            ++trees;
        }
        return success(slot, trees, cfg.users.size(), consumed);
    }
    return failure(cfg, 0);
}

ProtocolOutcome run_protocol(ProtocolKind kind, const Topology& t, const ProtocolConfig& cfg,
                             Rng rng)
{
    switch (kind) {
    case ProtocolKind::kSp: return run_sp(t, cfg, std::move(rng));
    case ProtocolKind::kSpTree: return run_sp_tree(t, cfg, std::move(rng));
    case ProtocolKind::kMpGPlus: return run_mp_gplus(t, cfg, std::move(rng));
    case ProtocolKind::kMpC: return run_mp_c(t, cfg, std::move(rng));
    case ProtocolKind::kMpP: return run_mp_p(t, cfg, std::move(rng));
    }
    throw ValidationError("unknown protocol");
}

} // namespace ghznet
