#include "ghznet/routing.hpp"

#include "ghznet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ghznet {

GraphView::GraphView(const Topology& t, std::span<const std::uint8_t> present)
    : topology_(&t), mask_(present)
{
    if (present.size() != t.edge_count())
        throw std::invalid_argument("edge mask size does not match topology");
}

namespace {

constexpr int kUnreached = -1;

std::vector<int> bfs_distances(const GraphView& g, NodeId source)
{
    std::vector<int> dist(g.node_count(), kUnreached);
    std::queue<NodeId> q;
    dist[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        NodeId x = q.front();
        q.pop();
        int dx = dist[static_cast<std::size_t>(x)];
        g.for_each_neighbor(x, [&](const Incidence& inc) {
            auto& d = dist[static_cast<std::size_t>(inc.neighbor)];
            if (d == kUnreached) {
                d = dx + 1;
                q.push(inc.neighbor);
            }
        });
    }
    return dist;
}

std::vector<NodeId> unique_nodes(std::span<const NodeId> nodes, std::size_t node_count)
{
    std::vector<NodeId> out(nodes.begin(), nodes.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (NodeId n : out)
        if (n < 0 || static_cast<std::size_t>(n) >= node_count)
            throw std::out_of_range("node id " + std::to_string(n) + " out of range");
    return out;
}

// Residual network for unit-capacity flows on small graphs.
struct FlowNetwork
{
    struct Arc
    {
        int to;
        int cap;
        int cost;
        int rev;
        EdgeId edge;  // topology edge, -1 for virtual arcs
    };

    explicit FlowNetwork(std::size_t n) : out(n) {}

    void add(int from, int to, int cap, int cost, EdgeId edge)
    {
        auto f = static_cast<std::size_t>(from), t = static_cast<std::size_t>(to);
        out[f].push_back({to, cap, cost, static_cast<int>(out[t].size()), edge});
        out[t].push_back({from, 0, -cost, static_cast<int>(out[f].size()) - 1, edge});
    }

    std::vector<std::vector<Arc>> out;
};

} // namespace

std::optional<std::vector<EdgeId>> shortest_path(const GraphView& g, NodeId a, NodeId b)
{
    if (a == b)
        return std::vector<EdgeId>{};
    std::vector<int> dist = bfs_distances(g, b);
    if (dist[static_cast<std::size_t>(a)] == kUnreached)
        return std::nullopt;
    std::vector<EdgeId> path;
    NodeId at = a;
    while (at != b) {
        int want = dist[static_cast<std::size_t>(at)] - 1;
        for (const Incidence& inc : g.topology().neighbors(at)) {
            if (g.usable(inc.edge) && dist[static_cast<std::size_t>(inc.neighbor)] == want) {
                path.push_back(inc.edge);
                at = inc.neighbor;
                break;
            }
        }
    }
    return path;
}

std::vector<NodeId> path_nodes(const Topology& t, NodeId start, std::span<const EdgeId> path)
{
    std::vector<NodeId> nodes{start};
    for (EdgeId e : path) {
        const Edge& edge = t.edge(e);
        if (!edge.touches(nodes.back()))
            throw std::invalid_argument("edge sequence is not a walk");
        nodes.push_back(edge.other(nodes.back()));
    }
    return nodes;
}

RoutingSolution disjoint_paths_to_centre(const GraphView& g, NodeId centre,
                                         std::span<const NodeId> users)
{
    const Topology& t = g.topology();
    const std::size_t n = t.node_count();
    std::vector<NodeId> wanted = unique_nodes(users, n);

    RoutingSolution sol;
    sol.centre = centre;
    std::vector<char> is_sink_user(n, 0);
    for (NodeId u : wanted) {
        if (u == centre) {
            sol.paths.push_back({u, {}});
            ++sol.users_served;
        } else {
            is_sink_user[static_cast<std::size_t>(u)] = 1;
        }
    }

    const int sink = static_cast<int>(n);
    FlowNetwork net(n + 1);
    for (std::size_t i = 0; i < t.edge_count(); ++i) {
        auto e = static_cast<EdgeId>(i);
        if (!g.usable(e))
            continue;
        const Edge& edge = t.edge(e);
        net.add(edge.u, edge.v, 1, 1, e);
        net.add(edge.v, edge.u, 1, 1, e);
    }
    std::vector<int> sink_arc(n, -1);
    for (NodeId u : wanted)
        if (is_sink_user[static_cast<std::size_t>(u)]) {
            sink_arc[static_cast<std::size_t>(u)] =
                static_cast<int>(net.out[static_cast<std::size_t>(u)].size());
            net.add(u, sink, 1, 0, -1);
        }

    // Successive shortest paths; Bellman-Ford handles the negative residual costs.
    const int inf = std::numeric_limits<int>::max();
    std::vector<int> dist(n + 1);
    std::vector<std::pair<int, int>> prev(n + 1);
    std::vector<char> queued(n + 1);
    for (;;) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(queued.begin(), queued.end(), 0);
        std::deque<int> q;
        dist[static_cast<std::size_t>(centre)] = 0;
        q.push_back(centre);
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            queued[static_cast<std::size_t>(x)] = 0;
            const auto& arcs = net.out[static_cast<std::size_t>(x)];
            for (std::size_t k = 0; k < arcs.size(); ++k) {
                const auto& a = arcs[k];
                if (a.cap <= 0)
                    continue;
                int nd = dist[static_cast<std::size_t>(x)] + a.cost;
                auto to = static_cast<std::size_t>(a.to);
                if (nd < dist[to]) {
                    dist[to] = nd;
                    prev[to] = {x, static_cast<int>(k)};
                    if (!queued[to]) {
                        queued[to] = 1;
                        q.push_back(a.to);
                    }
                }
            }
        }
        if (dist[static_cast<std::size_t>(sink)] == inf)
            break;
        for (int v = sink; v != centre;) {
            auto [u, k] = prev[static_cast<std::size_t>(v)];
            auto& a = net.out[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)];
            a.cap -= 1;
            net.out[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.rev)].cap += 1;
            v = u;
        }
    }

    // Decompose the unit flow into centre -> user walks.
    std::vector<std::vector<int>> flow_arcs(n);
    for (std::size_t x = 0; x < n; ++x) {
        const auto& arcs = net.out[x];
        for (std::size_t k = 0; k < arcs.size(); ++k) {
            const auto& a = arcs[k];
            // Forward real arcs have a positive cost; flow shows as a saturated arc.
            if (a.edge >= 0 && a.cost > 0 && a.cap == 0)
                flow_arcs[x].push_back(a.to);
        }
    }
    std::vector<char> sink_open(n, 0);
    for (std::size_t x = 0; x < n; ++x)
        if (sink_arc[x] >= 0 && net.out[x][static_cast<std::size_t>(sink_arc[x])].cap == 0)
            sink_open[x] = 1;
    std::vector<std::size_t> cursor(n, 0);
    for (;;) {
        NodeId at = centre;
        std::vector<EdgeId> walk;
        bool done = false;
        while (!done) {
            auto ax = static_cast<std::size_t>(at);
            if (at != centre && sink_open[ax]) {
                sink_open[ax] = 0;
                done = true;
                break;
            }
            if (cursor[ax] >= flow_arcs[ax].size())
                break;
            NodeId next = flow_arcs[ax][cursor[ax]++];
            walk.push_back(*t.find_edge(at, next));
            at = next;
        }
        if (!done)
            break;
        std::reverse(walk.begin(), walk.end());
        sol.total_edges += walk.size();
        ++sol.users_served;
        sol.paths.push_back({at, std::move(walk)});
    }
    std::sort(sol.paths.begin(), sol.paths.end(),
              [](const UserPath& a, const UserPath& b) { return a.user < b.user; });
    return sol;
}

bool has_connecting_tree(const GraphView& g, std::span<const NodeId> terminals)
{
    if (terminals.empty())
        return false;
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> stack{terminals.front()};
    seen[static_cast<std::size_t>(terminals.front())] = 1;
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        g.for_each_neighbor(x, [&](const Incidence& inc) {
            auto k = static_cast<std::size_t>(inc.neighbor);
            if (!seen[k]) {
                seen[k] = 1;
                stack.push_back(inc.neighbor);
            }
        });
    }
    return std::all_of(terminals.begin(), terminals.end(),
                       [&](NodeId s) { return seen[static_cast<std::size_t>(s)] != 0; });
}

std::vector<SteinerTree> greedy_tree_packing(const GraphView& g, std::span<const NodeId> terminals)
{
    const Topology& t = g.topology();
    std::vector<std::uint8_t> mask(t.edge_count());
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = g.usable(static_cast<EdgeId>(i)) ? 1 : 0;
    std::vector<SteinerTree> trees;
    for (;;) {
        GraphView rest(t, mask);
        if (!has_connecting_tree(rest, terminals))
            break;
        std::optional<SteinerTree> tree = steiner_tree(rest, terminals);
        if (!tree)
            break;
        for (EdgeId e : tree->edges)
            mask[static_cast<std::size_t>(e)] = 0;
        trees.push_back(std::move(*tree));
    }
    return trees;
}

CentrePlan select_centre(const Topology& t, std::span<const NodeId> users)
{
    std::vector<NodeId> wanted = unique_nodes(users, t.node_count());
    if (wanted.size() < 2)
        throw ValidationError("at least two distinct users are required");
    GraphView full(t);
    std::optional<CentrePlan> best;
    bool any_degree_feasible = false;
    for (std::size_t c = 0; c < t.node_count(); ++c) {
        auto centre = static_cast<NodeId>(c);
        bool is_user = std::binary_search(wanted.begin(), wanted.end(), centre);
        std::size_t memories_needed = wanted.size() - (is_user ? 1 : 0);
        if (t.degree(centre) < memories_needed)
            continue;
        any_degree_feasible = true;
        RoutingSolution routing = disjoint_paths_to_centre(full, centre, wanted);
        if (routing.users_served != wanted.size())
            continue;
        double log_rate = 0.0;
        for (const UserPath& p : routing.paths)
            for (EdgeId e : p.edges)
                log_rate += std::log(t.edge(e).p_e);
        if (!best || log_rate > best->log_rate)
            best = CentrePlan{centre, std::move(routing), log_rate};
    }
    if (!best) {
        if (!any_degree_feasible)
            throw InfeasibleError("no centre node has enough memories: need degree >= " +
                                  std::to_string(wanted.size()) + " (or >= " +
                                  std::to_string(wanted.size() - 1) + " for a user node)");
        throw InfeasibleError("no centre node admits edge-disjoint paths to all users");
    }
    return *best;
}

NodeId select_centre_node(const Topology& t, std::span<const NodeId> users)
{
    return select_centre(t, users).centre;
}

namespace {

// Max number of edge-disjoint paths from source to any node flagged in `targets`
// (Edmonds-Karp on undirected unit capacities).
int max_disjoint_paths(const Topology& t, NodeId source, const std::vector<char>& targets)
{
    const std::size_t n = t.node_count();
    const int sink = static_cast<int>(n);
    FlowNetwork net(n + 1);
    for (const Edge& e : t.edges()) {
        // One arc pair with capacity in both directions models an undirected unit edge.
        auto fu = static_cast<std::size_t>(e.u), fv = static_cast<std::size_t>(e.v);
        net.out[fu].push_back({e.v, 1, 0, static_cast<int>(net.out[fv].size()), -1});
        net.out[fv].push_back({e.u, 1, 0, static_cast<int>(net.out[fu].size()) - 1, -1});
    }
    for (std::size_t x = 0; x < n; ++x)
        if (targets[x])
            net.add(static_cast<int>(x), sink, static_cast<int>(t.edge_count()) + 1, 0, -1);

    int flow = 0;
    std::vector<std::pair<int, int>> prev(n + 1);
    for (;;) {
        std::vector<char> seen(n + 1, 0);
        std::queue<int> q;
        q.push(source);
        seen[static_cast<std::size_t>(source)] = 1;
        while (!q.empty() && !seen[static_cast<std::size_t>(sink)]) {
            int x = q.front();
            q.pop();
            const auto& arcs = net.out[static_cast<std::size_t>(x)];
            for (std::size_t k = 0; k < arcs.size(); ++k) {
                auto to = static_cast<std::size_t>(arcs[k].to);
                if (arcs[k].cap > 0 && !seen[to]) {
                    seen[to] = 1;
                    prev[to] = {x, static_cast<int>(k)};
                    q.push(arcs[k].to);
                }
            }
        }
        if (!seen[static_cast<std::size_t>(sink)])
            return flow;
        for (int v = sink; v != source;) {
            auto [u, k] = prev[static_cast<std::size_t>(v)];
            auto& a = net.out[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)];
            a.cap -= 1;
            net.out[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.rev)].cap += 1;
            v = u;
        }
        ++flow;
    }
}

} // namespace

int min_user_cut_bound(const Topology& t, std::span<const NodeId> users)
{
    std::vector<NodeId> wanted = unique_nodes(users, t.node_count());
    if (wanted.size() < 2)
        throw std::domain_error("min cut needs at least two distinct users");
    int best = std::numeric_limits<int>::max();
    for (NodeId u : wanted) {
        std::vector<char> targets(t.node_count(), 0);
        for (NodeId w : wanted)
            if (w != u)
                targets[static_cast<std::size_t>(w)] = 1;
        best = std::min(best, max_disjoint_paths(t, u, targets));
    }
    return best;
}

std::vector<int> component_labels(const GraphView& g)
{
    std::vector<int> label(g.node_count(), -1);
    int next = 0;
    std::vector<NodeId> stack;
    for (std::size_t s = 0; s < label.size(); ++s) {
        if (label[s] >= 0)
            continue;
        label[s] = next;
        stack.push_back(static_cast<NodeId>(s));
        while (!stack.empty()) {
            NodeId x = stack.back();
            stack.pop_back();
            g.for_each_neighbor(x, [&](const Incidence& inc) {
                auto k = static_cast<std::size_t>(inc.neighbor);
                if (label[k] < 0) {
                    label[k] = next;
                    stack.push_back(inc.neighbor);
                }
            });
        }
        ++next;
    }
    return label;
}

std::size_t largest_component_size(const GraphView& g)
{
    std::vector<int> label = component_labels(g);
    std::vector<std::size_t> size(label.size(), 0);
    std::size_t best = 0;
    for (int l : label)
        best = std::max(best, ++size[static_cast<std::size_t>(l)]);
    return best;
}

} // namespace ghznet
