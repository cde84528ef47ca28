#include "ghznet/routing.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ghznet {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

struct BfsTree
{
    std::vector<int> dist;
    std::vector<EdgeId> via;  // edge used to reach each node, -1 at the root
};

BfsTree bfs_tree(const GraphView& g, NodeId root)
{
    BfsTree b{std::vector<int>(g.node_count(), kInf), std::vector<EdgeId>(g.node_count(), -1)};
    std::queue<NodeId> q;
    b.dist[static_cast<std::size_t>(root)] = 0;
    q.push(root);
    while (!q.empty()) {
        NodeId x = q.front();
        q.pop();
        g.for_each_neighbor(x, [&](const Incidence& inc) {
            auto k = static_cast<std::size_t>(inc.neighbor);
            if (b.dist[k] == kInf) {
                b.dist[k] = b.dist[static_cast<std::size_t>(x)] + 1;
                b.via[k] = inc.edge;
                q.push(inc.neighbor);
            }
        });
    }
    return b;
}

// Dijkstra from root with integer edge costs; equal-cost ties keep the first
// relaxation, and the heap pops by (cost, node) so the result is deterministic.
template <typename Cost>
BfsTree cheapest_tree(const GraphView& g, NodeId root, Cost cost)
{
    BfsTree b{std::vector<int>(g.node_count(), kInf), std::vector<EdgeId>(g.node_count(), -1)};
    using Item = std::pair<int, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    b.dist[static_cast<std::size_t>(root)] = 0;
    heap.push({0, root});
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (d != b.dist[static_cast<std::size_t>(x)])
            continue;
        g.for_each_neighbor(x, [&](const Incidence& inc) {
            auto k = static_cast<std::size_t>(inc.neighbor);
            int nd = d + cost(inc.edge);
            if (nd < b.dist[k]) {
                b.dist[k] = nd;
                b.via[k] = inc.edge;
                heap.push({nd, inc.neighbor});
            }
        });
    }
    return b;
}

// Appends the edges of the BFS-tree path from the tree root to `target`.
void append_path(const Topology& t, const BfsTree& from, NodeId target,
                 std::vector<std::uint8_t>& mask)
{
    NodeId at = target;
    while (from.via[static_cast<std::size_t>(at)] >= 0) {
        EdgeId e = from.via[static_cast<std::size_t>(at)];
        mask[static_cast<std::size_t>(e)] = 1;
        at = t.edge(e).other(at);
    }
}

std::vector<NodeId> checked_terminals(const GraphView& g, std::span<const NodeId> terminals)
{
    std::vector<NodeId> out(terminals.begin(), terminals.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.size() < 2)
        throw std::domain_error("a Steiner tree needs at least two distinct terminals");
    for (NodeId n : out)
        if (n < 0 || static_cast<std::size_t>(n) >= g.node_count())
            throw std::out_of_range("terminal out of range");
    return out;
}

// Spanning tree of the masked subgraph reachable from the first terminal, with
// non-terminal leaves pruned until every leaf is a terminal.
SteinerTree finish_tree(const Topology& t, const std::vector<std::uint8_t>& mask,
                        std::vector<NodeId> terminals)
{
    GraphView sub(t, mask);
    BfsTree span = bfs_tree(sub, terminals.front());
    std::vector<std::uint8_t> keep(t.edge_count(), 0);
    std::vector<int> degree(t.node_count(), 0);
    for (std::size_t x = 0; x < t.node_count(); ++x) {
        EdgeId e = span.via[x];
        if (e >= 0) {
            keep[static_cast<std::size_t>(e)] = 1;
            ++degree[static_cast<std::size_t>(t.edge(e).u)];
            ++degree[static_cast<std::size_t>(t.edge(e).v)];
        }
    }
    std::vector<char> is_terminal(t.node_count(), 0);
    for (NodeId s : terminals)
        is_terminal[static_cast<std::size_t>(s)] = 1;
    std::vector<NodeId> leaves;
    for (std::size_t x = 0; x < t.node_count(); ++x)
        if (degree[x] == 1 && !is_terminal[x])
            leaves.push_back(static_cast<NodeId>(x));
    while (!leaves.empty()) {
        NodeId leaf = leaves.back();
        leaves.pop_back();
        for (const Incidence& inc : t.neighbors(leaf)) {
            auto e = static_cast<std::size_t>(inc.edge);
            if (!keep[e])
                continue;
            keep[e] = 0;
            degree[static_cast<std::size_t>(leaf)] = 0;
            auto nb = static_cast<std::size_t>(inc.neighbor);
            if (--degree[nb] == 1 && !is_terminal[nb])
                leaves.push_back(inc.neighbor);
            break;
        }
    }
    SteinerTree tree;
    for (std::size_t e = 0; e < keep.size(); ++e)
        if (keep[e])
            tree.edges.push_back(static_cast<EdgeId>(e));
    tree.terminals = std::move(terminals);
    return tree;
}

} // namespace

std::optional<SteinerTree> steiner_tree(const GraphView& g, std::span<const NodeId> terminals)
{
    std::vector<NodeId> terms = checked_terminals(g, terminals);
    if (terms.size() <= kExactSteinerTerminalLimit)
        return steiner_tree_exact(g, terms);
    return steiner_tree_kmb(g, terms);
}

std::optional<SteinerTree> steiner_tree_kmb(const GraphView& g, std::span<const NodeId> terminals)
{
    std::vector<NodeId> terms = checked_terminals(g, terminals);
    const Topology& t = g.topology();
    const std::size_t k = terms.size();

    std::vector<BfsTree> trees;
    trees.reserve(k);
    for (NodeId s : terms)
        trees.push_back(bfs_tree(g, s));
    for (std::size_t i = 1; i < k; ++i)
        if (trees[0].dist[static_cast<std::size_t>(terms[i])] == kInf)
            return std::nullopt;

    // Prim on the terminal metric closure; ties resolved by terminal order.
    std::vector<char> in_tree(k, 0);
    std::vector<int> best(k, kInf);
    std::vector<std::size_t> link(k, 0);
    std::vector<std::uint8_t> mask(t.edge_count(), 0);
    in_tree[0] = 1;
    for (std::size_t j = 1; j < k; ++j)
        best[j] = trees[0].dist[static_cast<std::size_t>(terms[j])];
    for (std::size_t step = 1; step < k; ++step) {
        std::size_t pick = k;
        for (std::size_t j = 0; j < k; ++j)
            if (!in_tree[j] && (pick == k || best[j] < best[pick]))
                pick = j;
        in_tree[pick] = 1;
        append_path(t, trees[link[pick]], terms[pick], mask);
        for (std::size_t j = 0; j < k; ++j) {
            int d = trees[pick].dist[static_cast<std::size_t>(terms[j])];
            if (!in_tree[j] && d < best[j]) {
                best[j] = d;
                link[j] = pick;
            }
        }
    }
    return finish_tree(t, mask, std::move(terms));
}

std::optional<SteinerTree> steiner_tree_exact(const GraphView& g,
                                              std::span<const NodeId> terminals)
{
    std::vector<NodeId> terms = checked_terminals(g, terminals);
    if (terms.size() > 16)
        throw std::domain_error("exact Steiner tree limited to 16 terminals");
    if (!has_connecting_tree(g, terms))
        return std::nullopt;

    const Topology& t = g.topology();
    const std::size_t n = t.node_count();
    const std::size_t k = terms.size();
    const std::size_t full = (std::size_t{1} << k) - 1;

    // Primary cost is the edge count. Among minimum trees, prefer those that spend
    // fewer edges at terminals: each terminal-incident edge occupies a user memory
    // that a later tree in a packing could otherwise use. The scale keeps the
    // secondary term (at most 2 per edge, 2n per tree) below one unit of edge count.
    std::vector<char> is_terminal(n, 0);
    for (NodeId s : terms)
        is_terminal[static_cast<std::size_t>(s)] = 1;
    const int scale = 2 * static_cast<int>(n) + 1;
    auto cost = [&](EdgeId e) {
        const Edge& ed = t.edge(e);
        return scale + is_terminal[static_cast<std::size_t>(ed.u)] +
               is_terminal[static_cast<std::size_t>(ed.v)];
    };
    std::vector<BfsTree> from;
    from.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        from.push_back(cheapest_tree(g, static_cast<NodeId>(v), cost));
    auto dist = [&](std::size_t a, std::size_t b) { return from[a].dist[b]; };

    // merged[m][v]: cheapest tree spanning terminal set m in which v has degree >= 2
    // (or v is the lone terminal). best[m][v]: cheapest tree spanning m plus v.
    std::vector<std::vector<int>> merged(full + 1, std::vector<int>(n, kInf));
    std::vector<std::vector<int>> best(full + 1, std::vector<int>(n, kInf));
    std::vector<std::vector<std::size_t>> split(full + 1, std::vector<std::size_t>(n, 0));
    std::vector<std::vector<std::size_t>> anchor(full + 1, std::vector<std::size_t>(n, 0));

    for (std::size_t m = 1; m <= full; ++m) {
        if ((m & (m - 1)) == 0) {
            std::size_t i = static_cast<std::size_t>(__builtin_ctzll(m));
            merged[m][static_cast<std::size_t>(terms[i])] = 0;
        } else {
            const std::size_t low = m & (~m + 1);
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t sub = (m - 1) & m; sub > 0; sub = (sub - 1) & m) {
                    if (!(sub & low))
                        continue;
                    int a = best[sub][v], b = best[m ^ sub][v];
                    if (a >= kInf || b >= kInf)
                        continue;
                    if (a + b < merged[m][v]) {
                        merged[m][v] = a + b;
                        split[m][v] = sub;
                    }
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t u = 0; u < n; ++u) {
                if (merged[m][u] >= kInf || dist(u, v) >= kInf)
                    continue;
                int c = merged[m][u] + dist(u, v);
                if (c < best[m][v]) {
                    best[m][v] = c;
                    anchor[m][v] = u;
                }
            }
        }
    }

    std::vector<std::uint8_t> mask(t.edge_count(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> work{{full, static_cast<std::size_t>(terms[0])}};
    while (!work.empty()) {
        auto [m, v] = work.back();
        work.pop_back();
        std::size_t u = anchor[m][v];
        append_path(t, from[u], static_cast<NodeId>(v), mask);
        if ((m & (m - 1)) == 0)
            continue;
        std::size_t sub = split[m][u];
        work.emplace_back(sub, u);
        work.emplace_back(m ^ sub, u);
    }
    return finish_tree(t, mask, std::move(terms));
}

} // namespace ghznet
