#include "ghznet/errors.hpp"
#include "ghznet/routing.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

using namespace ghznet;

namespace {

Topology make(std::size_t n, std::initializer_list<std::pair<int, int>> pairs, double p = 1.0)
{
    std::vector<Edge> edges;
    for (auto [a, b] : pairs)
        edges.push_back({a, b, 0.0, p, p});
    return Topology("fixture", n, edges, 0.0);
}

std::vector<Topology> small_graphs()
{
    std::ifstream in(std::string(GHZNET_TEST_DIR) + "/fixtures/small_graphs.txt");
    REQUIRE(in);
    std::vector<Topology> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::size_t n;
        ls >> n;
        std::vector<Edge> edges;
        std::string tok;
        while (ls >> tok) {
            auto dash = tok.find('-');
            edges.push_back({std::stoi(tok.substr(0, dash)), std::stoi(tok.substr(dash + 1)), 0.0,
                             1.0, 1.0});
        }
        out.emplace_back("small", n, edges, 0.0);
    }
    return out;
}

// All subsets of {0..n-1} with size in [lo, hi].
std::vector<std::vector<NodeId>> subsets(int n, int lo, int hi)
{
    std::vector<std::vector<NodeId>> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        int k = __builtin_popcount(static_cast<unsigned>(mask));
        if (k < lo || k > hi)
            continue;
        std::vector<NodeId> s;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1)
                s.push_back(i);
        out.push_back(s);
    }
    return out;
}

std::uint64_t tree_mask(const SteinerTree& t)
{
    std::uint64_t m = 0;
    for (EdgeId e : t.edges)
        m |= 1ULL << e;
    return m;
}

void check_tree_shape(const Topology& t, const SteinerTree& tree)
{
    // Acyclic + connected over its own nodes, and every leaf is a terminal.
    std::map<NodeId, int> degree;
    for (EdgeId e : tree.edges) {
        ++degree[t.edge(e).u];
        ++degree[t.edge(e).v];
    }
    CHECK(degree.size() == tree.edges.size() + 1);
    CHECK(oracle::connects(t, tree_mask(tree), tree.terminals));
    for (auto [node, d] : degree)
        if (d == 1)
            CHECK(std::binary_search(tree.terminals.begin(), tree.terminals.end(), node));
}

// Exhaustive search over per-user simple paths: most users served, then fewest edges.
std::pair<int, int> best_disjoint_paths(const Topology& t, NodeId centre,
                                        const std::vector<NodeId>& users)
{
    std::vector<std::vector<std::uint64_t>> options;
    for (NodeId u : users) {
        std::vector<std::uint64_t> opts;
        for (const auto& nodes : oracle::all_simple_paths(t, u, centre)) {
            std::uint64_t m = 0;
            for (std::size_t k = 1; k < nodes.size(); ++k)
                m |= 1ULL << *t.find_edge(nodes[k - 1], nodes[k]);
            opts.push_back(m);
        }
        options.push_back(opts);
    }
    std::pair<int, int> best{0, 0};  // (served, -edges)
    std::function<void(std::size_t, std::uint64_t, int)> rec = [&](std::size_t i,
                                                                    std::uint64_t used, int served) {
        if (i == users.size()) {
            std::pair<int, int> score{served, -__builtin_popcountll(used)};
            best = std::max(best, score);
            return;
        }
        rec(i + 1, used, served);
        for (std::uint64_t m : options[i])
            if (!(m & used))
                rec(i + 1, used | m, served + 1);
    };
    rec(0, 0, 0);
    return {best.first, -best.second};
}

void check_solution(const Topology& t, const RoutingSolution& sol, NodeId centre)
{
    std::set<EdgeId> seen;
    std::size_t total = 0;
    for (const UserPath& p : sol.paths) {
        for (EdgeId e : p.edges)
            CHECK(seen.insert(e).second);
        total += p.edges.size();
        auto nodes = path_nodes(t, p.user, p.edges);
        CHECK(nodes.front() == p.user);
        CHECK(nodes.back() == centre);
    }
    CHECK(total == sol.total_edges);
    CHECK(sol.users_served == sol.paths.size());
}

} // namespace

TEST_CASE("shortest paths")
{
    Topology g = build_grid(3, 1.0);
    SUBCASE("adjacent nodes")
    {
        auto p = shortest_path(GraphView(g), 0, 1);
        REQUIRE(p);
        CHECK(*p == std::vector<EdgeId>{*g.find_edge(0, 1)});
    }
    SUBCASE("opposite corners take the lexicographically smallest 4-hop path")
    {
        auto p = shortest_path(GraphView(g), 0, 8);
        REQUIRE(p);
        CHECK(p->size() == 4);
        CHECK(path_nodes(g, 0, *p) == *oracle::lexicographic_shortest(g, 0, 8));
        CHECK(path_nodes(g, 0, *p) == std::vector<NodeId>{0, 1, 2, 5, 8});
    }
    SUBCASE("disconnected")
    {
        std::vector<std::uint8_t> none(g.edge_count(), 0);
        CHECK_FALSE(shortest_path(GraphView(g, none), 0, 8).has_value());
    }
    SUBCASE("agrees with path enumeration on random graphs")
    {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 60; ++trial) {
            Topology t = oracle::random_connected(rng, 7, 10);
            for (NodeId a = 0; a < 7; ++a)
                for (NodeId b = 0; b < 7; ++b) {
                    if (a == b)
                        continue;
                    auto p = shortest_path(GraphView(t), a, b);
                    REQUIRE(p);
                    CHECK(path_nodes(t, a, *p) == *oracle::lexicographic_shortest(t, a, b));
                }
        }
    }
}

TEST_CASE("edge-disjoint paths to a centre")
{
    SUBCASE("star")
    {
        Topology star = make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
        std::vector<NodeId> users{1, 2, 3, 4};
        RoutingSolution sol = disjoint_paths_to_centre(GraphView(star), 0, users);
        CHECK(sol.users_served == 4);
        CHECK(sol.total_edges == 4);
        check_solution(star, sol, 0);
    }
    SUBCASE("bottleneck fixture needs seven links")
    {
        // Users 2, 3, 4 all hang off node 1, but only one path may use the 0-1 edge.
        Topology t = make(8, {{0, 1}, {1, 2}, {1, 3}, {1, 4}, {0, 5}, {5, 2}, {0, 6}, {6, 7}, {7, 3}});
        std::vector<NodeId> users{2, 3, 4};
        RoutingSolution sol = disjoint_paths_to_centre(GraphView(t), 0, users);
        auto [served, edges] = best_disjoint_paths(t, 0, users);
        CHECK(served == 3);
        CHECK(edges == 7);
        CHECK(sol.users_served == 3);
        CHECK(sol.total_edges == 7);
        check_solution(t, sol, 0);
    }
    SUBCASE("only two of three users reachable")
    {
        Topology t = make(5, {{0, 1}, {1, 2}, {0, 3}});
        std::vector<NodeId> users{2, 3, 4};
        RoutingSolution sol = disjoint_paths_to_centre(GraphView(t), 0, users);
        CHECK(sol.users_served == 2);
    }
    SUBCASE("the centre may itself be a user")
    {
        Topology t = make(3, {{0, 1}, {1, 2}});
        std::vector<NodeId> users{1, 2};
        RoutingSolution sol = disjoint_paths_to_centre(GraphView(t), 1, users);
        CHECK(sol.users_served == 2);
        CHECK(sol.total_edges == 1);
    }
    SUBCASE("random fixtures: max flow and fewest edges")
    {
        std::mt19937_64 rng(20);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 6 + trial % 5;
            const int m = std::min(n - 1 + trial % 9, 14);
            Topology t = oracle::random_connected(rng, n, m);
            std::uniform_int_distribution<int> node(0, n - 1);
            const NodeId centre = node(rng);
            std::set<NodeId> picked;
            while (picked.size() < 3)
                picked.insert(node(rng));
            std::vector<NodeId> users(picked.begin(), picked.end());
            RoutingSolution sol = disjoint_paths_to_centre(GraphView(t), centre, users);
            CHECK(static_cast<int>(sol.users_served) ==
                  oracle::max_users_served(t, oracle::full_mask(t), centre, users));
            auto [served, edges] = best_disjoint_paths(t, centre, users);
            CHECK(static_cast<int>(sol.users_served) == served);
            CHECK(static_cast<int>(sol.total_edges) == edges);
            check_solution(t, sol, centre);
        }
    }
}

TEST_CASE("Steiner trees")
{
    SUBCASE("path graph endpoints")
    {
        Topology path = make(4, {{0, 1}, {1, 2}, {2, 3}});
        std::vector<NodeId> terms{0, 3};
        auto tree = steiner_tree(GraphView(path), terms);
        REQUIRE(tree);
        CHECK(tree->edges == std::vector<EdgeId>{0, 1, 2});
    }
    SUBCASE("4-cycle with three terminals")
    {
        Topology c4 = make(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
        std::vector<NodeId> terms{0, 1, 2};
        auto tree = steiner_tree(GraphView(c4), terms);
        REQUIRE(tree);
        CHECK(tree->edges.size() == 2);
    }
    SUBCASE("different components")
    {
        Topology t = make(4, {{0, 1}, {2, 3}});
        std::vector<NodeId> terms{0, 3};
        CHECK_FALSE(steiner_tree(GraphView(t), terms).has_value());
        CHECK_FALSE(has_connecting_tree(GraphView(t), terms));
    }
    SUBCASE("fewer than two terminals")
    {
        Topology t = make(2, {{0, 1}});
        std::vector<NodeId> one{1}, dup{1, 1};
        CHECK_THROWS_AS(steiner_tree(GraphView(t), one), std::domain_error);
        CHECK_THROWS_AS(steiner_tree(GraphView(t), dup), std::domain_error);
    }
    SUBCASE("heuristic can miss the optimum that the exact solver finds")
    {
        // Terminals 0, 1, 2 with a hub 5 adjacent to all three.
        Topology t = make(6, {{0, 3}, {3, 1}, {1, 4}, {4, 2}, {0, 5}, {1, 5}, {2, 5}});
        std::vector<NodeId> terms{0, 1, 2};
        auto exact = steiner_tree_exact(GraphView(t), terms);
        auto kmb = steiner_tree_kmb(GraphView(t), terms);
        REQUIRE(exact);
        REQUIRE(kmb);
        CHECK(exact->edges.size() == 3);
        CHECK(kmb->edges.size() <= 2 * exact->edges.size());
        check_tree_shape(t, *kmb);
    }
}

TEST_CASE("Steiner optimum on every small connected graph")
{
    std::size_t mismatches = 0, cases = 0;
    for (const Topology& g : small_graphs()) {
        const int n = static_cast<int>(g.node_count());
        for (const auto& terms : subsets(n, 2, 4)) {
            ++cases;
            auto tree = steiner_tree(GraphView(g), terms);
            REQUIRE(tree);
            auto best = oracle::steiner_optimum(g, oracle::full_mask(g), terms);
            if (static_cast<int>(tree->edges.size()) != *best)
                ++mismatches;
            check_tree_shape(g, *tree);
            auto kmb = steiner_tree_kmb(GraphView(g), terms);
            CHECK(static_cast<int>(kmb->edges.size()) <= 2 * *best);
        }
    }
    CHECK(cases > 10000);
    CHECK(mismatches == 0);
}

TEST_CASE("KMB on larger terminal sets stays within twice the optimum")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        Topology t = oracle::random_connected(rng, 9, 14);
        for (const auto& terms : subsets(9, 5, 6)) {
            if (rng() % 20 != 0)
                continue;
            auto tree = steiner_tree(GraphView(t), terms);
            REQUIRE(tree);
            check_tree_shape(t, *tree);
            auto best = oracle::steiner_optimum(t, oracle::full_mask(t), terms);
            CHECK(static_cast<int>(tree->edges.size()) <= 2 * *best);
        }
    }
}

TEST_CASE("connecting tree exists exactly when a Steiner tree does")
{
    std::mt19937_64 rng(12);
    Topology g = build_grid(4, 0.5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::uint8_t> mask(g.edge_count());
        for (auto& b : mask)
            b = rng() % 2;
        std::vector<NodeId> terms{static_cast<NodeId>(rng() % 16), static_cast<NodeId>(rng() % 16),
                                  static_cast<NodeId>(rng() % 16)};
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        if (terms.size() < 2)
            continue;
        GraphView view(g, mask);
        auto tree = steiner_tree(view, terms);
        CHECK(has_connecting_tree(view, terms) == tree.has_value());
        if (tree)
            for (EdgeId e : tree->edges)
                CHECK(mask[static_cast<std::size_t>(e)] == 1);
    }
    std::vector<std::uint8_t> none(g.edge_count(), 0);
    std::vector<NodeId> corners = grid_corners(4);
    CHECK(has_connecting_tree(GraphView(g), corners));
    CHECK_FALSE(has_connecting_tree(GraphView(g, none), corners));
}

TEST_CASE("greedy tree packing")
{
    SUBCASE("two disjoint trees")
    {
        // Two edge-disjoint trees over terminals {0, 1, 2}: via hub 3 and via hub 4.
        Topology t = make(5, {{0, 3}, {1, 3}, {2, 3}, {0, 4}, {1, 4}, {2, 4}});
        std::vector<NodeId> terms{0, 1, 2};
        auto trees = greedy_tree_packing(GraphView(t), terms);
        CHECK(trees.size() == 2);
        CHECK(oracle::max_tree_packing(t, oracle::full_mask(t), terms, 3) == 2);
    }
    SUBCASE("edgeless graph")
    {
        Topology t = make(3, {{0, 1}, {1, 2}});
        std::vector<std::uint8_t> none(2, 0);
        std::vector<NodeId> terms{0, 2};
        CHECK(greedy_tree_packing(GraphView(t, none), terms).empty());
    }
    SUBCASE("4x4 corners are capped by the corner degree")
    {
        Topology g = build_grid(4, 1.0);
        auto corners = grid_corners(4);
        auto trees = greedy_tree_packing(GraphView(g), corners);
        CHECK(trees.size() <= 2);
        CHECK(trees.size() >= 1);
    }
    SUBCASE("random fixtures: disjoint trees, bounded by the user cut")
    {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 100; ++trial) {
            Topology t = oracle::random_connected(rng, 8, 7 + trial % 10);
            std::vector<NodeId> terms{0, static_cast<NodeId>(1 + rng() % 3),
                                      static_cast<NodeId>(4 + rng() % 4)};
            auto trees = greedy_tree_packing(GraphView(t), terms);
            std::set<EdgeId> used;
            for (const SteinerTree& tr : trees) {
                check_tree_shape(t, tr);
                for (EdgeId e : tr.edges)
                    CHECK(used.insert(e).second);
            }
            CHECK(static_cast<int>(trees.size()) <= min_user_cut_bound(t, terms));
        }
    }
}

TEST_CASE("centre selection")
{
    SUBCASE("path graph ties resolve to the lowest index")
    {
        Topology t = make(3, {{0, 1}, {1, 2}}, 0.6);
        std::vector<NodeId> users{0, 2};
        CHECK(select_centre_node(t, users) == 0);
    }
    SUBCASE("3x3 corners pick the middle")
    {
        Topology g = build_grid(3, 0.7);
        auto corners = grid_corners(3);
        CentrePlan plan = select_centre(g, corners);
        CHECK(plan.centre == 4);
        CHECK(plan.routing.users_served == 4);
        CHECK(plan.routing.total_edges == 8);
    }
    SUBCASE("five boundary users on a grid are infeasible")
    {
        Topology g = build_grid(4, 0.7);
        std::vector<NodeId> users{0, 1, 2, 3, 4};
        CHECK_THROWS_AS(select_centre_node(g, users), InfeasibleError);
    }
    SUBCASE("a degree-feasible node must still reach every user")
    {
        Topology t = make(5, {{0, 1}, {0, 2}, {0, 3}, {3, 4}});
        std::vector<NodeId> users{1, 2, 3};
        CHECK(select_centre_node(t, users) == 0);
    }
    SUBCASE("invariant under uniform scaling of p_e")
    {
        // With one probability everywhere the product is p^|L|, so every p in (0, 1)
        // ranks candidates by routing size alone. (With unequal p_e a common factor
        // c multiplies each candidate by c^|L|, which can reorder candidates of
        // different sizes, so the property is only claimed for uniform p.)
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 50; ++trial) {
            Topology base = oracle::random_connected(rng, 9, 16);
            std::vector<NodeId> users{0, 4, 8};
            std::optional<NodeId> reference;
            bool feasible = true;
            for (double p : {0.9, 0.5, 0.37, 0.05}) {
                Topology t = base.with_uniform_p(p);
                try {
                    NodeId c = select_centre_node(t, users);
                    if (reference)
                        CHECK(c == *reference);
                    reference = c;
                } catch (const InfeasibleError&) {
                    feasible = false;
                }
            }
            CHECK((feasible || !reference));
        }
    }
}

TEST_CASE("user cut bound")
{
    Topology g = build_grid(6, 0.5);
    auto corners = grid_corners(6);
    CHECK(min_user_cut_bound(g, corners) == 2);
    std::vector<NodeId> interior{7, 10, 25, 28};
    CHECK(min_user_cut_bound(g, interior) == 4);
    Topology path = make(4, {{0, 1}, {1, 2}, {2, 3}});
    std::vector<NodeId> ends{0, 1};
    CHECK(min_user_cut_bound(path, ends) == 1);
}

TEST_CASE("components")
{
    Topology t = make(6, {{0, 1}, {1, 2}, {3, 4}});
    CHECK(component_labels(GraphView(t)) == std::vector<int>{0, 0, 0, 1, 1, 2});
    CHECK(largest_component_size(GraphView(t)) == 3);
}

TEST_CASE("routing outputs are deterministic")
{
    Topology g = build_grid(5, 0.5);
    std::vector<NodeId> users{0, 7, 18, 24};
    auto a = steiner_tree(GraphView(g), users);
    auto b = steiner_tree(GraphView(g), users);
    CHECK(a->edges == b->edges);
    auto x = disjoint_paths_to_centre(GraphView(g), 12, users);
    auto y = disjoint_paths_to_centre(GraphView(g), 12, users);
    REQUIRE(x.paths.size() == y.paths.size());
    for (std::size_t i = 0; i < x.paths.size(); ++i)
        CHECK(x.paths[i].edges == y.paths[i].edges);
    CHECK(select_centre_node(g, users) == select_centre_node(g, users));
}
