#include "ghznet/errors.hpp"
#include "ghznet/netstate.hpp"

#include <doctest.h>

#include <cmath>

using namespace ghznet;

namespace {

Topology single_edge(double p)
{
    return Topology("edge", 2, {{0, 1, 0.0, p, p}}, 0.0);
}

// 0-1-2-3 path plus a pendant edge 1-4.
Topology small_fixture(double p)
{
    std::vector<Edge> edges{{0, 1, 0, p, p}, {1, 2, 0, p, p}, {2, 3, 0, p, p}, {1, 4, 0, p, p}};
    return Topology("fixture", 5, edges, 0.0);
}

double presence_fraction(double p, int q_c, int slots, std::uint64_t seed)
{
    Topology t = single_edge(p);
    NetworkState s(t, q_c, make_stream(seed, 0));
    long present = 0;
    for (int i = 0; i < slots; ++i) {
        s.advance_timeslot();
        present += s.is_present(0);
    }
    return static_cast<double>(present) / slots;
}

} // namespace

TEST_CASE("link generation")
{
    SUBCASE("certain links all appear at age zero")
    {
        Topology g = build_grid(3, 1.0);
        NetworkState s(g, 1, make_stream(1, 0));
        s.advance_timeslot();
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            CHECK(s.status(static_cast<EdgeId>(e)).phase == LinkPhase::kPresent);
            CHECK(s.status(static_cast<EdgeId>(e)).age == 0);
        }
        CHECK(s.link_subgraph().edge_count() == g.edge_count());
    }
    SUBCASE("impossible links never appear")
    {
        Topology g = build_grid(3, 0.0);
        NetworkState s(g, 3, make_stream(1, 0));
        for (int i = 0; i < 100; ++i) {
            s.advance_timeslot();
            CHECK(s.link_subgraph().edge_count() == 0);
        }
    }
    SUBCASE("single edge at p = 0.5, Q_c = 1")
    {
        CHECK(presence_fraction(0.5, 1, 100000, 11) == doctest::Approx(0.5).epsilon(0.02));
    }
    CHECK_THROWS_AS(NetworkState(single_edge(0.5), 0, Rng(1)), ValidationError);
}

TEST_CASE("steady-state presence follows the renewal formula")
{
    for (double p : {0.1, 0.2, 0.5, 0.9}) {
        for (int q : {1, 2, 5, 10}) {
            const double want = p * q / (1.0 + p * (q - 1));
            const double got = presence_fraction(p, q, 1000000, 1000 + q);
            CAPTURE(p);
            CAPTURE(q);
            CHECK(std::abs(got - want) <= 0.01);
        }
    }
}

TEST_CASE("ageing and cut-off")
{
    Topology t = single_edge(1.0);
    NetworkState s(t, 3, Rng(5));
    s.advance_timeslot();
    CHECK(s.status(0).age == 0);
    s.advance_timeslot();
    CHECK(s.status(0).age == 1);
    s.advance_timeslot();
    CHECK(s.status(0).age == 2);
    // Age 3 reaches the cut-off: discarded, then immediately regenerated.
    s.advance_timeslot();
    CHECK(s.status(0).age == 0);
    CHECK(s.timeslot() == 4);

    // Fuzz: no present link is ever observed at an age >= Q_c.
    Topology g = build_grid(4, 0.4);
    for (int q : {1, 2, 4}) {
        NetworkState f(g, q, make_stream(77, static_cast<std::uint64_t>(q)));
        for (int i = 0; i < 500; ++i) {
            f.advance_timeslot();
            for (const LinkStatus& st : f.statuses())
                if (st.phase == LinkPhase::kPresent)
                    CHECK(st.age < q);
        }
    }
}

TEST_CASE("unbounded cut-off keeps links forever")
{
    Topology t = single_edge(1.0);
    NetworkState s(t, kUnboundedCutoff, Rng(5));
    for (int i = 0; i < 50; ++i)
        s.advance_timeslot();
    CHECK(s.is_present(0));
}

TEST_CASE("link subgraph reports exactly the present edges")
{
    Topology t = small_fixture(0.0);
    NetworkState s(t, 2, Rng(3));
    CHECK(s.link_subgraph().edge_count() == 0);
    s.set_status_for_test(0, {LinkPhase::kPresent, 0});
    s.set_status_for_test(1, {LinkPhase::kHeld, 0});
    s.set_status_for_test(2, {LinkPhase::kAbsent, 0});
    CHECK(s.link_subgraph().edges() == std::vector<EdgeId>{0});
}

TEST_CASE("path consumption")
{
    Topology t = small_fixture(1.0);
    SUBCASE("one-edge path holds the edge and registers one pair")
    {
        NetworkState s(t, 1, Rng(1));
        s.advance_timeslot();
        const std::vector<EdgeId> path{0};
        s.consume_path(path, 0, 1);
        CHECK(s.status(0).phase == LinkPhase::kHeld);
        REQUIRE(s.bell_pairs().size() == 1);
        CHECK(s.bell_pairs()[0].user == 0);
        CHECK(s.bell_pairs()[0].centre == 1);
        CHECK(s.has_bell_pair(0));
    }
    SUBCASE("three-edge path: inner consumed, ends held")
    {
        NetworkState s(t, 1, Rng(1));
        s.advance_timeslot();
        const std::vector<EdgeId> path{0, 1, 2};
        s.consume_path(path, 0, 3);
        CHECK(s.status(0).phase == LinkPhase::kHeld);
        CHECK(s.status(1).phase == LinkPhase::kConsumed);
        CHECK(s.status(2).phase == LinkPhase::kHeld);
        CHECK(s.status(3).phase == LinkPhase::kPresent);
        CHECK(s.link_subgraph().edges() == std::vector<EdgeId>{3});
    }
    SUBCASE("consuming the same path twice fails")
    {
        NetworkState s(t, 1, Rng(1));
        s.advance_timeslot();
        const std::vector<EdgeId> path{0, 1};
        s.consume_path(path, 0, 2);
        CHECK_THROWS_AS(s.consume_path(path, 0, 2), ProtocolLogicError);
    }
    SUBCASE("malformed paths are logic errors")
    {
        NetworkState s(t, 1, Rng(1));
        s.advance_timeslot();
        const std::vector<EdgeId> gap{0, 2};
        CHECK_THROWS_AS(s.consume_path(gap, 0, 3), ProtocolLogicError);
        const std::vector<EdgeId> wrong_end{0, 1};
        CHECK_THROWS_AS(s.consume_path(wrong_end, 0, 3), ProtocolLogicError);
        CHECK_THROWS_AS(s.consume_path({}, 0, 3), ProtocolLogicError);
        s.set_status_for_test(1, {LinkPhase::kAbsent, 0});
        const std::vector<EdgeId> absent{0, 1};
        CHECK_THROWS_AS(s.consume_path(absent, 0, 2), ProtocolLogicError);
    }
    SUBCASE("a user that is the centre needs no links")
    {
        NetworkState s(t, 1, Rng(1));
        s.consume_path({}, 2, 2);
        CHECK(s.has_bell_pair(2));
        CHECK(s.bell_pairs()[0].edge_at_user == std::nullopt);
    }
}

TEST_CASE("held memories block generation until release")
{
    Topology t = small_fixture(1.0);
    NetworkState s(t, kUnboundedCutoff, Rng(1), BellPairLifetime::kUnlimited);
    s.advance_timeslot();
    const std::vector<EdgeId> path{0, 1, 2};
    s.consume_path(path, 0, 3);
    for (int i = 0; i < 20; ++i) {
        s.advance_timeslot();
        CHECK(s.status(0).phase == LinkPhase::kHeld);
        CHECK(s.status(2).phase == LinkPhase::kHeld);
        CHECK(s.is_present(1));  // consumed inner link regenerated
    }
    s.release_bell_pairs();
    CHECK(s.bell_pairs().empty());
    CHECK(s.status(0).phase == LinkPhase::kAbsent);
    CHECK(s.status(2).phase == LinkPhase::kAbsent);
    s.advance_timeslot();
    CHECK(s.is_present(0));
    CHECK(s.is_present(2));
}

TEST_CASE("delivered pairs decohere with the cut-off by default")
{
    Topology t = small_fixture(1.0);
    NetworkState s(t, 2, Rng(1));
    s.advance_timeslot();
    s.advance_timeslot();  // links now age 1
    const std::vector<EdgeId> path{0};
    s.consume_path(path, 0, 1);
    CHECK(s.bell_pairs()[0].age == 1);
    s.advance_timeslot();  // pair reaches age 2 = Q_c and is dropped
    CHECK_FALSE(s.has_bell_pair(0));
    CHECK(s.is_present(0));  // the freed edge regenerated in the same slot

    NetworkState keep(t, 2, Rng(1), BellPairLifetime::kUnlimited);
    keep.advance_timeslot();
    keep.consume_path(path, 0, 1);
    for (int i = 0; i < 10; ++i)
        keep.advance_timeslot();
    CHECK(keep.has_bell_pair(0));
}

TEST_CASE("tree consumption")
{
    Topology t = small_fixture(1.0);
    NetworkState s(t, 1, Rng(1));
    s.advance_timeslot();

    SUBCASE("single edge")
    {
        const std::vector<EdgeId> tree{0};
        s.consume_tree(tree);
        CHECK(s.status(0).phase == LinkPhase::kConsumed);
        CHECK(s.bell_pairs().empty());
        s.advance_timeslot();
        CHECK(s.is_present(0));
    }
    SUBCASE("star around node 1")
    {
        const std::vector<EdgeId> tree{0, 1, 3};
        s.consume_tree(tree);
        CHECK(s.link_subgraph().edges() == std::vector<EdgeId>{2});
    }
    SUBCASE("disconnected or absent edge sets are rejected")
    {
        const std::vector<EdgeId> split{0, 2};
        CHECK_THROWS_AS(s.consume_tree(split), ProtocolLogicError);
        s.set_status_for_test(1, {LinkPhase::kAbsent, 0});
        const std::vector<EdgeId> absent{0, 1};
        CHECK_THROWS_AS(s.consume_tree(absent), ProtocolLogicError);
    }
    SUBCASE("cycles are rejected")
    {
        Topology tri("tri", 3, {{0, 1, 0, 1, 1}, {1, 2, 0, 1, 1}, {0, 2, 0, 1, 1}}, 0.0);
        NetworkState c(tri, 1, Rng(1));
        c.advance_timeslot();
        const std::vector<EdgeId> cycle{0, 1, 2};
        CHECK_THROWS_AS(c.consume_tree(cycle), ProtocolLogicError);
    }
}

TEST_CASE("trajectories replay from the seed")
{
    Topology g = build_grid(5, 0.35);
    NetworkState a(g, 3, make_stream(9, 1));
    NetworkState b(g, 3, make_stream(9, 1));
    NetworkState c(g, 3, make_stream(9, 2));
    bool differs = false;
    for (int i = 0; i < 200; ++i) {
        a.advance_timeslot();
        b.advance_timeslot();
        c.advance_timeslot();
        CHECK(a.debug_dump() == b.debug_dump());
        differs = differs || a.debug_dump() != c.debug_dump();
    }
    CHECK(differs);
}

TEST_CASE("debug dump format")
{
    Topology t = small_fixture(1.0);
    NetworkState s(t, 2, Rng(1));
    s.advance_timeslot();
    const std::vector<EdgeId> path{0, 1};
    s.consume_path(path, 0, 2);
    CHECK(s.debug_dump() == "timeslot 1\n"
                            "0 0-1 held\n"
                            "1 1-2 held\n"
                            "2 2-3 present(0)\n"
                            "3 1-4 present(0)\n"
                            "pair 0<->2 age 0\n");
}
