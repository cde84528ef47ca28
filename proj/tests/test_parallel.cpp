#include "ghznet/analytics.hpp"
#include "ghznet/harness.hpp"

#include <doctest.h>

#include <omp.h>

using namespace ghznet;

// The parallel kernels must reproduce their serial references bit for bit,
// whatever the thread count or scheduling.

namespace {

struct ThreadCount
{
    int saved = omp_get_max_threads();
    explicit ThreadCount(int n) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved); }
};

void check_same(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b)
{
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CAPTURE(i);
        CHECK(a[i].users == b[i].users);
        CHECK(a[i].infeasible == b[i].infeasible);
        CHECK(a[i].upper_bound == b[i].upper_bound);
        CHECK(a[i].outcome.succeeded == b[i].outcome.succeeded);
        CHECK(a[i].outcome.timeslots_used == b[i].outcome.timeslots_used);
        CHECK(a[i].outcome.ghz_count == b[i].outcome.ghz_count);
        CHECK(a[i].outcome.ghz_sizes == b[i].outcome.ghz_sizes);
        CHECK(a[i].outcome.links_consumed == b[i].outcome.links_consumed);
    }
}

} // namespace

TEST_CASE("trial loop matches the serial reference for any thread count")
{
    Scenario s;
    s.grid_m = 5;
    s.p = 0.55;
    s.users = UserSpec::parse("random:4");
    s.trials = 90;
    s.q_c = 3;
    s.seed = 4242;
    for (ProtocolKind k : {ProtocolKind::kSp, ProtocolKind::kSpTree, ProtocolKind::kMpGPlus,
                           ProtocolKind::kMpC, ProtocolKind::kMpP}) {
        CAPTURE(to_string(k));
        s.protocol = k;
        const Topology t = build_topology(s);
        const auto ref = run_trials(s, t, 7, Execution::kSerial);
        for (int threads : {1, 3, 8}) {
            ThreadCount tc(threads);
            check_same(ref, run_trials(s, t, 7, Execution::kParallel));
        }
        const ScenarioResult a = summarize_trials(s, ref, 7);
        const ScenarioResult b = run_scenario(s, Execution::kParallel, 7);
        CHECK(a.stats.er == b.stats.er);
        CHECK(a.stats.ci95_low == b.stats.ci95_low);
        CHECK(a.stats.ci95_high == b.stats.ci95_high);
        CHECK(a.infeasible_trials == b.infeasible_trials);
    }
}

TEST_CASE("component sampling matches the serial reference")
{
    const Topology g = build_grid(6, 0.4);
    for (int q : {1, 4}) {
        const auto ref = estimate_component_distribution_serial(g, q, 2500, 31);
        for (int threads : {1, 5}) {
            ThreadCount tc(threads);
            CHECK(estimate_component_distribution(g, q, 2500, 31).probabilities ==
                  ref.probabilities);
        }
    }
}

TEST_CASE("errors surface from the lowest failing trial")
{
    // Explicit users off the grid fail validation inside every trial.
    Scenario s;
    s.grid_m = 3;
    s.users = UserSpec::parse("0,40");
    s.trials = 50;
    ThreadCount tc(4);
    const Topology t = build_topology(s);
    std::string serial, parallel;
    try {
        run_trials(s, t, 0, Execution::kSerial);
    } catch (const std::exception& e) {
        serial = e.what();
    }
    try {
        run_trials(s, t, 0, Execution::kParallel);
    } catch (const std::exception& e) {
        parallel = e.what();
    }
    CHECK_FALSE(serial.empty());
    CHECK(serial == parallel);
}
