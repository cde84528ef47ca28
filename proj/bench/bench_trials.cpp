// Serial reference vs OpenMP kernels on the two data-parallel workloads:
// protocol trials and component-size sampling.
#include "ghznet/analytics.hpp"
#include "ghznet/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

using namespace ghznet;

namespace {

double seconds(const std::function<void()>& fn)
{
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial, double parallel, bool same)
{
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   results %s\n", name,
                serial, parallel, serial / parallel, same ? "identical" : "DIFFER");
}

} // namespace

int main()
{
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());

    Scenario s;
    s.grid_m = 6;
    s.p = 0.75;
    s.users = UserSpec::parse("random:4");
    s.trials = 2000;
    s.seed = 7;
    const Topology t = build_topology(s);

    for (ProtocolKind kind : {ProtocolKind::kMpGPlus, ProtocolKind::kMpC, ProtocolKind::kMpP}) {
        s.protocol = kind;
        std::vector<TrialRecord> a, b;
        double ts = seconds([&] { a = run_trials(s, t, 0, Execution::kSerial); });
        double tp = seconds([&] { b = run_trials(s, t, 0, Execution::kParallel); });
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].outcome.ghz_count == b[i].outcome.ghz_count &&
                   a[i].outcome.timeslots_used == b[i].outcome.timeslots_used;
        std::string label = "trials " + std::string(to_string(kind));
        report(label.c_str(), ts, tp, same);
    }

    ComponentDistribution ds, dp;
    double ts = seconds([&] { ds = estimate_component_distribution_serial(t, 2, 20000, 3); });
    double tp = seconds([&] { dp = estimate_component_distribution(t, 2, 20000, 3); });
    report("component distribution", ts, tp, ds.probabilities == dp.probabilities);
    return 0;
}
