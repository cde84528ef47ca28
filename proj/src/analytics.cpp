#include "ghznet/analytics.hpp"

#include "ghznet/errors.hpp"
#include "ghznet/netstate.hpp"
#include "ghznet/routing.hpp"

#include <cmath>
#include <stdexcept>

namespace ghznet {

double sp_analytic_er(const Topology& t, std::span<const EdgeId> route)
{
    if (route.empty())
        throw std::domain_error("analytic SP rate needs a non-empty route");
    double er = 1.0;
    for (EdgeId e : route)
        er *= t.edge(e).p_e;
    return er;
}

double expected_link_presence(double p, int q_c)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("probability must lie in [0, 1]");
    if (q_c < 1)
        throw std::domain_error("Q_c must be at least 1");
    if (q_c == kUnboundedCutoff)
        return p > 0.0 ? 1.0 : 0.0;
    const double q = static_cast<double>(q_c);
    return p * q / (1.0 + p * (q - 1.0));
}

double users_in_component_probability(int v, int s, int c)
{
    if (s < 1 || s > v || c < 0 || c > v)
        throw std::domain_error("need 1 <= s <= v and 0 <= c <= v");
    if (c < s)
        return 0.0;
    // C(v-s, c-s) / C(v, c) = prod_{i=0}^{s-1} (c - i) / (v - i)
    double r = 1.0;
    for (int i = 0; i < s; ++i)
        r *= static_cast<double>(c - i) / static_cast<double>(v - i);
    return r;
}

int warmup_slots(int q_c)
{
    if (q_c == kUnboundedCutoff)
        throw std::domain_error("steady state is undefined for unbounded Q_c");
    return 10 * q_c;
}

namespace {

std::size_t sample_largest_component(const Topology& t, int q_c, int warmup, std::uint64_t seed,
                                     std::size_t sample)
{
    NetworkState state(t, q_c, make_stream(seed, sample));
    for (int i = 0; i < warmup; ++i)
        state.advance_timeslot();
    return largest_component_size(GraphView(t, state.present_mask()));
}

ComponentDistribution tally(const std::vector<std::size_t>& sizes, std::size_t node_count)
{
    ComponentDistribution d;
    d.sample_count = sizes.size();
    d.probabilities.assign(node_count + 1, 0.0);
    std::vector<std::size_t> counts(node_count + 1, 0);
    for (std::size_t s : sizes)
        ++counts[s];
    for (std::size_t c = 0; c <= node_count; ++c)
        d.probabilities[c] = static_cast<double>(counts[c]) / static_cast<double>(sizes.size());
    return d;
}

} // namespace

ComponentDistribution estimate_component_distribution(const Topology& t, int q_c,
                                                      std::size_t samples, std::uint64_t seed)
{
    if (samples < 1)
        throw std::domain_error("need at least one sample");
    const int warmup = warmup_slots(q_c);
    std::vector<std::size_t> sizes(samples);
    const auto n = static_cast<std::ptrdiff_t>(samples);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        sizes[static_cast<std::size_t>(i)] =
            sample_largest_component(t, q_c, warmup, seed, static_cast<std::size_t>(i));
    return tally(sizes, t.node_count());
}

ComponentDistribution estimate_component_distribution_serial(const Topology& t, int q_c,
                                                             std::size_t samples,
                                                             std::uint64_t seed)
{
    if (samples < 1)
        throw std::domain_error("need at least one sample");
    const int warmup = warmup_slots(q_c);
    std::vector<std::size_t> sizes(samples);
    for (std::size_t i = 0; i < samples; ++i)
        sizes[i] = sample_largest_component(t, q_c, warmup, seed, i);
    return tally(sizes, t.node_count());
}

double analytic_er_estimate(const Topology& t, int s, const ComponentDistribution& dist)
{
    if (s < 2)
        throw std::domain_error("need at least two users");
    const int v = static_cast<int>(t.node_count());
    double er = 0.0;
    for (int c = 1; c <= v; ++c)
        er += users_in_component_probability(v, s, c) * dist.at(static_cast<std::size_t>(c));
    return er;
}

double er_upper_bound(const Topology& t, std::span<const NodeId> users, double p, int q_c)
{
    return static_cast<double>(min_user_cut_bound(t, users)) * expected_link_presence(p, q_c);
}

} // namespace ghznet
