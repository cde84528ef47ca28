#pragma once

#include "ghznet/topology.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ghznet {

/// Rate of a single pre-computed route when every link must be present in the
/// same slot (Q_c = 1): the product of p_e over the route. Throws on an empty route.
double sp_analytic_er(const Topology& t, std::span<const EdgeId> route);

/// Steady-state probability that an edge holds a link, for generation probability p
/// and cut-off q_c (renewal argument: q_c slots on, geometric off-period).
double expected_link_presence(double p, int q_c);

/// Probability that |S| = s uniformly placed users all fall inside a fixed connected
/// component of c nodes out of v: C(v-s, c-s) / C(v, c), zero when c < s.
double users_in_component_probability(int v, int s, int c);

/// Empirical distribution of the largest connected component size of G'.
struct ComponentDistribution
{
    std::vector<double> probabilities;  // index = component size, 0..|V|
    std::size_t sample_count = 0;

    double at(std::size_t c) const { return c < probabilities.size() ? probabilities[c] : 0.0; }
};

/// Number of slots discarded before a sample is taken, letting links reach steady state.
int warmup_slots(int q_c);

/// Samples snapshots of G' (no protocol running) and tallies the largest component.
/// Each sample owns the stream derive_seed(seed, sample). Runs samples in parallel.
ComponentDistribution estimate_component_distribution(const Topology& t, int q_c,
                                                      std::size_t samples, std::uint64_t seed);
/// Single-threaded reference of the same computation.
ComponentDistribution estimate_component_distribution_serial(const Topology& t, int q_c,
                                                             std::size_t samples,
                                                             std::uint64_t seed);

/// Likelihood-weighted ER estimate for MP-C with random users:
/// sum over c of users_in_component_probability(|V|, s, c) * P(C = c).
double analytic_er_estimate(const Topology& t, int s, const ComponentDistribution& dist);

/// min_user_cut_bound(t, users) * expected_link_presence(p, q_c).
double er_upper_bound(const Topology& t, std::span<const NodeId> users, double p, int q_c);

} // namespace ghznet
