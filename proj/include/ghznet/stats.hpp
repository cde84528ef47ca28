#pragma once

#include <cstdint>
#include <span>

namespace ghznet {

/// One trial's contribution to a rate estimate.
struct RateSample
{
    double ghz = 0.0;
    double slots = 0.0;
    bool succeeded = false;
};

/// Aggregated entanglement-rate estimate. er = total GHZ / total slots, with
/// failed trials contributing zero GHZ over the full slot budget.
struct ErStats
{
    double er = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double std_error = 0.0;  // delta-method standard error of the ratio
    double fail_fraction = 0.0;
    bool valid = false;      // fail_fraction <= kMaxFailFraction
    std::size_t trials = 0;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    double mean_ghz_per_success = 0.0;
    double total_ghz = 0.0;
    double total_slots = 0.0;
};

inline constexpr double kMaxFailFraction = 0.05;
inline constexpr int kBootstrapResamples = 1000;

/// Summarises trials with a seeded percentile bootstrap CI. The result does not
/// depend on the order of `samples`.
ErStats summarize(std::span<const RateSample> samples, std::uint64_t bootstrap_seed,
                  int resamples = kBootstrapResamples);

/// Delta-method standard error of sum(ghz) / sum(slots).
double ratio_standard_error(std::span<const RateSample> samples);

} // namespace ghznet
