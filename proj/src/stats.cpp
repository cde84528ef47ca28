#include "ghznet/stats.hpp"

#include "ghznet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ghznet {

double ratio_standard_error(std::span<const RateSample> samples)
{
    const auto n = static_cast<double>(samples.size());
    if (samples.size() < 2)
        return 0.0;
    double g = 0.0, s = 0.0;
    for (const RateSample& r : samples) {
        g += r.ghz;
        s += r.slots;
    }
    if (s <= 0.0)
        return 0.0;
    const double ratio = g / s;
    const double mean_slots = s / n;
    double var = 0.0;
    for (const RateSample& r : samples) {
        double d = r.ghz - ratio * r.slots;
        var += d * d;
    }
    var /= (n - 1.0);
    return std::sqrt(var / n) / mean_slots;
}

ErStats summarize(std::span<const RateSample> input, std::uint64_t bootstrap_seed, int resamples)
{
    ErStats st;
    st.trials = input.size();
    if (input.empty())
        return st;

    // Canonical order makes the bootstrap independent of trial completion order.
    std::vector<RateSample> samples(input.begin(), input.end());
    std::sort(samples.begin(), samples.end(), [](const RateSample& a, const RateSample& b) {
        if (a.succeeded != b.succeeded)
            return a.succeeded < b.succeeded;
        if (a.ghz != b.ghz)
            return a.ghz < b.ghz;
        return a.slots < b.slots;
    });

    for (const RateSample& r : samples) {
        st.total_ghz += r.ghz;
        st.total_slots += r.slots;
        if (r.succeeded)
            ++st.succeeded;
    }
    st.failed = st.trials - st.succeeded;
    st.er = st.total_slots > 0.0 ? st.total_ghz / st.total_slots : 0.0;
    st.fail_fraction = static_cast<double>(st.failed) / static_cast<double>(st.trials);
    st.valid = st.fail_fraction <= kMaxFailFraction;
    st.mean_ghz_per_success =
        st.succeeded ? st.total_ghz / static_cast<double>(st.succeeded) : 0.0;
    st.std_error = ratio_standard_error(samples);

    Rng rng(bootstrap_seed);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<double> boot(static_cast<std::size_t>(std::max(resamples, 1)));
    for (double& b : boot) {
        double g = 0.0, s = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const RateSample& r = samples[pick(rng)];
            g += r.ghz;
            s += r.slots;
        }
        b = s > 0.0 ? g / s : 0.0;
    }
    std::sort(boot.begin(), boot.end());
    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(boot.size() - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        auto hi = std::min(lo + 1, boot.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return boot[lo] * (1.0 - frac) + boot[hi] * frac;
    };
    st.ci95_low = std::min(quantile(0.025), st.er);
    st.ci95_high = std::max(quantile(0.975), st.er);
    return st;
}

} // namespace ghznet
