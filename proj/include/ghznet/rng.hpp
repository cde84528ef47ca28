#pragma once

#include <cstdint>
#include <random>

namespace ghznet {

using Rng = std::mt19937_64;

/// Derives an independent 64-bit seed from a root seed and two stream coordinates
/// (typically sweep index and trial index). Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

inline Rng make_stream(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0)
{
    return Rng(derive_seed(root, a, b));
}

/// One Bernoulli(p) draw. p <= 0 never fires, p >= 1 always fires.
inline bool bernoulli(Rng& rng, double p)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

} // namespace ghznet
