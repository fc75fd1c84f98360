#pragma once

#include <cstdint>
#include <vector>

#include "cir/params.hpp"

namespace cir {

// Identifies one Gaussian substream. Identical (master_seed, path_index,
// noise_index) always yields the identical sequence, independent of thread
// count or evaluation order.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint32_t path_index = 0;
    std::uint32_t noise_index = 0;
};

// Counter-based stream of standard normal draws. Random access: draw i is a
// pure function of (key, i), so distinct streams can be consumed
// concurrently and a stream can be regenerated from any offset.
class GaussianStream {
public:
    GaussianStream(const SeedSpec& seed, std::uint32_t level = 0);

    // i-th N(0,1) draw of this stream.
    double normal(std::uint64_t i) const;

    // Next sequential draw.
    double next() { return normal(cursor_++); }

    std::uint64_t cursor() const { return cursor_; }

private:
    std::uint64_t key_;
    std::uint64_t cursor_ = 0;
};

std::vector<double> gaussian_stream(const SeedSpec& seed, std::size_t count);

// Brownian increments on a dyadically refinable grid. Level m holds
// base_steps * 2^m increments per noise, each N(0, delta/2^m). Summing
// consecutive pairs (left + right, in that order) reproduces the coarser
// level's increments to within one ulp of the step scale; coarsen()
// recovers the parent level exactly.
struct BrownianPath {
    SeedSpec seed;               // noise_index ignored; one array per noise
    std::uint32_t level = 0;
    int base_steps = 0;
    double base_delta = 0.0;
    std::vector<std::vector<double>> increments;  // [noise][base_steps * 2^level]

    double delta() const { return base_delta / double(std::uint64_t(1) << level); }
    std::size_t steps() const { return std::size_t(base_steps) << level; }
};

// Level-0 path: increments drawn from the substream keyed by
// (master_seed, path_index, noise_index, level 0).
BrownianPath make_brownian_path(const SeedSpec& seed, const GridSpec& g, int n_noises);

// One dyadic refinement. Midpoint draws come from the substream keyed by
// (stream id, level m+1); conditional on the parent increment the split is
// the Brownian bridge: left = dW/2 + b, right = dW - left.
BrownianPath refine(const BrownianPath& path);

BrownianPath refine_to_level(BrownianPath path, std::uint32_t level);

// Exact inverse of refine: rebuilds the parent level deterministically from
// the seed, so coarsen(refine(p)) == p bit-for-bit. (A floating-point pair
// sum can be off by one ulp when a child exceeds the parent in magnitude,
// so the parent is reconstructed rather than summed.)
BrownianPath coarsen(const BrownianPath& path);

// Numeric pair-sum aggregation; matches the parent increments to within one
// ulp of the larger child.
std::vector<double> aggregate_pairs(const std::vector<double>& fine);

}  // namespace cir
