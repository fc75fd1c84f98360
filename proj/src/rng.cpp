#include "cir/rng.hpp"

#include <cmath>

namespace cir {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer; two applications give a statistically strong
// counter-based bit generator.
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t stream_key(const SeedSpec& seed, std::uint32_t level) {
    std::uint64_t k = mix(seed.master_seed + kGolden);
    k = mix(k ^ (std::uint64_t(seed.path_index) + kGolden));
    k = mix(k ^ (std::uint64_t(seed.noise_index) << 32 | level));
    return k;
}

// Uniform in (0,1), never 0 or 1.
double uniform_bits(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t h = mix(key ^ (counter * kGolden + kGolden));
    return (double(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

GaussianStream::GaussianStream(const SeedSpec& seed, std::uint32_t level)
    : key_(stream_key(seed, level)) {}

double GaussianStream::normal(std::uint64_t i) const {
    // Box-Muller on two dedicated uniforms per draw; keeps draws a pure
    // function of (key, i).
    const double u1 = uniform_bits(key_, 2 * i);
    const double u2 = uniform_bits(key_, 2 * i + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

std::vector<double> gaussian_stream(const SeedSpec& seed, std::size_t count) {
    GaussianStream s(seed);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = s.normal(i);
    return out;
}

namespace {

BrownianPath make_base(const SeedSpec& seed, double base_delta, int base_steps,
                       std::size_t n_noises) {
    BrownianPath path;
    path.seed = seed;
    path.level = 0;
    path.base_steps = base_steps;
    path.base_delta = base_delta;
    const double scale = std::sqrt(path.base_delta);
    path.increments.resize(n_noises);
    for (std::size_t j = 0; j < n_noises; ++j) {
        SeedSpec s = seed;
        s.noise_index = std::uint32_t(j);
        GaussianStream stream(s, /*level=*/0);
        auto& inc = path.increments[j];
        inc.resize(std::size_t(base_steps));
        for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = scale * stream.normal(i);
    }
    return path;
}

}  // namespace

BrownianPath make_brownian_path(const SeedSpec& seed, const GridSpec& g, int n_noises) {
    if (n_noises < 1) throw UsageError("need at least one noise");
    return make_base(seed, g.delta(), g.n_steps, std::size_t(n_noises));
}

BrownianPath refine(const BrownianPath& path) {
    BrownianPath fine;
    fine.seed = path.seed;
    fine.level = path.level + 1;
    fine.base_steps = path.base_steps;
    fine.base_delta = path.base_delta;
    const double h = path.delta();
    const double bridge_sd = 0.5 * std::sqrt(h);  // sqrt(h/4)
    fine.increments.resize(path.increments.size());
    for (std::size_t j = 0; j < path.increments.size(); ++j) {
        SeedSpec s = path.seed;
        s.noise_index = std::uint32_t(j);
        GaussianStream stream(s, fine.level);
        const auto& coarse = path.increments[j];
        auto& inc = fine.increments[j];
        inc.resize(2 * coarse.size());
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            const double dw = coarse[i];
            const double b = bridge_sd * stream.normal(i);
            const double left = 0.5 * dw + b;
            inc[2 * i] = left;
            inc[2 * i + 1] = dw - left;
        }
    }
    return fine;
}

BrownianPath refine_to_level(BrownianPath path, std::uint32_t level) {
    while (path.level < level) path = refine(path);
    return path;
}

BrownianPath coarsen(const BrownianPath& path) {
    if (path.level == 0) throw UsageError("coarsen: already at the base level");
    BrownianPath parent = make_base(path.seed, path.base_delta, path.base_steps,
                                    path.increments.size());
    return refine_to_level(std::move(parent), path.level - 1);
}

std::vector<double> aggregate_pairs(const std::vector<double>& fine) {
    std::vector<double> coarse(fine.size() / 2);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        coarse[i] = fine[2 * i] + fine[2 * i + 1];
    }
    return coarse;
}

}  // namespace cir
