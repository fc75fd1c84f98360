#include "cir/schemes_two_factor.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

namespace cir {

std::pair<int, int> two_factor_split_degrees(const TwoFactorParams& p) {
    if (p.sigma1 == 0.0 || p.sigma2 == 0.0) {
        throw UsageError("splitting undefined for sigma = 0");
    }
    const double d1 = snapped_floor(p.degree1());
    const double d2 = snapped_floor(p.degree2());
    if (d1 < 1.0 || d2 < 1.0) {
        throw UsageError("TwoFactorSplitExact requires d1 >= 1 and d2 >= 1");
    }
    return {int(d1), int(d2)};
}

PairState two_factor_split_step(const TwoFactorParams& p, double delta, const PairState& s,
                                std::span<const double> z1, std::span<const double> z2) {
    const double k2 = snapped_floor(p.degree1()) * p.sigma1 * p.sigma1 / 4.0;
    const double k1 = p.k - k2;
    const double l2 = snapped_floor(p.degree2()) * p.sigma2 * p.sigma2 / 4.0;
    const double l1 = p.l - l2;
    // Frozen parts read only time-t_k state; every addend is nonnegative.
    const double v1 = s.y1 + delta * p.lambda12 * s.y2 + delta * k1;
    const double v2 = s.y2 + delta * p.lambda22 * s.y1 + delta * l1;
    PairState next;
    next.y1 = exact_cir_step(k2, p.lambda11, p.sigma1, v1, delta, z1);
    next.y2 = exact_cir_step(l2, p.lambda21, p.sigma2, v2, delta, z2);
    return next;
}

namespace {

double squared_coord_step(double sigma_half_dw, double radicand, const char* which,
                          StepDiagnostics* diag) {
    if (radicand < 0.0) {
        std::ostringstream os;
        os << which << ": negative radicand " << radicand;
        throw DomainError(os.str());
    }
    const double z = sigma_half_dw + std::sqrt(radicand);
    if (diag) {
        diag->radicand = radicand;
        diag->z_value = z;
        diag->sign_flip = z < 0.0;
    }
    return z * z;
}

}  // namespace

PairState two_factor_squared_step(const TwoFactorParams& p, double delta, const PairState& s,
                                  double dw1, double dw2,
                                  StepDiagnostics* diag1, StepDiagnostics* diag2) {
    const double r1 = s.y1 * (1.0 - p.lambda11 * delta) + delta * p.lambda12 * s.y2 +
                      delta * (p.k - p.sigma1 * p.sigma1 / 4.0);
    const double r2 = s.y2 * (1.0 - p.lambda21 * delta) + delta * p.lambda22 * s.y1 +
                      delta * (p.l - p.sigma2 * p.sigma2 / 4.0);
    PairState next;
    next.y1 = squared_coord_step(0.5 * p.sigma1 * dw1, r1, "two_factor_squared_step y1", diag1);
    next.y2 = squared_coord_step(0.5 * p.sigma2 * dw2, r2, "two_factor_squared_step y2", diag2);
    return next;
}

PairState two_factor_cross_step(const TwoFactorParams& p, double delta, const PairState& s,
                                double dw1, double dw2) {
    const double r1 = s.y1 * (1.0 - p.lambda11 * delta) + delta * p.lambda12 * s.y2 +
                      delta * (p.k - p.sigma1 * p.sigma1 * s.y2 / 4.0);
    const double r2 = s.y2 * (1.0 - p.lambda21 * delta) + delta * p.lambda22 * s.y1 +
                      delta * (p.l - p.sigma2 * p.sigma2 * s.y1 / 4.0);
    PairState next;
    next.y1 = squared_coord_step(0.5 * p.sigma1 * std::sqrt(s.y2) * dw1, r1,
                                 "two_factor_cross_step y1", nullptr);
    next.y2 = squared_coord_step(0.5 * p.sigma2 * std::sqrt(s.y1) * dw2, r2,
                                 "two_factor_cross_step y2", nullptr);
    return next;
}

namespace {

PairPathResult run_pair(const TwoFactorParams& p, const GridSpec& g, const SchemeSpec& spec,
                        const SeedSpec& seed, const BrownianPath* path) {
    PairPathResult out;
    const bool brownian = is_brownian_driven(spec.kind);
    BrownianPath local;
    if (brownian && !path) {
        local = make_brownian_path(seed, g, 2);
        path = &local;
    }
    const double delta = brownian ? path->delta() : g.delta();
    const std::size_t n = brownian ? path->steps() : std::size_t(g.n_steps);

    out.times.resize(n + 1);
    out.values1.resize(n + 1);
    out.values2.resize(n + 1);
    PairState s{p.x10, p.x20};
    out.values1[0] = s.y1;
    out.values2[0] = s.y2;
    out.diag1.min_value = s.y1;
    out.diag2.min_value = s.y2;

    int d1 = 0, d2 = 0;
    std::vector<double> z1, z2;
    SeedSpec s1 = seed, s2 = seed;
    s1.noise_index = 0;
    s2.noise_index = 1;
    GaussianStream g1(s1), g2(s2);
    if (spec.kind == SchemeKind::TwoFactorSplitExact) {
        std::tie(d1, d2) = two_factor_split_degrees(p);
        z1.resize(std::size_t(d1));
        z2.resize(std::size_t(d2));
    }

    for (std::size_t i = 0; i < n; ++i) {
        try {
            switch (spec.kind) {
                case SchemeKind::TwoFactorSplitExact:
                    for (auto& z : z1) z = g1.next();
                    for (auto& z : z2) z = g2.next();
                    s = two_factor_split_step(p, delta, s, z1, z2);
                    ++out.diag1.n_steps;
                    ++out.diag2.n_steps;
                    break;
                case SchemeKind::TwoFactorSquared: {
                    StepDiagnostics sd1, sd2;
                    s = two_factor_squared_step(p, delta, s, path->increments[0][i],
                                                path->increments[1][i], &sd1, &sd2);
                    ++out.diag1.n_steps;
                    ++out.diag2.n_steps;
                    if (sd1.sign_flip) {
                        ++out.diag1.n_sign_flips;
                        out.diag1.weighted_flip_sum += 4.0 * s.y1;
                    }
                    if (sd2.sign_flip) {
                        ++out.diag2.n_sign_flips;
                        out.diag2.weighted_flip_sum += 4.0 * s.y2;
                    }
                    break;
                }
                case SchemeKind::TwoFactorCrossDiffusion:
                    s = two_factor_cross_step(p, delta, s, path->increments[0][i],
                                              path->increments[1][i]);
                    ++out.diag1.n_steps;
                    ++out.diag2.n_steps;
                    break;
                default:
                    throw UsageError("simulate_pair_path: one-factor scheme kind");
            }
        } catch (const DomainError& e) {
            if (spec.kind != SchemeKind::TwoFactorCrossDiffusion) throw;
            out.aborted = true;
            out.abort_reason = e.what();
            out.times.resize(i + 1);
            out.values1.resize(i + 1);
            out.values2.resize(i + 1);
            return out;
        }
        out.diag1.min_value = std::min(out.diag1.min_value, s.y1);
        out.diag2.min_value = std::min(out.diag2.min_value, s.y2);
        out.times[i + 1] = double(i + 1) * delta;
        out.values1[i + 1] = s.y1;
        out.values2[i + 1] = s.y2;
    }
    return out;
}

}  // namespace

PairPathResult simulate_pair_path(const TwoFactorParams& p, const GridSpec& g,
                                  const SchemeSpec& spec, const SeedSpec& seed) {
    if (!is_two_factor(spec.kind)) {
        throw UsageError("simulate_pair_path: not a two-factor scheme");
    }
    return run_pair(p, g, spec, seed, nullptr);
}

PairPathResult simulate_pair_path(const TwoFactorParams& p, const SchemeSpec& spec,
                                  const BrownianPath& path) {
    if (!is_two_factor(spec.kind) || !is_brownian_driven(spec.kind)) {
        throw UsageError("simulate_pair_path(BrownianPath): needs a Brownian-driven two-factor scheme");
    }
    if (path.increments.size() < 2) throw UsageError("two-factor path needs two noises");
    GridSpec g(path.base_delta * path.base_steps, int(path.steps()));
    return run_pair(p, g, spec, path.seed, &path);
}

}  // namespace cir
