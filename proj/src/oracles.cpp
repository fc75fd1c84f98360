#include "cir/oracles.hpp"

#include <cmath>

namespace cir {
namespace oracles {

MomentPair cir_moments(const CirParams& p, double t) {
    if (t < 0.0) throw UsageError("cir_moments: t must be >= 0");
    MomentPair out;
    const double s2 = p.sigma * p.sigma;
    if (p.k == 0.0) {
        // dx = kl dt + ... with k = 0 the drift vanishes entirely.
        out.mean = p.x0;
        out.variance = p.x0 * s2 * t;
        return out;
    }
    const double e1 = std::exp(-p.k * t);
    const double e2 = std::exp(-2.0 * p.k * t);
    out.mean = p.x0 * e1 + p.l * (1.0 - e1);
    out.variance = p.x0 * (s2 / p.k) * (e1 - e2) +
                   p.l * (s2 / (2.0 * p.k)) * (1.0 - e1) * (1.0 - e1);
    return out;
}

std::vector<double> sd_mean_recursion(const CirParams& p, const GridSpec& g, double a) {
    const double delta = g.delta();
    const double denom = 1.0 + p.k * a * delta;
    const double noise_term = p.sigma * p.sigma * delta / (4.0 * denom * denom);
    const double decay = 1.0 - p.k * delta / denom;
    const double drift = (delta / denom) * (p.k * p.l - p.sigma * p.sigma / (4.0 * denom));
    std::vector<double> means(std::size_t(g.n_steps) + 1);
    means[0] = p.x0;
    for (int j = 0; j < g.n_steps; ++j) {
        means[std::size_t(j) + 1] = noise_term + means[std::size_t(j)] * decay + drift;
    }
    return means;
}

namespace {

struct Mean2 {
    double m1, m2;
};

Mean2 rhs(const TwoFactorParams& p, const Mean2& m) {
    return {p.k - p.lambda11 * m.m1 + p.lambda12 * m.m2,
            p.l - p.lambda21 * m.m2 + p.lambda22 * m.m1};
}

Mean2 rk4_terminal(const TwoFactorParams& p, double t_max, int substeps) {
    Mean2 m{p.x10, p.x20};
    const double h = t_max / substeps;
    for (int i = 0; i < substeps; ++i) {
        const Mean2 k1 = rhs(p, m);
        const Mean2 k2 = rhs(p, {m.m1 + 0.5 * h * k1.m1, m.m2 + 0.5 * h * k1.m2});
        const Mean2 k3 = rhs(p, {m.m1 + 0.5 * h * k2.m1, m.m2 + 0.5 * h * k2.m2});
        const Mean2 k4 = rhs(p, {m.m1 + h * k3.m1, m.m2 + h * k3.m2});
        m.m1 += h / 6.0 * (k1.m1 + 2.0 * k2.m1 + 2.0 * k3.m1 + k4.m1);
        m.m2 += h / 6.0 * (k1.m2 + 2.0 * k2.m2 + 2.0 * k3.m2 + k4.m2);
    }
    return m;
}

}  // namespace

std::vector<MeanNode> two_factor_mean_ode(const TwoFactorParams& p, double t_max,
                                          int substeps) {
    if (substeps < 1) throw UsageError("two_factor_mean_ode: substeps >= 1");

    // Step-halving self-consistency gate on the terminal value.
    const Mean2 coarse = rk4_terminal(p, t_max, std::max(1, substeps / 2));
    const Mean2 fine = rk4_terminal(p, t_max, substeps);
    const double scale = std::max({1.0, std::abs(fine.m1), std::abs(fine.m2)});
    if (std::abs(fine.m1 - coarse.m1) > 1e-10 * scale ||
        std::abs(fine.m2 - coarse.m2) > 1e-10 * scale) {
        throw UsageError("two_factor_mean_ode: substeps too coarse for 1e-10 self-consistency");
    }

    std::vector<MeanNode> out(std::size_t(substeps) + 1);
    Mean2 m{p.x10, p.x20};
    const double h = t_max / substeps;
    out[0] = {0.0, m.m1, m.m2};
    for (int i = 0; i < substeps; ++i) {
        const Mean2 k1 = rhs(p, m);
        const Mean2 k2 = rhs(p, {m.m1 + 0.5 * h * k1.m1, m.m2 + 0.5 * h * k1.m2});
        const Mean2 k3 = rhs(p, {m.m1 + 0.5 * h * k2.m1, m.m2 + 0.5 * h * k2.m2});
        const Mean2 k4 = rhs(p, {m.m1 + h * k3.m1, m.m2 + h * k3.m2});
        m.m1 += h / 6.0 * (k1.m1 + 2.0 * k2.m1 + 2.0 * k3.m1 + k4.m1);
        m.m2 += h / 6.0 * (k1.m2 + 2.0 * k2.m2 + 2.0 * k3.m2 + k4.m2);
        out[std::size_t(i) + 1] = {double(i + 1) * h, m.m1, m.m2};
    }
    return out;
}

}  // namespace oracles
}  // namespace cir
