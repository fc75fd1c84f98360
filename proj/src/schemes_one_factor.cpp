#include "cir/schemes_one_factor.hpp"

#include <cmath>
#include <sstream>

namespace cir {

double sd_squared_step(const CirParams& p, double delta, double a, double y, double dw,
                       StepDiagnostics* diag) {
    const double denom = 1.0 + p.k * a * delta;
    const double radicand =
        y * (1.0 - p.k * delta / denom) +
        (delta / denom) * (p.k * p.l - p.sigma * p.sigma / (4.0 * denom));
    if (radicand < 0.0) {
        std::ostringstream os;
        os << "sd_squared_step: negative radicand " << radicand;
        throw DomainError(os.str());
    }
    const double z = p.sigma / (2.0 * denom) * dw + std::sqrt(radicand);
    if (diag) {
        diag->radicand = radicand;
        diag->z_value = z;
        diag->sign_flip = z < 0.0;
    }
    return z * z;
}

double exact_cir_step(double theta, double kappa, double sigma, double x, double delta,
                      std::span<const double> z) {
    if (sigma <= 0.0) throw UsageError("exact_cir_step: sigma must be positive");
    const double d_real = 4.0 * theta / (sigma * sigma);
    const double d_snap = snapped_floor(d_real);
    if (d_snap < 1.0 || std::abs(d_real - d_snap) > 1e-9 * std::max(1.0, d_real)) {
        throw UsageError("exact_cir_step: degree 4*theta/sigma^2 must be a positive integer");
    }
    const int d = int(d_snap);
    if (z.size() != std::size_t(d)) throw UsageError("exact_cir_step: need d Gaussians");
    if (x < 0.0) throw DomainError("exact_cir_step: negative state");

    const double decay = std::exp(-0.5 * kappa * delta);
    // (1 - e^{-kappa D})/kappa, with the kappa -> 0 limit D.
    const double var_factor =
        kappa > 0.0 ? (1.0 - std::exp(-kappa * delta)) / kappa : delta;
    const double m = decay * std::sqrt(x / d);
    const double s = 0.5 * sigma * std::sqrt(var_factor);
    double sum = 0.0;
    for (int j = 0; j < d; ++j) {
        const double term = m + s * z[std::size_t(j)];
        sum += term * term;
    }
    return sum;
}

int exact_degree(const CirParams& p) {
    if (p.sigma == 0.0) throw UsageError("degree undefined for sigma = 0");
    const double d = snapped_floor(p.degree());
    if (std::abs(p.degree() - d) > 1e-9 * std::max(1.0, p.degree()) || d < 1.0) {
        throw UsageError("ExactSim requires integer degree 4kl/sigma^2 >= 1");
    }
    return int(d);
}

int split_degree(const CirParams& p) {
    if (p.sigma == 0.0) throw UsageError("degree undefined for sigma = 0");
    const double d = snapped_floor(p.degree());
    if (d < 1.0) throw UsageError("SplitExact requires degree 4kl/sigma^2 >= 1");
    return int(d);
}

double split_exact_step(const CirParams& p, double delta, double y,
                        std::span<const double> z) {
    const double d = snapped_floor(p.degree());
    const double k2 = d * p.sigma * p.sigma / (4.0 * p.l);
    const double k1 = p.k - k2;
    const double v = y * (1.0 - k1 * delta) + delta * k1 * p.l;
    if (v < 0.0) {
        std::ostringstream os;
        os << "split_exact_step: negative intermediate " << v;
        throw DomainError(os.str());
    }
    return exact_cir_step(k2 * p.l, k2, p.sigma, v, delta, z);
}

double truncated_euler_step(const CirParams& p, double delta, double y, double dw) {
    const double yp = std::max(y, 0.0);
    return y + delta * (p.k * p.l - p.k * yp) + p.sigma * std::sqrt(yp) * dw;
}

namespace {

void record(PathDiagnostics& diag, double y, const StepDiagnostics& sd) {
    ++diag.n_steps;
    if (sd.sign_flip) ++diag.n_sign_flips;
    // y = z^2, so y * (sgn z - 1)^2 is 4y on a flip and 0 otherwise.
    if (sd.sign_flip) diag.weighted_flip_sum += 4.0 * y;
}

PathResult run_brownian(const CirParams& p, const SchemeSpec& spec,
                        const BrownianPath& path) {
    const double delta = path.delta();
    const std::size_t n = path.steps();
    PathResult out;
    out.times.resize(n + 1);
    out.values.resize(n + 1);
    out.values[0] = p.x0;
    out.times[0] = 0.0;
    out.diag.min_value = p.x0;
    const auto& inc = path.increments.at(0);
    double y = p.x0;
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.kind == SchemeKind::SemiDiscreteSquared) {
            StepDiagnostics sd;
            const double y_next = sd_squared_step(p, delta, *spec.a, y, inc[i], &sd);
            record(out.diag, y_next, sd);
            y = y_next;
        } else {
            y = truncated_euler_step(p, delta, y, inc[i]);
            ++out.diag.n_steps;
            if (y < 0.0) ++out.diag.n_negative_nodes;
        }
        out.diag.min_value = std::min(out.diag.min_value, y);
        out.times[i + 1] = double(i + 1) * delta;
        out.values[i + 1] = y;
    }
    return out;
}

}  // namespace

PathResult simulate_path(const CirParams& p, const SchemeSpec& spec,
                         const BrownianPath& path) {
    if (!is_brownian_driven(spec.kind)) {
        throw UsageError("simulate_path(BrownianPath): scheme is not Brownian-driven");
    }
    if (is_two_factor(spec.kind)) {
        throw UsageError("simulate_path: two-factor scheme passed one-factor parameters");
    }
    return run_brownian(p, spec, path);
}

PathResult simulate_path(const CirParams& p, const GridSpec& g, const SchemeSpec& spec,
                         const SeedSpec& seed) {
    if (is_two_factor(spec.kind)) {
        throw UsageError("simulate_path: two-factor scheme passed one-factor parameters");
    }
    if (is_brownian_driven(spec.kind)) {
        return run_brownian(p, spec, make_brownian_path(seed, g, 1));
    }

    const double delta = g.delta();
    const int d = spec.kind == SchemeKind::ExactSim ? exact_degree(p) : split_degree(p);
    GaussianStream stream(seed);
    std::vector<double> z(static_cast<std::size_t>(d));
    PathResult out;
    out.times.resize(std::size_t(g.n_steps) + 1);
    out.values.resize(std::size_t(g.n_steps) + 1);
    out.values[0] = p.x0;
    out.diag.min_value = p.x0;
    double y = p.x0;
    for (int i = 0; i < g.n_steps; ++i) {
        for (int j = 0; j < d; ++j) z[std::size_t(j)] = stream.next();
        if (spec.kind == SchemeKind::ExactSim) {
            y = exact_cir_step(p.k * p.l, p.k, p.sigma, y, delta, z);
        } else {
            y = split_exact_step(p, delta, y, z);
        }
        ++out.diag.n_steps;
        out.diag.min_value = std::min(out.diag.min_value, y);
        out.times[std::size_t(i) + 1] = g.node(i + 1);
        out.values[std::size_t(i) + 1] = y;
    }
    return out;
}

}  // namespace cir
