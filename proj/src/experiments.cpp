#include "cir/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cir {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Deterministic path loop: each body call fills slots indexed by its path, so
// the merge below is independent of scheduling.
void for_each_path(int n_paths, McExecution exec, const std::function<void(int)>& body) {
    if (exec == McExecution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < n_paths; ++p) body(p);
    } else {
        for (int p = 0; p < n_paths; ++p) body(p);
    }
}

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
    double se_mean = 0.0;
};

MeanVar reduce_mean_var(const std::vector<double>& xs) {
    MeanVar out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / double(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.var = n > 1 ? ss / double(n - 1) : 0.0;
    out.se_mean = std::sqrt(out.var / double(n));
    return out;
}

}  // namespace

OrderFit fit_order(const std::vector<std::pair<double, double>>& ladder) {
    OrderFit fit;
    std::vector<double> xs, ys;
    for (const auto& [delta, err] : ladder) {
        if (!(err > 0.0) || !(delta > 0.0) || !std::isfinite(err)) {
            ++fit.n_excluded;
            continue;
        }
        xs.push_back(std::log2(delta));
        ys.push_back(std::log2(err));
    }
    fit.n_used = int(xs.size());
    if (fit.n_used < 2) throw UsageError("fit_order: need at least 2 usable levels");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(ys.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + fit.slope * (xs[i] - mx));
        fit.residual += r * r;
    }
    return fit;
}

ErrorReport strong_self_convergence(const CirParams& p, const GridSpec& g_coarse,
                                    int levels, const SchemeSpec& spec, int n_paths,
                                    std::uint64_t seed, McExecution exec) {
    if (levels < 3) throw UsageError("strong_self_convergence: levels >= 3 required");
    if (is_two_factor(spec.kind)) throw UsageError("strong_self_convergence: one-factor only");
    if (!is_brownian_driven(spec.kind)) {
        throw UsageError(
            "strong_self_convergence: scheme randomness is not Brownian-increment-coupled");
    }
    const auto t0 = clock_type::now();

    const std::uint32_t ref_level = std::uint32_t(levels) + 2;
    // Gate check per level (deterministic, done once up front).
    std::vector<bool> usable(static_cast<std::size_t>(levels), true);
    std::vector<std::string> notes(static_cast<std::size_t>(levels));
    for (int m = 0; m < levels; ++m) {
        GridSpec gm(g_coarse.t_max, g_coarse.n_steps << m);
        const ValidityVerdict v = validate(p, gm, spec);
        if (!v) {
            usable[static_cast<std::size_t>(m)] = false;
            notes[static_cast<std::size_t>(m)] = v.describe();
        }
    }
    {
        GridSpec gref(g_coarse.t_max, g_coarse.n_steps << ref_level);
        const ValidityVerdict v = validate(p, gref, spec);
        if (!v) throw DomainError("reference level fails the validity gate: " + v.describe());
    }

    std::vector<std::vector<double>> sqdiff(static_cast<std::size_t>(levels),
                                            std::vector<double>(static_cast<std::size_t>(n_paths)));
    std::vector<std::vector<double>> terminal(static_cast<std::size_t>(levels),
                                              std::vector<double>(static_cast<std::size_t>(n_paths)));

    for_each_path(n_paths, exec, [&](int path_idx) {
        SeedSpec s{seed, std::uint32_t(path_idx), 0};
        BrownianPath path = make_brownian_path(s, g_coarse, 1);
        std::vector<BrownianPath> by_level;
        by_level.reserve(ref_level + 1);
        by_level.push_back(path);
        for (std::uint32_t m = 1; m <= ref_level; ++m) by_level.push_back(refine(by_level.back()));
        const double y_ref = simulate_path(p, spec, by_level[ref_level]).values.back();
        for (int m = 0; m < levels; ++m) {
            if (!usable[static_cast<std::size_t>(m)]) continue;
            const double y_m = simulate_path(p, spec, by_level[static_cast<std::size_t>(m)]).values.back();
            const double d = y_m - y_ref;
            sqdiff[static_cast<std::size_t>(m)][static_cast<std::size_t>(path_idx)] = d * d;
            terminal[static_cast<std::size_t>(m)][static_cast<std::size_t>(path_idx)] = y_m;
        }
    });

    ErrorReport report;
    report.scheme = spec;
    report.n_paths = n_paths;
    report.seed = seed;
    const oracles::MomentPair exact = oracles::cir_moments(p, g_coarse.t_max);
    std::vector<std::pair<double, double>> fit_input;
    for (int m = 0; m < levels; ++m) {
        LadderLevel lvl;
        lvl.delta = g_coarse.delta() / double(1 << m);
        if (!usable[static_cast<std::size_t>(m)]) {
            lvl.skipped = true;
            lvl.note = notes[static_cast<std::size_t>(m)];
            report.ladder.push_back(lvl);
            continue;
        }
        const MeanVar sq = reduce_mean_var(sqdiff[static_cast<std::size_t>(m)]);
        lvl.strong_error_l2 = std::sqrt(sq.mean);
        lvl.std_error = lvl.strong_error_l2 > 0.0 ? sq.se_mean / (2.0 * lvl.strong_error_l2) : 0.0;
        const MeanVar term = reduce_mean_var(terminal[static_cast<std::size_t>(m)]);
        lvl.weak_mean_error = std::abs(term.mean - exact.mean);
        lvl.weak_var_error = std::abs(term.var - exact.variance);
        lvl.mean_std_error = term.se_mean;
        report.ladder.push_back(lvl);
        fit_input.emplace_back(lvl.delta, lvl.strong_error_l2);
    }
    const OrderFit fit = fit_order(fit_input);
    report.fitted_order = fit.slope;
    report.fit_residual = fit.residual;
    report.runtime_seconds = seconds_since(t0);
    return report;
}

ErrorReport weak_moment_error(const CirParams& p, const GridSpec& g, const SchemeSpec& spec,
                              int n_paths, std::uint64_t seed, McExecution exec,
                              double guard_factor) {
    const auto t0 = clock_type::now();
    const double guard = guard_factor * std::max(p.l, 1.0);
    std::vector<double> terminal(static_cast<std::size_t>(n_paths));
    std::vector<unsigned char> exceeded(static_cast<std::size_t>(n_paths), 0);
    for_each_path(n_paths, exec, [&](int path_idx) {
        SeedSpec s{seed, std::uint32_t(path_idx), 0};
        const PathResult r = simulate_path(p, g, spec, s);
        terminal[static_cast<std::size_t>(path_idx)] = r.values.back();
        for (double y : r.values) {
            if (std::abs(y) > guard) {
                exceeded[static_cast<std::size_t>(path_idx)] = 1;
                break;
            }
        }
    });
    const MeanVar term = reduce_mean_var(terminal);
    const oracles::MomentPair exact = oracles::cir_moments(p, g.t_max);
    ErrorReport report;
    report.scheme = spec;
    report.n_paths = n_paths;
    report.seed = seed;
    LadderLevel lvl;
    lvl.delta = g.delta();
    lvl.weak_mean_error = std::abs(term.mean - exact.mean);
    lvl.weak_var_error = std::abs(term.var - exact.variance);
    lvl.mean_std_error = term.se_mean;
    report.ladder.push_back(lvl);
    for (unsigned char e : exceeded) report.guard_exceedances += e;
    report.runtime_seconds = seconds_since(t0);
    return report;
}

ErrorReport weak_moment_error(const TwoFactorParams& p, const GridSpec& g,
                              const SchemeSpec& spec, int n_paths, std::uint64_t seed,
                              McExecution exec, double guard_factor) {
    const auto t0 = clock_type::now();
    const double guard = guard_factor * std::max({p.k, p.l, 1.0});
    std::vector<double> t1(static_cast<std::size_t>(n_paths)), t2(static_cast<std::size_t>(n_paths));
    std::vector<unsigned char> exceeded(static_cast<std::size_t>(n_paths), 0);
    for_each_path(n_paths, exec, [&](int path_idx) {
        SeedSpec s{seed, std::uint32_t(path_idx), 0};
        const PairPathResult r = simulate_pair_path(p, g, spec, s);
        t1[static_cast<std::size_t>(path_idx)] = r.values1.back();
        t2[static_cast<std::size_t>(path_idx)] = r.values2.back();
        if (std::abs(r.values1.back()) > guard || std::abs(r.values2.back()) > guard) {
            exceeded[static_cast<std::size_t>(path_idx)] = 1;
        }
    });
    const MeanVar m1 = reduce_mean_var(t1);
    const MeanVar m2 = reduce_mean_var(t2);
    const auto ode = oracles::two_factor_mean_ode(p, g.t_max, 1024);
    ErrorReport report;
    report.scheme = spec;
    report.n_paths = n_paths;
    report.seed = seed;
    LadderLevel lvl;
    lvl.delta = g.delta();
    lvl.weak_mean_error = std::abs(m1.mean - ode.back().m1);
    lvl.weak_mean_error2 = std::abs(m2.mean - ode.back().m2);
    lvl.mean_std_error = m1.se_mean;
    lvl.mean_std_error2 = m2.se_mean;
    report.ladder.push_back(lvl);
    for (unsigned char e : exceeded) report.guard_exceedances += e;
    report.runtime_seconds = seconds_since(t0);
    return report;
}

NodeMeans mc_node_means(const CirParams& p, const GridSpec& g, const SchemeSpec& spec,
                        int n_paths, std::uint64_t seed, McExecution exec) {
    const std::size_t n_nodes = static_cast<std::size_t>(g.n_steps) + 1;
    // Per-path rows merged serially afterwards.
    std::vector<std::vector<double>> values(static_cast<std::size_t>(n_paths));
    for_each_path(n_paths, exec, [&](int path_idx) {
        SeedSpec s{seed, std::uint32_t(path_idx), 0};
        values[static_cast<std::size_t>(path_idx)] = simulate_path(p, g, spec, s).values;
    });
    NodeMeans out;
    out.t.resize(n_nodes);
    out.mean.resize(n_nodes);
    out.std_error.resize(n_nodes);
    std::vector<double> column(static_cast<std::size_t>(n_paths));
    for (std::size_t j = 0; j < n_nodes; ++j) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(n_paths); ++i) column[i] = values[i][j];
        const MeanVar mv = reduce_mean_var(column);
        out.t[j] = g.node(int(j));
        out.mean[j] = mv.mean;
        out.std_error[j] = mv.se_mean;
    }
    return out;
}

namespace {

template <typename PathFn>
PositivityAudit audit_impl(int n_paths, McExecution exec, PathFn&& run) {
    struct Row {
        long negatives = 0;
        long steps = 0;
        long domain_errors = 0;
        double min_value = std::numeric_limits<double>::infinity();
    };
    std::vector<Row> rows(static_cast<std::size_t>(n_paths));
    for_each_path(n_paths, exec, [&](int path_idx) { run(path_idx, rows[static_cast<std::size_t>(path_idx)]); });
    PositivityAudit audit;
    audit.n_paths = n_paths;
    audit.min_value = std::numeric_limits<double>::infinity();
    for (const Row& r : rows) {
        audit.n_negative_nodes += r.negatives;
        audit.n_steps_total += r.steps;
        audit.n_domain_errors += r.domain_errors;
        audit.min_value = std::min(audit.min_value, r.min_value);
    }
    return audit;
}

}  // namespace

PositivityAudit positivity_audit(const CirParams& p, const GridSpec& g,
                                 const SchemeSpec& spec, int n_paths, std::uint64_t seed,
                                 McExecution exec) {
    return audit_impl(n_paths, exec, [&](int path_idx, auto& row) {
        SeedSpec s{seed, std::uint32_t(path_idx), 0};
        const PathResult r = simulate_path(p, g, spec, s);
        row.steps = r.diag.n_steps;
        row.min_value = r.diag.min_value;
        for (double y : r.values) row.negatives += y < 0.0 ? 1 : 0;
    });
}

PositivityAudit positivity_audit(const TwoFactorParams& p, const GridSpec& g,
                                 const SchemeSpec& spec, int n_paths, std::uint64_t seed,
                                 McExecution exec) {
    return audit_impl(n_paths, exec, [&](int path_idx, auto& row) {
        SeedSpec s{seed, std::uint32_t(path_idx), 0};
        const PairPathResult r = simulate_pair_path(p, g, spec, s);
        row.steps = r.diag1.n_steps + r.diag2.n_steps;
        row.min_value = std::min(r.diag1.min_value, r.diag2.min_value);
        row.domain_errors = r.aborted ? 1 : 0;
        for (double y : r.values1) row.negatives += y < 0.0 ? 1 : 0;
        for (double y : r.values2) row.negatives += y < 0.0 ? 1 : 0;
    });
}

SignFlipReport sign_flip_study(const CirParams& p, const GridSpec& g_coarse, int levels,
                               double a, int n_paths, std::uint64_t seed, McExecution exec) {
    if (!(p.x0 > 0.0)) throw UsageError("sign_flip_study: x0 > 0 required");
    const auto t0 = clock_type::now();
    const SchemeSpec spec = SchemeSpec::semi_discrete(a);
    SignFlipReport report;
    report.n_paths = n_paths;
    report.seed = seed;
    for (int m = 0; m < levels; ++m) {
        GridSpec gm(g_coarse.t_max, g_coarse.n_steps << m);
        const ValidityVerdict v = validate(p, gm, spec);
        if (!v) throw DomainError("sign_flip_study: " + v.describe());
        std::vector<double> frac(static_cast<std::size_t>(n_paths)), wstat(static_cast<std::size_t>(n_paths));
        for_each_path(n_paths, exec, [&](int path_idx) {
            SeedSpec s{seed, std::uint32_t(path_idx), 0};
            const PathResult r = simulate_path(p, gm, spec, s);
            frac[static_cast<std::size_t>(path_idx)] = double(r.diag.n_sign_flips) / double(r.diag.n_steps);
            wstat[static_cast<std::size_t>(path_idx)] = r.diag.weighted_flip_sum / double(r.diag.n_steps);
        });
        const MeanVar f = reduce_mean_var(frac);
        const MeanVar w = reduce_mean_var(wstat);
        SignFlipLevel lvl;
        lvl.delta = gm.delta();
        lvl.flip_fraction = f.mean;
        lvl.flip_fraction_se = f.se_mean;
        lvl.weighted_stat = w.mean;
        lvl.weighted_stat_se = w.se_mean;
        report.ladder.push_back(lvl);
    }
    report.runtime_seconds = seconds_since(t0);
    return report;
}

}  // namespace cir
