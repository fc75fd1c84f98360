#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cir/oracles.hpp"
#include "cir/params.hpp"
#include "cir/schemes_one_factor.hpp"
#include "cir/schemes_two_factor.hpp"

namespace cir {

// Serial runs the same kernels on one thread; results are bit-identical to
// the parallel path because per-path substreams and the merge order do not
// depend on the worker count.
enum class McExecution { Serial, Parallel };

struct LadderLevel {
    double delta = 0.0;
    double strong_error_l2 = 0.0;
    double std_error = 0.0;          // delta-method SE of the L2 estimate
    double weak_mean_error = 0.0;
    double weak_var_error = 0.0;
    double weak_mean_error2 = 0.0;   // second coordinate, two-factor runs
    double mean_std_error = 0.0;     // SE of the MC mean
    double mean_std_error2 = 0.0;
    bool skipped = false;
    std::string note;
};

struct ErrorReport {
    SchemeSpec scheme;
    std::vector<LadderLevel> ladder;   // sorted by decreasing delta
    double fitted_order = 0.0;
    double fit_residual = 0.0;
    int n_paths = 0;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
    long guard_exceedances = 0;        // paths beyond the moment-explosion guard
};

struct SignFlipLevel {
    double delta = 0.0;
    double flip_fraction = 0.0;
    double flip_fraction_se = 0.0;
    double weighted_stat = 0.0;        // mean over steps of y (sgn z - 1)^2
    double weighted_stat_se = 0.0;
};

struct SignFlipReport {
    std::vector<SignFlipLevel> ladder;
    int n_paths = 0;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
};

struct PositivityAudit {
    long n_paths = 0;
    long n_steps_total = 0;
    long n_negative_nodes = 0;
    long n_domain_errors = 0;          // aborted cross-diffusion paths
    double min_value = 0.0;
};

struct OrderFit {
    double slope = 0.0;
    double residual = 0.0;             // sum of squared log2 residuals
    int n_used = 0;
    int n_excluded = 0;
};

// Least-squares slope of log2(error) against log2(delta). Levels with
// nonpositive error are excluded and counted.
OrderFit fit_order(const std::vector<std::pair<double, double>>& ladder);

// Cauchy-rate estimate: for each level m the scheme runs at delta/2^m and is
// compared at T against the same scheme at delta/2^(levels+2), both driven by
// the same dyadically refined Brownian path. Brownian-driven one-factor
// schemes only; the exact/split schemes are not increment-coupled and are
// refused with UsageError.
ErrorReport strong_self_convergence(const CirParams& p, const GridSpec& g_coarse,
                                    int levels, const SchemeSpec& spec, int n_paths,
                                    std::uint64_t seed,
                                    McExecution exec = McExecution::Parallel);

// Terminal mean/variance against the closed-form moments.
ErrorReport weak_moment_error(const CirParams& p, const GridSpec& g, const SchemeSpec& spec,
                              int n_paths, std::uint64_t seed,
                              McExecution exec = McExecution::Parallel,
                              double guard_factor = 1e6);

// Terminal means of both coordinates against the RK4 mean-ODE oracle.
ErrorReport weak_moment_error(const TwoFactorParams& p, const GridSpec& g,
                              const SchemeSpec& spec, int n_paths, std::uint64_t seed,
                              McExecution exec = McExecution::Parallel,
                              double guard_factor = 1e6);

// MC node means with standard errors (one-factor), for recursion-vs-MC checks.
struct NodeMeans {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> std_error;
};
NodeMeans mc_node_means(const CirParams& p, const GridSpec& g, const SchemeSpec& spec,
                        int n_paths, std::uint64_t seed,
                        McExecution exec = McExecution::Parallel);

PositivityAudit positivity_audit(const CirParams& p, const GridSpec& g,
                                 const SchemeSpec& spec, int n_paths, std::uint64_t seed,
                                 McExecution exec = McExecution::Parallel);

PositivityAudit positivity_audit(const TwoFactorParams& p, const GridSpec& g,
                                 const SchemeSpec& spec, int n_paths, std::uint64_t seed,
                                 McExecution exec = McExecution::Parallel);

// Per-level flip fraction and the weighted flip statistic over a dyadic
// ladder starting from g_coarse.
SignFlipReport sign_flip_study(const CirParams& p, const GridSpec& g_coarse, int levels,
                               double a, int n_paths, std::uint64_t seed,
                               McExecution exec = McExecution::Parallel);

}  // namespace cir
