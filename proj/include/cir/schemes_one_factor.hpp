#pragma once

#include <span>
#include <vector>

#include "cir/params.hpp"
#include "cir/rng.hpp"

namespace cir {

// Per-step observables of the squared schemes: the radicand under the square
// root, the pre-squaring quantity z, and whether z dipped below zero.
struct StepDiagnostics {
    double radicand = 0.0;
    double z_value = 0.0;
    bool sign_flip = false;
};

// Path-level aggregation of StepDiagnostics.
struct PathDiagnostics {
    long n_steps = 0;
    long n_sign_flips = 0;
    long n_negative_nodes = 0;      // only reachable for TruncatedEuler
    double weighted_flip_sum = 0.0; // sum over steps of y * (sgn z - 1)^2
    double min_value = 0.0;
};

// Squared semi-discrete step
//   y' = ( sigma/(2(1+k a D)) dW
//          + sqrt( y (1 - kD/(1+k a D)) + D/(1+k a D) (kl - sigma^2/(4(1+k a D))) ) )^2
double sd_squared_step(const CirParams& p, double delta, double a, double y, double dw,
                       StepDiagnostics* diag = nullptr);

// Exact transition draw for dx = (theta - kappa x)dt + sigma sqrt(x) dW when
// d = 4 theta / sigma^2 is a positive integer:
//   x' = sum_{j=1}^d ( e^{-kappa D/2} sqrt(x/d) + (sigma/2) sqrt((1-e^{-kappa D})/kappa) z_j )^2
// kappa = 0 uses the limit (1-e^{-kappa D})/kappa -> D.
double exact_cir_step(double theta, double kappa, double sigma, double x, double delta,
                      std::span<const double> z);

// Drift split k = k1 + k2: frozen explicit part v = y(1 - k1 D) + D k1 l,
// then an exact draw of the k2 sub-process started from v.
double split_exact_step(const CirParams& p, double delta, double y,
                        std::span<const double> z);

// Full-truncation Euler comparator; output may go negative.
double truncated_euler_step(const CirParams& p, double delta, double y, double dw);

// Integer degree for the exact-type schemes (snapped), throws UsageError when
// 4kl/sigma^2 is not an integer (ExactSim) resp. sigma = 0.
int exact_degree(const CirParams& p);
int split_degree(const CirParams& p);

struct PathResult {
    std::vector<double> times;
    std::vector<double> values;
    PathDiagnostics diag;
};

// Whole-path simulation on the path's grid (Brownian-driven schemes only).
PathResult simulate_path(const CirParams& p, const SchemeSpec& spec,
                         const BrownianPath& path);

// Whole-path simulation from a seed; Brownian-driven schemes build a level-0
// path, exact/split schemes consume d (resp. floor d) Gaussians per step in
// index order from the stream keyed by (seed, noise 0).
PathResult simulate_path(const CirParams& p, const GridSpec& g, const SchemeSpec& spec,
                         const SeedSpec& seed);

}  // namespace cir
