#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cir/params.hpp"
#include "cir/rng.hpp"
#include "cir/schemes_one_factor.hpp"

namespace cir {

struct PairState {
    double y1 = 0.0;
    double y2 = 0.0;
};

// Drift-splitting step of the coupled model. The cross term and the k1 part
// are frozen at t_k (all addends nonnegative), then each coordinate takes an
// exact draw of its own sub-process. Both coordinates advance from the same
// time-t_k state.
//   v1 = y1 + D lambda12 y2 + D k1,  y1' ~ exact(theta=k2, kappa=lambda11, sigma1, v1)
//   v2 = y2 + D lambda22 y1 + D l1,  y2' ~ exact(theta=l2, kappa=lambda21, sigma2, v2)
PairState two_factor_split_step(const TwoFactorParams& p, double delta, const PairState& s,
                                std::span<const double> z1, std::span<const double> z2);

// Squared scheme of the coupled model:
//   y1' = ( (sigma1/2) dW1 + sqrt( y1(1-lambda11 D) + D lambda12 y2 + D(k - sigma1^2/4) ) )^2
// and symmetrically for y2'. Parallel update from time-t_k values.
PairState two_factor_squared_step(const TwoFactorParams& p, double delta, const PairState& s,
                                  double dw1, double dw2,
                                  StepDiagnostics* diag1 = nullptr,
                                  StepDiagnostics* diag2 = nullptr);

// EXPERIMENTAL sqrt(x1 x2)-diffusion variant. No validity gate exists; a
// negative radicand raises DomainError with the offending value, no clamping.
PairState two_factor_cross_step(const TwoFactorParams& p, double delta, const PairState& s,
                                double dw1, double dw2);

// Degrees of the exact sub-steps: floor(4k/sigma1^2), floor(4l/sigma2^2).
std::pair<int, int> two_factor_split_degrees(const TwoFactorParams& p);

struct PairPathResult {
    std::vector<double> times;
    std::vector<double> values1;
    std::vector<double> values2;
    PathDiagnostics diag1;
    PathDiagnostics diag2;
    bool aborted = false;       // cross-diffusion radicand failure
    std::string abort_reason;
};

// Noise 0 drives coordinate 1, noise 1 drives coordinate 2 (independent
// substreams). For the experimental scheme a DomainError aborts the path and
// is reported in the result rather than thrown.
PairPathResult simulate_pair_path(const TwoFactorParams& p, const GridSpec& g,
                                  const SchemeSpec& spec, const SeedSpec& seed);

PairPathResult simulate_pair_path(const TwoFactorParams& p, const SchemeSpec& spec,
                                  const BrownianPath& path);

}  // namespace cir
