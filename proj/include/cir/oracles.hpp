#pragma once

#include <vector>

#include "cir/params.hpp"

namespace cir {
namespace oracles {

struct MomentPair {
    double mean = 0.0;
    double variance = 0.0;
};

// Closed-form transition moments of the square-root diffusion started at x0:
//   mean(t) = x0 e^{-kt} + l (1 - e^{-kt})
//   var(t)  = x0 (sigma^2/k)(e^{-kt} - e^{-2kt}) + l (sigma^2/(2k))(1 - e^{-kt})^2
// with the k -> 0 limits var = x0 sigma^2 t (+ higher order handled exactly).
MomentPair cir_moments(const CirParams& p, double t);

// Deterministic mean map of the squared semi-discrete scheme,
//   E_{j+1} = sigma^2 D / (4(1+k a D)^2) + E_j (1 - kD/(1+k a D))
//             + (D/(1+k a D)) (kl - sigma^2/(4(1+k a D))),  E_0 = x0.
// Derivation is independent of the scheme code: the increment is independent
// of the radicand, so the cross term has zero mean.
std::vector<double> sd_mean_recursion(const CirParams& p, const GridSpec& g, double a);

struct MeanNode {
    double t = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
};

// RK4 integration of the linear mean system of the coupled model,
//   m1' = k - lambda11 m1 + lambda12 m2
//   m2' = l - lambda21 m2 + lambda22 m1.
// Asserts step-halving self-consistency below 1e-10 relative.
std::vector<MeanNode> two_factor_mean_ode(const TwoFactorParams& p, double t_max,
                                          int substeps);

}  // namespace oracles
}  // namespace cir
