#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace cir {

// Thrown when a scheme is evaluated outside its validity region
// (negative radicand, zero diffusion where splitting is required, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on contract misuse (wrong scheme kind, malformed arguments).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// One-factor square-root diffusion dx = (kl - kx)dt + sigma*sqrt(x) dW.
struct CirParams {
    double k = 0.0;      // mean-reversion speed
    double l = 0.0;      // long-run level
    double sigma = 0.0;  // volatility of volatility
    double x0 = 0.0;     // initial value

    CirParams() = default;
    CirParams(double k_, double l_, double sigma_, double x0_);

    // Degree d = 4kl/sigma^2; +inf when sigma == 0 (deterministic ODE case).
    double degree() const;
    bool degree_is_finite() const { return sigma > 0.0; }
};

// Coupled pair of square-root diffusions with cross drift terms.
struct TwoFactorParams {
    double k = 0.0, l = 0.0;
    double lambda11 = 0.0, lambda12 = 0.0, lambda21 = 0.0, lambda22 = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0;
    double x10 = 0.0, x20 = 0.0;

    TwoFactorParams() = default;
    TwoFactorParams(double k_, double l_, double l11, double l12, double l21,
                    double l22, double s1, double s2, double x10_, double x20_);

    double degree1() const;  // 4k/sigma1^2
    double degree2() const;  // 4l/sigma2^2
};

// Uniform time grid 0 = t_0 < t_1 < ... < t_n = T.
struct GridSpec {
    double t_max = 1.0;
    int n_steps = 1;

    GridSpec() = default;
    GridSpec(double t_max_, int n_steps_);

    double delta() const { return t_max / n_steps; }
    double node(int i) const { return i * delta(); }
};

enum class SchemeKind {
    SemiDiscreteSquared,
    SplitExact,
    ExactSim,
    TruncatedEuler,
    TwoFactorSplitExact,
    TwoFactorSquared,
    TwoFactorCrossDiffusion,
};

const char* to_string(SchemeKind kind);
std::optional<SchemeKind> scheme_kind_from_string(const std::string& name);
bool is_two_factor(SchemeKind kind);
bool is_brownian_driven(SchemeKind kind);

// Scheme selection plus scheme-specific knobs. The implicitness weight a
// applies to SemiDiscreteSquared only.
struct SchemeSpec {
    SchemeKind kind = SchemeKind::SemiDiscreteSquared;
    std::optional<double> a;

    static SchemeSpec semi_discrete(double a);
    static SchemeSpec of(SchemeKind kind);
};

// Outcome of a validity gate check. Invalid verdicts name the violated
// gate and both sides of the inequality.
struct ValidityVerdict {
    bool valid = true;
    std::string gate;    // empty when valid
    double lhs = 0.0;    // evaluated sides of the failing inequality
    double rhs = 0.0;

    // Derived splitting quantities, populated by validate_split /
    // validate_two_factor regardless of the verdict.
    double d = 0.0, k1 = 0.0, k2 = 0.0;
    double d2 = 0.0, l1 = 0.0, l2 = 0.0;

    explicit operator bool() const { return valid; }
    std::string describe() const;
};

// Snap values within 1e-9 relative tolerance of an integer before flooring,
// so 4kl/sigma^2 = 8 - eps does not floor to 7.
double snapped_floor(double x);

// Gate (i): a*delta >= (sigma^2 - 4kl)/(4k^2 l) whenever sigma^2 > 4kl,
// gate (ii): delta*(1-a) <= 1/k. Together they keep the step radicand
// nonnegative for every y >= 0.
ValidityVerdict validate_semidiscrete(const CirParams& p, const GridSpec& g, double a);

// Splitting k = k1 + k2 with 4*k2*l/sigma^2 = floor(4kl/sigma^2); requires
// d >= 1 and delta < 1/k1.
ValidityVerdict validate_split(const CirParams& p, const GridSpec& g);

ValidityVerdict validate_two_factor(const TwoFactorParams& p, const GridSpec& g,
                                    SchemeKind kind);

// Dispatches to the gate matching spec.kind; TruncatedEuler and the
// experimental cross-diffusion scheme have no gate beyond structural validity.
ValidityVerdict validate(const CirParams& p, const GridSpec& g, const SchemeSpec& spec);

}  // namespace cir
