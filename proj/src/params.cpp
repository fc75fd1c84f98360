#include "cir/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cir {

namespace {

void require_finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw UsageError(std::string(name) + " must be finite and nonnegative");
    }
}

}  // namespace

CirParams::CirParams(double k_, double l_, double sigma_, double x0_)
    : k(k_), l(l_), sigma(sigma_), x0(x0_) {
    require_finite_nonneg(k, "k");
    require_finite_nonneg(l, "l");
    require_finite_nonneg(sigma, "sigma");
    require_finite_nonneg(x0, "x0");
}

double CirParams::degree() const {
    if (sigma == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * k * l / (sigma * sigma);
}

TwoFactorParams::TwoFactorParams(double k_, double l_, double l11, double l12,
                                 double l21, double l22, double s1, double s2,
                                 double x10_, double x20_)
    : k(k_), l(l_), lambda11(l11), lambda12(l12), lambda21(l21), lambda22(l22),
      sigma1(s1), sigma2(s2), x10(x10_), x20(x20_) {
    require_finite_nonneg(k, "k");
    require_finite_nonneg(l, "l");
    require_finite_nonneg(lambda11, "lambda11");
    require_finite_nonneg(lambda12, "lambda12");
    require_finite_nonneg(lambda21, "lambda21");
    require_finite_nonneg(lambda22, "lambda22");
    require_finite_nonneg(sigma1, "sigma1");
    require_finite_nonneg(sigma2, "sigma2");
    require_finite_nonneg(x10, "x10");
    require_finite_nonneg(x20, "x20");
}

double TwoFactorParams::degree1() const {
    if (sigma1 == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * k / (sigma1 * sigma1);
}

double TwoFactorParams::degree2() const {
    if (sigma2 == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * l / (sigma2 * sigma2);
}

GridSpec::GridSpec(double t_max_, int n_steps_) : t_max(t_max_), n_steps(n_steps_) {
    if (!std::isfinite(t_max) || t_max <= 0.0) throw UsageError("t_max must be > 0");
    if (n_steps < 1) throw UsageError("n_steps must be >= 1");
}

const char* to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::SemiDiscreteSquared: return "sd";
        case SchemeKind::SplitExact: return "split";
        case SchemeKind::ExactSim: return "exact";
        case SchemeKind::TruncatedEuler: return "euler";
        case SchemeKind::TwoFactorSplitExact: return "tf-split";
        case SchemeKind::TwoFactorSquared: return "tf-squared";
        case SchemeKind::TwoFactorCrossDiffusion: return "tf-cross";
    }
    return "?";
}

std::optional<SchemeKind> scheme_kind_from_string(const std::string& name) {
    for (SchemeKind kind : {SchemeKind::SemiDiscreteSquared, SchemeKind::SplitExact,
                            SchemeKind::ExactSim, SchemeKind::TruncatedEuler,
                            SchemeKind::TwoFactorSplitExact, SchemeKind::TwoFactorSquared,
                            SchemeKind::TwoFactorCrossDiffusion}) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

bool is_two_factor(SchemeKind kind) {
    return kind == SchemeKind::TwoFactorSplitExact ||
           kind == SchemeKind::TwoFactorSquared ||
           kind == SchemeKind::TwoFactorCrossDiffusion;
}

bool is_brownian_driven(SchemeKind kind) {
    return kind == SchemeKind::SemiDiscreteSquared ||
           kind == SchemeKind::TruncatedEuler ||
           kind == SchemeKind::TwoFactorSquared ||
           kind == SchemeKind::TwoFactorCrossDiffusion;
}

SchemeSpec SchemeSpec::semi_discrete(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw UsageError("implicitness weight a must lie in [0,1]");
    SchemeSpec s;
    s.kind = SchemeKind::SemiDiscreteSquared;
    s.a = a;
    return s;
}

SchemeSpec SchemeSpec::of(SchemeKind kind) {
    if (kind == SchemeKind::SemiDiscreteSquared) {
        throw UsageError("SemiDiscreteSquared requires an implicitness weight a");
    }
    SchemeSpec s;
    s.kind = kind;
    return s;
}

std::string ValidityVerdict::describe() const {
    if (valid) return "valid";
    std::ostringstream os;
    os << "invalid: gate " << gate << " violated (" << lhs << " vs " << rhs << ")";
    return os.str();
}

double snapped_floor(double x) {
    double nearest = std::round(x);
    double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (std::abs(x - nearest) <= tol) return nearest;
    return std::floor(x);
}

namespace {

ValidityVerdict fail(std::string gate, double lhs, double rhs) {
    ValidityVerdict v;
    v.valid = false;
    v.gate = std::move(gate);
    v.lhs = lhs;
    v.rhs = rhs;
    return v;
}

}  // namespace

ValidityVerdict validate_semidiscrete(const CirParams& p, const GridSpec& g, double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw UsageError("implicitness weight a must lie in [0,1]");
    const double delta = g.delta();
    const double s2 = p.sigma * p.sigma;
    if (s2 > 4.0 * p.k * p.l) {
        const double denom = 4.0 * p.k * p.k * p.l;
        if (denom == 0.0) {
            return fail("i: a*delta >= (sigma^2-4kl)/(4k^2 l)", a * delta,
                        std::numeric_limits<double>::infinity());
        }
        const double bound = (s2 - 4.0 * p.k * p.l) / denom;
        if (!(a * delta >= bound)) {
            return fail("i: a*delta >= (sigma^2-4kl)/(4k^2 l)", a * delta, bound);
        }
    }
    if (p.k > 0.0 && a < 1.0) {
        if (!(delta * (1.0 - a) <= 1.0 / p.k)) {
            return fail("ii: delta*(1-a) <= 1/k", delta * (1.0 - a), 1.0 / p.k);
        }
    }
    return ValidityVerdict{};
}

ValidityVerdict validate_split(const CirParams& p, const GridSpec& g) {
    if (p.sigma == 0.0) {
        throw DomainError("splitting undefined for deterministic diffusion");
    }
    const double d = p.degree();
    ValidityVerdict v;
    v.d = d;
    if (!(d >= 1.0)) {
        ValidityVerdict f = fail("d = 4kl/sigma^2 >= 1", d, 1.0);
        f.d = d;
        return f;
    }
    v.k2 = snapped_floor(d) * p.sigma * p.sigma / (4.0 * p.l);
    v.k1 = p.k - v.k2;
    if (v.k1 > 0.0 && !(g.delta() < 1.0 / v.k1)) {
        ValidityVerdict f = fail("delta < 1/k1", g.delta(), 1.0 / v.k1);
        f.d = v.d;
        f.k1 = v.k1;
        f.k2 = v.k2;
        return f;
    }
    return v;
}

ValidityVerdict validate_two_factor(const TwoFactorParams& p, const GridSpec& g,
                                    SchemeKind kind) {
    const double delta = g.delta();
    if (kind == SchemeKind::TwoFactorSplitExact) {
        if (p.sigma1 == 0.0 || p.sigma2 == 0.0) {
            throw DomainError("splitting undefined for deterministic diffusion");
        }
        ValidityVerdict v;
        v.d = p.degree1();
        v.d2 = p.degree2();
        if (!(v.d >= 1.0)) return fail("d1 = 4k/sigma1^2 >= 1", v.d, 1.0);
        if (!(v.d2 >= 1.0)) return fail("d2 = 4l/sigma2^2 >= 1", v.d2, 1.0);
        v.k2 = snapped_floor(v.d) * p.sigma1 * p.sigma1 / 4.0;
        v.k1 = p.k - v.k2;
        v.l2 = snapped_floor(v.d2) * p.sigma2 * p.sigma2 / 4.0;
        v.l1 = p.l - v.l2;
        if (v.k1 > 0.0 && !(delta < 1.0 / v.k1)) return fail("delta < 1/k1", delta, 1.0 / v.k1);
        if (v.l1 > 0.0 && !(delta < 1.0 / v.l1)) return fail("delta < 1/l1", delta, 1.0 / v.l1);
        return v;
    }
    if (kind == SchemeKind::TwoFactorSquared) {
        ValidityVerdict v;
        v.d = p.degree1();
        v.d2 = p.degree2();
        if (!(v.d >= 1.0)) return fail("d1 = 4k/sigma1^2 >= 1", v.d, 1.0);
        if (!(v.d2 >= 1.0)) return fail("d2 = 4l/sigma2^2 >= 1", v.d2, 1.0);
        const double lam = std::max(p.lambda11, p.lambda21);
        if (lam > 0.0 && !(delta <= 1.0 / lam)) {
            return fail("delta <= 1/max{lambda11,lambda21}", delta, 1.0 / lam);
        }
        return v;
    }
    if (kind == SchemeKind::TwoFactorCrossDiffusion) {
        // Experimental scheme, no gate; radicand failures surface at runtime.
        return ValidityVerdict{};
    }
    throw UsageError("validate_two_factor: not a two-factor scheme kind");
}

ValidityVerdict validate(const CirParams& p, const GridSpec& g, const SchemeSpec& spec) {
    switch (spec.kind) {
        case SchemeKind::SemiDiscreteSquared:
            if (!spec.a) throw UsageError("SemiDiscreteSquared requires weight a");
            return validate_semidiscrete(p, g, *spec.a);
        case SchemeKind::SplitExact:
            return validate_split(p, g);
        case SchemeKind::ExactSim: {
            if (p.sigma == 0.0) throw DomainError("exact simulation undefined for sigma = 0");
            const double d = snapped_floor(p.degree());
            if (d != p.degree() && std::abs(p.degree() - d) > 1e-9 * std::max(1.0, d)) {
                ValidityVerdict v;
                v.valid = false;
                v.gate = "d = 4kl/sigma^2 integer";
                v.lhs = p.degree();
                v.rhs = d;
                return v;
            }
            if (!(d >= 1.0)) {
                ValidityVerdict v;
                v.valid = false;
                v.gate = "d >= 1";
                v.lhs = d;
                v.rhs = 1.0;
                return v;
            }
            ValidityVerdict v;
            v.d = d;
            return v;
        }
        case SchemeKind::TruncatedEuler:
            return ValidityVerdict{};
        default:
            throw UsageError("validate: two-factor scheme passed one-factor parameters");
    }
}

}  // namespace cir
