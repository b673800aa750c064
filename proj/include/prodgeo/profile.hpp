#pragma once

// Height-profile machinery for rotational hypersurfaces over horosphere
// orbits: the third-order profile ODE a'''(1 + a'^2) - 3 a''^2 a' = 0, its
// closed-form solutions, the curvature formulas of the assembled rotational
// hypersurface, and the constancy constraints that force the affine profile.

#include "prodgeo/ambient.hpp"
#include "prodgeo/catalog.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/parallel.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

namespace prodgeo {

enum class ProfileKind { Affine, LemmaSolution, Cubic, Custom };

/// A height profile a: I -> R with analytic derivatives up to order three.
/// a'(s) > 0 is required throughout I; the affine and lemma kinds guarantee
/// it, polynomial/custom profiles are sampled at construction.
class ProfileFunction {
public:
    struct Values {
        double a, d1, d2, d3;
    };

    static ProfileFunction affine(double slope, double offset = 0.0, double lo = -3.0,
                                  double hi = 3.0) {
        if (slope <= 0.0) throw ParameterError("affine profile: slope must be positive");
        ProfileFunction p;
        p.kind_ = ProfileKind::Affine;
        p.par_ = {slope, offset, 0.0, 0.0};
        p.lo_ = lo;
        p.hi_ = hi;
        return p;
    }

    /// a(s) = c3 - sqrt(1 - (c1 s + c2)^2)/c1 on {0 < c1 s + c2 < 1}.
    static ProfileFunction lemma_solution(double c1, double c2, double c3) {
        if (c1 == 0.0) throw ParameterError("lemma_solution: c1 must be nonzero");
        ProfileFunction p;
        p.kind_ = ProfileKind::LemmaSolution;
        p.par_ = {c1, c2, c3, 0.0};
        const double e0 = -c2 / c1, e1 = (1.0 - c2) / c1;
        p.lo_ = std::min(e0, e1);
        p.hi_ = std::max(e0, e1);
        return p;
    }

    static ProfileFunction cubic(std::array<double, 4> coeffs, double lo, double hi) {
        ProfileFunction p;
        p.kind_ = ProfileKind::Cubic;
        p.par_ = coeffs;
        p.lo_ = lo;
        p.hi_ = hi;
        p.require_increasing();
        return p;
    }

    static ProfileFunction custom(std::function<Values(double)> eval, double lo, double hi) {
        ProfileFunction p;
        p.kind_ = ProfileKind::Custom;
        p.custom_ = std::move(eval);
        p.lo_ = lo;
        p.hi_ = hi;
        p.require_increasing();
        return p;
    }

    ProfileKind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::array<double, 4>& params() const { return par_; }

    Values eval(double s) const {
        if (s < lo_ || s > hi_) throw DomainError("profile: s outside the profile domain");
        switch (kind_) {
        case ProfileKind::Affine:
            return {par_[0] * s + par_[1], par_[0], 0.0, 0.0};
        case ProfileKind::LemmaSolution: {
            const double c1 = par_[0], q = c1 * s + par_[1];
            const double r2 = 1.0 - q * q;
            if (r2 <= 0.0) throw DomainError("lemma_solution: c1 s + c2 outside (0, 1)");
            const double r = std::sqrt(r2);
            return {par_[2] - r / c1, q / r, c1 / (r2 * r), 3.0 * c1 * c1 * q / (r2 * r2 * r)};
        }
        case ProfileKind::Cubic: {
            const double a0 = par_[0], a1 = par_[1], a2 = par_[2], a3 = par_[3];
            return {a0 + s * (a1 + s * (a2 + s * a3)), a1 + s * (2.0 * a2 + 3.0 * a3 * s),
                    2.0 * a2 + 6.0 * a3 * s, 6.0 * a3};
        }
        case ProfileKind::Custom:
            return custom_(s);
        }
        throw UsageError("profile: unknown kind");
    }

private:
    void require_increasing() const {
        for (int i = 0; i <= 64; ++i) {
            const double s = lo_ + (hi_ - lo_) * i / 64.0;
            if (eval(s).d1 <= 0.0) throw ParameterError("profile: a'(s) must be positive on I");
        }
    }

    ProfileKind kind_ = ProfileKind::Affine;
    std::array<double, 4> par_{};
    std::function<Values(double)> custom_;
    double lo_ = 0.0, hi_ = 0.0;
};

/// Left side of the profile ODE a'''(1 + (a')^2) - 3 (a'')^2 a', as written.
inline double ode_residual(const ProfileFunction& a, double s) {
    const auto v = a.eval(s);
    return v.d3 * (1.0 + v.d1 * v.d1) - 3.0 * v.d2 * v.d2 * v.d1;
}

/// Principal curvatures of the rotational hypersurface with profile a over
/// horosphere orbits of base curvature lambda_base:
/// mu_tangential = -(a'/b) lambda^s and mu_T = a''/b^3 with b = sqrt(1+a'^2).
inline std::pair<double, double> rotational_curvatures(const ProfileFunction& a, double lambda_base,
                                                       ModelConstant c, double s) {
    const auto v = a.eval(s);
    const double b = std::sqrt(1.0 + v.d1 * v.d1);
    const double ls = model_parallel_curvature(lambda_base, c, s);
    return {-(v.d1 / b) * ls, v.d2 / (b * b * b)};
}

/// Residuals of the two constancy constraints:
/// r2 = a'' lambda^s + a'(1 + a'^2)(c + (lambda^s)^2)  (mu_i constant in s)
/// r3 = a'''(1 + a'^2) - 3 a''^2 a'                    (mu_T constant in s)
inline std::pair<double, double> case_constraints(const ProfileFunction& a, double lambda_s,
                                                  ModelConstant c, double s) {
    const auto v = a.eval(s);
    const double r2 =
        v.d2 * lambda_s + v.d1 * (1.0 + v.d1 * v.d1) * (c.real() + lambda_s * lambda_s);
    return {r2, ode_residual(a, s)};
}

/// Chart of the rotational hypersurface swept with this profile (closed-form
/// kinds only; a custom profile has no scalar-generic evaluator).
inline ChartPtr rotational_profile_chart(int n, const ProfileFunction& prof, double z_half_width = 0.3,
                                         double s_margin = 0.1) {
    const double lo = prof.lo() + s_margin, hi = prof.hi() - s_margin;
    if (lo >= hi) throw UsageError("rotational_profile_chart: profile domain too small");
    Box box{Vec(n, -z_half_width), Vec(n, z_half_width)};
    box.lo[n - 1] = lo;
    box.hi[n - 1] = hi;
    Vec base(n, 0.0);
    base[n - 1] = 0.5 * (lo + hi);

    const auto& p = prof.params();
    switch (prof.kind()) {
    case ProfileKind::Affine: {
        const double B = p[0], off = p[1];
        auto f = [B, off]<class T>(const T& s) { return B * s + off; };
        return charts::rotational_family(n, "rotational-profile-affine", f, box);
    }
    case ProfileKind::LemmaSolution: {
        const double c1 = p[0], c2 = p[1], c3 = p[2];
        auto f = [c1, c2, c3]<class T>(const T& s) {
            T q = c1 * s + c2;
            return c3 - sqrt(1.0 - q * q) / c1;
        };
        return charts::rotational_family(n, "rotational-profile-lemma", f, box);
    }
    case ProfileKind::Cubic: {
        const double a0 = p[0], a1 = p[1], a2 = p[2], a3 = p[3];
        auto f = [a0, a1, a2, a3]<class T>(const T& s) {
            return a0 + s * (a1 + s * (a2 + s * a3));
        };
        return charts::rotational_family(n, "rotational-profile-cubic", f, box);
    }
    case ProfileKind::Custom:
        throw UsageError("rotational_profile_chart: custom profiles cannot be embedded");
    }
    throw UsageError("rotational_profile_chart: unknown kind");
}

} // namespace prodgeo
