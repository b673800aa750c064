#pragma once

// The flat model space E^{n+2} with metric ds^2 = c dx1^2 + dx2^2 + ... and the
// quadric Q^n_c = {c x1^2 + x2^2 + ... + x_{n+1}^2 = c} sitting inside it.
// The R factor of Q^n_c x R lives in the last coordinate slot, so the vertical
// field is e_{n+2} globally.

#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

#include <cmath>
#include <span>
#include <utility>

namespace prodgeo {

/// Curvature sign of the Q factor: +1 sphere, -1 hyperbolic.
class ModelConstant {
public:
    explicit constexpr ModelConstant(int c) : c_(c) {
        if (c != 1 && c != -1) throw UsageError("ModelConstant: only +1 or -1 admitted");
    }
    constexpr int value() const { return c_; }
    constexpr double real() const { return static_cast<double>(c_); }
    friend constexpr bool operator==(ModelConstant a, ModelConstant b) { return a.c_ == b.c_; }

private:
    int c_;
};

inline constexpr double kModelTol = 1e-9; // membership tolerance for the quadric

using AmbientVector = Vec;

/// Signature-aware inner product: first coordinate weighted by c.
inline double inner(std::span<const double> u, std::span<const double> v, ModelConstant c) {
    if (u.size() != v.size() || u.empty()) throw UsageError("inner: dimension mismatch");
    double s = c.real() * u[0] * v[0];
    for (size_t i = 1; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

/// Templated flavor for jet-level arithmetic inside chart pipelines.
template <class S>
S inner_t(std::span<const S> u, std::span<const S> v, ModelConstant c) {
    S s = u[0] * v[0] * c.real();
    for (size_t i = 1; i < u.size(); ++i) s = s + u[i] * v[i];
    return s;
}

/// C_c(s), S_c(s): cos/sin for c = +1, cosh/sinh for c = -1.
/// Satisfies C^2 + c S^2 = 1.
template <class T>
std::pair<T, T> cs_kernels(const T& s, ModelConstant c) {
    if (c.value() == 1) return {cos(s), sin(s)};
    return {cosh(s), sinh(s)};
}

/// Residual of the quadric membership constraint c x1^2 + ... + x_{n+1}^2 = c.
inline double model_residual(std::span<const double> x, ModelConstant c) {
    if (x.size() < 4) throw UsageError("model_residual: ambient dimension must be >= 4");
    double q = c.real() * x[0] * x[0];
    for (size_t i = 1; i + 1 < x.size(); ++i) q += x[i] * x[i];
    return std::fabs(q - c.real());
}

/// Size of the squared terms entering the constraint; the residual of a point
/// with coordinates of size R carries roundoff of order R^2 * eps, so
/// membership is judged relative to this scale.
inline double model_scale(std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i) s += x[i] * x[i];
    return std::max(1.0, s);
}

/// Throws unless x lies on Q^n_c x R (within tol, relative to the coordinate
/// scale) on the correct sheet.
inline void require_on_model(std::span<const double> x, ModelConstant c, double tol = kModelTol) {
    if (model_residual(x, c) > tol * model_scale(x))
        throw ConstraintError("point violates the model constraint");
    if (c.value() == -1 && x[0] <= 0.0)
        throw ConstraintError("hyperbolic point on the wrong sheet (x1 <= 0)");
}

/// A point of Q^n_c x R: Q-factor coordinates plus height.
struct ProductPoint {
    AmbientVector q; // n+1 coordinates of the Q^n_c factor
    double t = 0.0;  // R factor (= x_{n+2})
    ModelConstant c{1};

    ProductPoint(AmbientVector q_coords, double height, ModelConstant model)
        : q(std::move(q_coords)), t(height), c(model) {
        if (q.size() < 3) throw UsageError("ProductPoint: need n >= 2");
        AmbientVector full = ambient();
        require_on_model(full, c);
    }

    /// All n+2 ambient coordinates.
    AmbientVector ambient() const {
        AmbientVector x = q;
        x.push_back(t);
        return x;
    }
};

/// Geodesic exponential in Q^n_c x R applied to t*v for a tangent vector v
/// (given in ambient coordinates, split v = (v1, v2)).
inline ProductPoint exp_map(const ProductPoint& p, const AmbientVector& v, double t) {
    const size_t m = p.q.size() + 1;
    if (v.size() != m) throw UsageError("exp_map: tangent vector dimension mismatch");
    const ModelConstant c = p.c;

    AmbientVector v1(v.begin(), v.end() - 1);
    const double v2 = v.back();
    const double tangency = inner(v1, p.q, c);
    const double v1n2 = inner(v1, v1, c);
    if (std::fabs(tangency) > 1e-8 * std::max(1.0, std::sqrt(std::fabs(v1n2))))
        throw UsageError("exp_map: v not tangent to Q^n_c at p");

    if (v1n2 <= 1e-28) // degenerate branch: purely vertical geodesic
        return ProductPoint(p.q, p.t + t * v2, c);

    const double v1n = std::sqrt(v1n2);
    const auto [C, S] = cs_kernels(v1n * t, c);
    AmbientVector q(p.q.size());
    for (size_t i = 0; i < q.size(); ++i) q[i] = C * p.q[i] + S * v1[i] / v1n;
    return ProductPoint(std::move(q), p.t + t * v2, c);
}

} // namespace prodgeo
