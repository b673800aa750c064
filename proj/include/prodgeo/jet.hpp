#pragma once

// Order-2 forward-mode jet over a fixed number of parameter slots.
//
// D2<S> carries value, gradient and the lower triangle of the Hessian with
// respect to up to kMaxParams variables, with every coefficient living in S.
// Nesting D2<D2<double>> composes in the usual forward-AD way and yields the
// mixed derivatives up to order four needed to take exact second jets of a
// chart whose definition itself consumes second jets of another chart.
//
// The Hessian is stored as a lower triangle only, so index symmetry
// d2[i][j] == d2[j][i] holds by construction (same storage slot).

#include <array>
#include <cmath>
#include <type_traits>

namespace prodgeo {

inline constexpr int kMaxParams = 6;
inline constexpr int kHessSize = kMaxParams * (kMaxParams + 1) / 2;

/// Flat index of lower-triangle entry (i, j); callers may pass i < j.
constexpr int hess_index(int i, int j) {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
}

using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tan;
using std::tanh;

template <class S>
constexpr double leaf_value(const S& x) {
    return static_cast<double>(x);
}

template <class S>
struct D2 {
    using scalar_type = S;

    S f{};
    std::array<S, kMaxParams> g{};
    std::array<S, kHessSize> h{};

    constexpr D2() = default;
    constexpr D2(const S& value) : f(value) {}

    // Broadcast from plain arithmetic; drills down through nesting levels.
    template <class A, class = std::enable_if_t<std::is_arithmetic_v<A> && !std::is_same_v<A, S>>>
    constexpr D2(A value) : f(static_cast<S>(value)) {}

    /// Independent variable in slot i.
    static constexpr D2 variable(const S& value, int i) {
        D2 x(value);
        x.g[static_cast<size_t>(i)] = S(1.0);
        return x;
    }

    friend constexpr double leaf_value(const D2& x) { return leaf_value(x.f); }

    friend constexpr D2 operator+(const D2& x) { return x; }

    friend constexpr D2 operator-(const D2& x) {
        D2 r;
        r.f = -x.f;
        for (int i = 0; i < kMaxParams; ++i) r.g[i] = -x.g[i];
        for (int i = 0; i < kHessSize; ++i) r.h[i] = -x.h[i];
        return r;
    }

    constexpr D2& operator+=(const D2& y) {
        f += y.f;
        for (int i = 0; i < kMaxParams; ++i) g[i] += y.g[i];
        for (int i = 0; i < kHessSize; ++i) h[i] += y.h[i];
        return *this;
    }

    constexpr D2& operator-=(const D2& y) {
        f -= y.f;
        for (int i = 0; i < kMaxParams; ++i) g[i] -= y.g[i];
        for (int i = 0; i < kHessSize; ++i) h[i] -= y.h[i];
        return *this;
    }

    // (xy)''_ij = x''_ij y + x'_i y'_j + x'_j y'_i + x y''_ij
    constexpr D2& operator*=(const D2& y) {
        for (int i = 0, idx = 0; i < kMaxParams; ++i)
            for (int j = 0; j <= i; ++j, ++idx)
                h[idx] = h[idx] * y.f + g[i] * y.g[j] + g[j] * y.g[i] + f * y.h[idx];
        for (int i = 0; i < kMaxParams; ++i) g[i] = g[i] * y.f + f * y.g[i];
        f *= y.f;
        return *this;
    }

    constexpr D2& operator/=(const D2& y) { return *this *= inverse(y); }

    constexpr D2& operator+=(double c) {
        f += c;
        return *this;
    }
    constexpr D2& operator-=(double c) {
        f -= c;
        return *this;
    }
    constexpr D2& operator*=(double c) {
        f *= c;
        for (int i = 0; i < kMaxParams; ++i) g[i] *= c;
        for (int i = 0; i < kHessSize; ++i) h[i] *= c;
        return *this;
    }
    constexpr D2& operator/=(double c) {
        f /= c;
        for (int i = 0; i < kMaxParams; ++i) g[i] /= c;
        for (int i = 0; i < kHessSize; ++i) h[i] /= c;
        return *this;
    }

    friend constexpr D2 operator+(D2 x, const D2& y) { return x += y; }
    friend constexpr D2 operator-(D2 x, const D2& y) { return x -= y; }
    friend constexpr D2 operator*(D2 x, const D2& y) { return x *= y; }
    friend constexpr D2 operator/(D2 x, const D2& y) { return x /= y; }

    friend constexpr D2 operator+(D2 x, double c) { return x += c; }
    friend constexpr D2 operator+(double c, D2 x) { return x += c; }
    friend constexpr D2 operator-(D2 x, double c) { return x -= c; }
    friend constexpr D2 operator-(double c, const D2& x) { return -x + c; }
    friend constexpr D2 operator*(D2 x, double c) { return x *= c; }
    friend constexpr D2 operator*(double c, D2 x) { return x *= c; }
    friend constexpr D2 operator/(D2 x, double c) { return x /= c; }
    friend constexpr D2 operator/(double c, const D2& x) { return inverse(x) * c; }

    /// Composes a scalar function given its value and first two derivatives
    /// at x.f: r = phi(x), r' = phi1 x', r''_ij = phi2 x'_i x'_j + phi1 x''_ij.
    static constexpr D2 chain(const S& phi0, const S& phi1, const S& phi2, const D2& x) {
        D2 r;
        r.f = phi0;
        for (int i = 0; i < kMaxParams; ++i) r.g[i] = phi1 * x.g[i];
        for (int i = 0, idx = 0; i < kMaxParams; ++i)
            for (int j = 0; j <= i; ++j, ++idx)
                r.h[idx] = phi2 * (x.g[i] * x.g[j]) + phi1 * x.h[idx];
        return r;
    }

    friend constexpr D2 inverse(const D2& x) {
        const S u = S(1.0) / x.f;
        const S u2 = u * u;
        return chain(u, -u2, 2.0 * (u2 * u), x);
    }

    friend constexpr D2 sqrt(const D2& x) {
        const S r = sqrt(x.f);
        const S d1 = S(0.5) / r;
        return chain(r, d1, -0.5 * (d1 / x.f), x);
    }

    friend constexpr D2 sin(const D2& x) {
        const S s = sin(x.f), c = cos(x.f);
        return chain(s, c, -s, x);
    }

    friend constexpr D2 cos(const D2& x) {
        const S s = sin(x.f), c = cos(x.f);
        return chain(c, -s, -c, x);
    }

    friend constexpr D2 sinh(const D2& x) {
        const S s = sinh(x.f), c = cosh(x.f);
        return chain(s, c, s, x);
    }

    friend constexpr D2 cosh(const D2& x) {
        const S s = sinh(x.f), c = cosh(x.f);
        return chain(c, s, c, x);
    }

    friend constexpr D2 exp(const D2& x) {
        const S e = exp(x.f);
        return chain(e, e, e, x);
    }

    friend constexpr D2 log(const D2& x) {
        const S u = S(1.0) / x.f;
        return chain(log(x.f), u, -(u * u), x);
    }
};

using Jet = D2<double>;
using JetJet = D2<Jet>;

} // namespace prodgeo
