#pragma once

// Residuals of the structure equations tying (G, A, T, nu, eta, xi) together:
// the compatibility identities of the vertical field, Gauss and Codazzi, the
// normal-bundle derivatives, and the extra identities available when T is a
// principal direction. Intrinsic quantities (metric, Christoffels, their
// contractions) come exactly from second jets; derivatives of derived fields
// (A, nu, eta) come from 4th-order central differences along coordinate
// lines, so those residual tolerances are 1e-6 rather than jet-level 1e-8.

#include "prodgeo/chart.hpp"
#include "prodgeo/shape.hpp"

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace prodgeo {

namespace detail {

struct ShapeStencil {
    ShapeData center;
    std::vector<std::array<ShapeData, 4>> line; // per axis: -2h, -h, +h, +2h
    double h = kFdStep;
};

inline ShapeStencil shape_stencil(const Chart& chart, std::span<const double> u, double h = kFdStep) {
    chart.require_inside(u, 2.0 * h);
    ShapeStencil st;
    st.h = h;
    st.center = shape_data(chart, u);
    const int n = chart.dim();
    st.line.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::array<ShapeData, 4> arr{ShapeData{}, ShapeData{}, ShapeData{}, ShapeData{}};
        const double offs[4] = {-2.0 * h, -h, h, 2.0 * h};
        Vec up(u.begin(), u.end());
        for (int k = 0; k < 4; ++k) {
            up[i] = u[i] + offs[k];
            arr[k] = shape_data(chart, up);
        }
        up[i] = u[i];
        st.line.push_back(std::move(arr));
    }
    return st;
}

/// 4th-order central difference of any field extracted from ShapeData.
template <class F>
auto fd4(const ShapeStencil& st, int axis, F extract) {
    auto m2 = extract(st.line[axis][0]);
    auto m1 = extract(st.line[axis][1]);
    auto p1 = extract(st.line[axis][2]);
    auto p2 = extract(st.line[axis][3]);
    const double inv = 1.0 / (12.0 * st.h);
    if constexpr (std::is_same_v<decltype(m2), double>) {
        return (m2 - 8.0 * m1 + 8.0 * p1 - p2) * inv;
    } else if constexpr (std::is_same_v<decltype(m2), Vec>) {
        Vec r(m2.size());
        for (size_t a = 0; a < r.size(); ++a) r[a] = (m2[a] - 8.0 * m1[a] + 8.0 * p1[a] - p2[a]) * inv;
        return r;
    } else {
        Mat r(m2.rows, m2.cols);
        for (size_t a = 0; a < r.a.size(); ++a)
            r.a[a] = (m2.a[a] - 8.0 * m1.a[a] + 8.0 * p1.a[a] - p2.a[a]) * inv;
        return r;
    }
}

/// Exact metric derivatives d_i G_{jl} = <F_ij, F_l> + <F_j, F_il>.
inline std::vector<Mat> metric_derivatives(const ShapeData& sd) {
    const int n = sd.G.rows;
    std::vector<Mat> dg(n, Mat(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                dg[i](j, l) = inner(sd.jet.d2[i][j], sd.jet.d1[l], sd.c) +
                              inner(sd.jet.d1[j], sd.jet.d2[i][l], sd.c);
    return dg;
}

/// Christoffel symbols Gamma[k](i,j), exact from second jets.
inline std::vector<Mat> christoffel(const ShapeData& sd) {
    const int n = sd.G.rows;
    std::vector<Mat> dg = metric_derivatives(sd);
    std::vector<Mat> gamma(n, Mat(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec rhs(n);
            for (int l = 0; l < n; ++l) rhs[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
            Vec gk = spd_solve(sd.L, rhs);
            for (int k = 0; k < n; ++k) gamma[k](i, j) = gk[k];
        }
    return gamma;
}

/// Exact d_i T (chart components): dT = G^{-1} (d_i w - (d_i G) T).
inline std::vector<Vec> t_field_derivatives(const ShapeData& sd) {
    const int n = sd.G.rows;
    const int m = static_cast<int>(sd.jet.value.size());
    std::vector<Mat> dg = metric_derivatives(sd);
    std::vector<Vec> dt(n);
    for (int i = 0; i < n; ++i) {
        Vec rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = sd.jet.d2[i][j][m - 1];
        Vec gt = dg[i] * sd.T;
        for (int j = 0; j < n; ++j) rhs[j] -= gt[j];
        dt[i] = spd_solve(sd.L, rhs);
    }
    return dt;
}

/// Exact d_i ||T|| (zero vector convention when T vanishes).
inline Vec tnorm_gradient(const ShapeData& sd) {
    const int n = sd.G.rows;
    const int m = static_cast<int>(sd.jet.value.size());
    Vec grad(n, 0.0);
    if (sd.tnorm <= kTnormFloor) return grad;
    std::vector<Mat> dg = metric_derivatives(sd);
    for (int i = 0; i < n; ++i) {
        double d = 0.0;
        for (int j = 0; j < n; ++j) d += 2.0 * sd.jet.d2[i][j][m - 1] * sd.T[j];
        d -= dot(sd.T, dg[i] * sd.T);
        grad[i] = d / (2.0 * sd.tnorm);
    }
    return grad;
}

/// d_i of xi o F in ambient coordinates: the Q-part of F_i.
inline Vec xi_derivative(const ShapeData& sd, int i) {
    Vec d = sd.jet.d1[i];
    d.back() = 0.0;
    return d;
}

} // namespace detail

/// Residuals of the defining identities of (T, nu), Gauss, Codazzi and the
/// normal-bundle derivatives. Every identity is multilinear in its slots, so
/// the residuals are assembled per coordinate axis and then maximized over
/// the probe directions (default: the coordinate basis itself).
inline ResidualReport structure_residuals(const Chart& chart, std::span<const double> u,
                                          const std::vector<Vec>& probe_directions = {}) {
    detail::ShapeStencil st = detail::shape_stencil(chart, u);
    const ShapeData& sd = st.center;
    const int n = chart.dim(), m = chart.ambient_dim();
    const double c = sd.c.real();

    std::vector<Vec> probes = probe_directions;
    if (probes.empty())
        for (int i = 0; i < n; ++i) {
            Vec e(n, 0.0);
            e[i] = 1.0;
            probes.push_back(e);
        }
    for (const auto& p : probes)
        if (static_cast<int>(p.size()) != n)
            throw UsageError("structure_residuals: probe dimension mismatch");
    const int np = static_cast<int>(probes.size());

    std::vector<Mat> gamma = detail::christoffel(sd);
    std::vector<Vec> dT = detail::t_field_derivatives(sd);
    Vec dnu(n);
    std::vector<Vec> deta(n);
    std::vector<Mat> dA(n);
    std::vector<std::vector<Mat>> dgamma(n);
    const double inv12h = 1.0 / (12.0 * st.h);
    for (int i = 0; i < n; ++i) {
        dnu[i] = detail::fd4(st, i, [](const ShapeData& s) { return s.nu; });
        deta[i] = detail::fd4(st, i, [](const ShapeData& s) { return s.eta; });
        dA[i] = detail::fd4(st, i, [](const ShapeData& s) { return s.A; });
        std::array<std::vector<Mat>, 4> cg;
        for (int p = 0; p < 4; ++p) cg[p] = detail::christoffel(st.line[i][p]);
        dgamma[i].assign(n, Mat(n, n));
        for (int k = 0; k < n; ++k)
            for (size_t a = 0; a < dgamma[i][k].a.size(); ++a)
                dgamma[i][k].a[a] =
                    (cg[0][k].a[a] - 8.0 * cg[1][k].a[a] + 8.0 * cg[2][k].a[a] - cg[3][k].a[a]) * inv12h;
    }

    // Per-axis residual tensors.
    std::vector<Vec> nabla_t(n);   // nabla_{e_i} T - nu A e_i
    Vec grad_nu(n);                // e_i(nu) + <A e_i, T>
    std::vector<std::vector<std::vector<Vec>>> gauss(
        n, std::vector<std::vector<Vec>>(n, std::vector<Vec>(n)));
    std::vector<std::vector<Vec>> codazzi(n, std::vector<Vec>(n));
    std::vector<Vec> normal_xi(n), normal_perp_xi(n), normal_perp_eta(n);

    Vec ht = sd.H * sd.T;
    for (int i = 0; i < n; ++i) {
        Vec r(n);
        for (int k = 0; k < n; ++k) {
            double v = dT[i][k];
            for (int l = 0; l < n; ++l) v += gamma[k](i, l) * sd.T[l];
            r[k] = v - sd.nu * sd.A(k, i);
        }
        nabla_t[i] = std::move(r);
        grad_nu[i] = dnu[i] + ht[i];
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec r(n, 0.0);
                if (i != j) {
                    for (int l = 0; l < n; ++l) {
                        double v = dgamma[i][l](j, k) - dgamma[j][l](i, k);
                        for (int mm = 0; mm < n; ++mm)
                            v += gamma[l](i, mm) * gamma[mm](j, k) - gamma[l](j, mm) * gamma[mm](i, k);
                        double rhs = sd.H(k, j) * sd.A(l, i) - sd.H(k, i) * sd.A(l, j);
                        double wedge = 0.0;
                        if (l == i) wedge += sd.G(j, k);
                        if (l == j) wedge -= sd.G(i, k);
                        // -<Y,T>(X ^ T)Z + <X,T>(Y ^ T)Z
                        double xt = -sd.G(i, k) * sd.T[l];
                        if (l == i) xt += sd.w[k];
                        double yt = -sd.G(j, k) * sd.T[l];
                        if (l == j) yt += sd.w[k];
                        rhs += c * (wedge - sd.w[j] * xt + sd.w[i] * yt);
                        r[l] = v - rhs;
                    }
                }
                gauss[i][j][k] = std::move(r);
            }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec r(n, 0.0);
            if (i != j)
                for (int k = 0; k < n; ++k) {
                    double v = dA[i](k, j) - dA[j](k, i);
                    for (int l = 0; l < n; ++l) {
                        v += gamma[k](i, l) * sd.A(l, j) - gamma[l](i, j) * sd.A(k, l);
                        v -= gamma[k](j, l) * sd.A(l, i) - gamma[l](j, i) * sd.A(k, l);
                    }
                    double rhsk = 0.0;
                    if (k == i) rhsk += sd.w[j];
                    if (k == j) rhsk -= sd.w[i];
                    r[k] = v - c * sd.nu * rhsk;
                }
            codazzi[i][j] = std::move(r);
        }

    for (int i = 0; i < n; ++i) {
        Vec dxi = detail::xi_derivative(sd, i);
        Vec r1(m), r2(m), r3(m);
        const double pe = inner(dxi, sd.eta, sd.c);
        const double px = inner(dxi, sd.xi, sd.c);
        const double qe = inner(deta[i], sd.eta, sd.c);
        const double qx = inner(deta[i], sd.xi, sd.c);
        for (int a = 0; a < m; ++a) {
            r1[a] = dxi[a] - (sd.jet.d1[i][a] - (a == m - 1 ? sd.w[i] : 0.0));
            r2[a] = pe * sd.eta[a] + c * px * sd.xi[a] + sd.nu * sd.w[i] * sd.eta[a];
            r3[a] = qe * sd.eta[a] + c * qx * sd.xi[a] - c * sd.nu * sd.w[i] * sd.xi[a];
        }
        normal_xi[i] = std::move(r1);
        normal_perp_xi[i] = std::move(r2);
        normal_perp_eta[i] = std::move(r3);
    }

    // Contract with the probes and take maxima.
    auto contract1 = [&](const std::vector<Vec>& field, bool g_norm) {
        double worst = 0.0;
        for (const auto& X : probes) {
            Vec r(field[0].size(), 0.0);
            for (int i = 0; i < n; ++i)
                for (size_t a = 0; a < r.size(); ++a) r[a] += X[i] * field[i][a];
            worst = std::max(worst, g_norm ? sd.g_norm(r) : max_abs(r));
        }
        return worst;
    };

    ResidualReport rep;
    rep.entries["nabla_T"] = contract1(nabla_t, true);
    {
        double worst = 0.0;
        for (const auto& X : probes) {
            double v = 0.0;
            for (int i = 0; i < n; ++i) v += X[i] * grad_nu[i];
            worst = std::max(worst, std::fabs(v));
        }
        rep.entries["grad_nu"] = worst;
    }
    {
        double worst = 0.0;
        for (int pi = 0; pi < np; ++pi)
            for (int pj = 0; pj < np; ++pj)
                for (int pk = 0; pk < np; ++pk) {
                    Vec r(n, 0.0);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            const double xy = probes[pi][i] * probes[pj][j];
                            if (xy == 0.0) continue;
                            for (int k = 0; k < n; ++k) {
                                const double w3 = xy * probes[pk][k];
                                if (w3 == 0.0) continue;
                                for (int l = 0; l < n; ++l) r[l] += w3 * gauss[i][j][k][l];
                            }
                        }
                    worst = std::max(worst, sd.g_norm(r));
                }
        rep.entries["gauss"] = worst;
    }
    {
        double worst = 0.0;
        for (int pi = 0; pi < np; ++pi)
            for (int pj = 0; pj < np; ++pj) {
                Vec r(n, 0.0);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double xy = probes[pi][i] * probes[pj][j];
                        if (xy == 0.0) continue;
                        for (int l = 0; l < n; ++l) r[l] += xy * codazzi[i][j][l];
                    }
                worst = std::max(worst, sd.g_norm(r));
            }
        rep.entries["codazzi"] = worst;
    }
    rep.entries["normal_xi"] = contract1(normal_xi, false);
    rep.entries["normal_perp_xi"] = contract1(normal_perp_xi, false);
    rep.entries["normal_perp_eta"] = contract1(normal_perp_eta, false);
    return rep;
}

/// Weingarten identities of the inclusion F = i o f with respect to the model
/// normal xi: A_xi(T) = -nu^2 T and A_xi(X) = -X on [T]^perp.
inline ResidualReport inclusion_weingarten_check(const Chart& chart, std::span<const double> u,
                                                 int xi_sign = +1) {
    ShapeData sd = shape_data(chart, u);
    const int n = chart.dim();

    // A_xi column i solves df(A_xi e_i) = -tangential(d_i (xi o F)).
    Mat axi(n, n);
    for (int i = 0; i < n; ++i) {
        Vec dxi = detail::xi_derivative(sd, i);
        if (xi_sign < 0)
            for (auto& v : dxi) v = -v;
        Vec rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = inner(dxi, sd.jet.d1[j], sd.c);
        Vec col = spd_solve(sd.L, rhs);
        for (int k = 0; k < n; ++k) axi(k, i) = -col[k];
    }

    ResidualReport rep;
    Vec at = axi * sd.T;
    Vec r(n);
    for (int k = 0; k < n; ++k) r[k] = at[k] + sd.nu * sd.nu * sd.T[k];
    rep.entries["weingarten_T"] = sd.g_norm(r);

    // G-orthonormal basis of [T]^perp from canonical directions.
    std::vector<Vec> basis;
    for (int k = 0; k < n && static_cast<int>(basis.size()) < (sd.tnorm > kTnormFloor ? n - 1 : n); ++k) {
        Vec v(n, 0.0);
        v[k] = 1.0;
        if (sd.tnorm > kTnormFloor) {
            const double pr = sd.g_inner(v, sd.T) / (sd.tnorm * sd.tnorm);
            for (int a = 0; a < n; ++a) v[a] -= pr * sd.T[a];
        }
        for (const auto& b : basis) {
            const double pr = sd.g_inner(v, b);
            for (int a = 0; a < n; ++a) v[a] -= pr * b[a];
        }
        const double nv = sd.g_norm(v);
        if (nv < 1e-8) continue;
        for (auto& x : v) x /= nv;
        basis.push_back(v);
    }
    double worst = 0.0;
    for (const auto& b : basis) {
        Vec ab = axi * b;
        Vec rr(n);
        for (int k = 0; k < n; ++k) rr[k] = ab[k] + b[k];
        worst = std::max(worst, sd.g_norm(rr));
    }
    rep.entries["weingarten_perp"] = worst;
    return rep;
}

/// The identities special to hypersurfaces with T as a principal direction,
/// in the principal frame with X_n = T/||T||. Throws InapplicabilityError
/// when T vanishes or fails to be principal (angle > 1e-6 rad).
inline ResidualReport t_direction_residuals(const Chart& chart, std::span<const double> u) {
    detail::ShapeStencil st = detail::shape_stencil(chart, u);
    const ShapeData& sd = st.center;
    const int n = chart.dim(), m = chart.ambient_dim();
    const double c = sd.c.real();

    TPrincipalCheck tp = t_principal_check(sd); // throws when T = 0
    AdaptedFrame af = t_adapted_frame(sd);      // throws when T not principal
    const std::vector<Vec>& frame = af.directions;
    const Vec& lambda = af.values;
    const int t_slot = af.t_slot;

    Vec dtn = detail::tnorm_gradient(sd);
    Vec dnu(n);
    std::vector<Vec> deta(n);
    for (int i = 0; i < n; ++i) {
        dnu[i] = detail::fd4(st, i, [](const ShapeData& s) { return s.nu; });
        deta[i] = detail::fd4(st, i, [](const ShapeData& s) { return s.eta; });
    }

    ResidualReport rep;
    double r_tn = 0.0, r_nu = 0.0, r_ht = 0.0, r_eq = 0.0;
    for (int j = 0; j < n; ++j) {
        const bool is_t = j == t_slot;
        const Vec& X = frame[j];
        double xd_tn = 0.0, xd_nu = 0.0, xd_h = 0.0;
        for (int i = 0; i < n; ++i) {
            xd_tn += X[i] * dtn[i];
            xd_nu += X[i] * dnu[i];
            xd_h += X[i] * sd.w[i];
        }
        r_tn = std::max(r_tn, std::fabs(xd_tn - (is_t ? sd.nu * tp.lambda : 0.0)));
        r_nu = std::max(r_nu, std::fabs(xd_nu - (is_t ? -tp.lambda * sd.tnorm : 0.0)));
        r_ht = std::max(r_ht, std::fabs(xd_h - (is_t ? sd.tnorm : 0.0)));

        // hat-nabla_{X} eta_Q = -lambda df(X) + c nu <X,T> xi - X(nu) d/dt
        Vec lhs(m, 0.0), fx(m, 0.0);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a) {
                lhs[a] += X[i] * deta[i][a];
                fx[a] += X[i] * sd.jet.d1[i][a];
            }
        lhs[m - 1] -= xd_nu; // eta_Q = eta - nu d/dt
        const double lam = lambda[j];
        double worst = 0.0;
        for (int a = 0; a < m; ++a) {
            double rhs = -lam * fx[a] + c * sd.nu * xd_h * sd.xi[a];
            if (a == m - 1) rhs -= xd_nu;
            worst = std::max(worst, std::fabs(lhs[a] - rhs));
        }
        r_eq = std::max(r_eq, worst);
    }
    rep.entries["tnorm_gradient"] = r_tn;
    rep.entries["nu_gradient"] = r_nu;
    rep.entries["height_gradient"] = r_ht;
    rep.entries["eta_Q_derivative"] = r_eq;
    return rep;
}

} // namespace prodgeo
