#pragma once

// First and second fundamental data of a hypersurface chart at a point:
// induced metric, unit normal eta tangent to the product, model normal xi,
// shape operator A, the tangential part T of the vertical field and the
// angle function nu, tied together by df(T) + nu*eta = d/dt.

#include "prodgeo/ambient.hpp"
#include "prodgeo/chart.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

#include <cmath>
#include <map>
#include <span>
#include <string>

namespace prodgeo {

inline constexpr double kStructTol = 1e-10;   // |nu^2 + |T|^2 - 1|
inline constexpr double kSelfAdjointTol = 1e-9;
inline constexpr double kTnormFloor = 1e-8;   // discriminates T = 0 from small T
inline constexpr double kMetricCondLimit = 1e8;
inline constexpr double kFdStep = 1e-3;       // stencil step for derived-field derivatives

/// Named residuals, all >= 0; key order fixed by the map.
struct ResidualReport {
    std::map<std::string, double> entries;

    double max() const {
        double m = 0.0;
        for (const auto& [k, v] : entries) m = std::max(m, v);
        return m;
    }
    double at(const std::string& key) const { return entries.at(key); }
};

struct ShapeData {
    Vec u;           // parameter point
    Jet2 jet;        // exact chart jets at u
    Mat G;           // induced metric
    Mat L;           // lower Cholesky factor of G
    AmbientVector xi;  // model normal, <xi,xi> = c
    AmbientVector eta; // unit normal tangent to the product, oriented by anchor
    Mat H;           // second fundamental form <F_ij, eta>
    Mat A;           // shape operator G^{-1} H (mixed components)
    Vec w;           // w_i = <dF_i, d/dt> = chart-coordinate covector of T
    Vec T;           // tangential part of d/dt in chart coordinates
    double nu = 0.0;
    double tnorm = 0.0;
    ModelConstant c{1};

    /// <x, y> in the induced metric.
    double g_inner(const Vec& x, const Vec& y) const { return dot(x, G * y); }
    double g_norm(const Vec& x) const { return std::sqrt(std::max(0.0, g_inner(x, x))); }
};

/// Full fundamental data at u. `orientation` post-multiplies the anchored
/// normal; the default follows the chart's orientation anchor.
inline ShapeData shape_data(const Chart& chart, std::span<const double> u, int orientation = +1) {
    chart.require_inside(u);
    const int n = chart.dim(), m = chart.ambient_dim();
    const ModelConstant c = chart.model();

    ShapeData sd;
    sd.c = c;
    sd.u.assign(u.begin(), u.end());
    sd.jet = evaluate_jet2(chart, u);
    require_on_model(sd.jet.value, c);

    sd.G = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sd.G(i, j) = inner(sd.jet.d1[i], sd.jet.d1[j], c);
    if (spd_condition(sd.G) > kMetricCondLimit)
        throw RegularityError("shape_data: induced metric ill-conditioned at this point");
    sd.L = cholesky(sd.G);

    sd.w.resize(n);
    for (int i = 0; i < n; ++i) sd.w[i] = sd.jet.d1[i][m - 1];
    sd.T = spd_solve(sd.L, sd.w);
    sd.tnorm = std::sqrt(std::max(0.0, dot(sd.w, sd.T)));

    sd.xi.assign(m, 0.0);
    for (int a = 0; a + 1 < m; ++a) sd.xi[a] = sd.jet.value[a];

    std::vector<Vec> tang(sd.jet.d1.begin(), sd.jet.d1.end());
    Vec eta = detail::unoriented_normal<double>(tang, sd.xi, c);
    const Vec& anchor = chart.eta_anchor();
    double sign = inner(eta, anchor, c) < 0.0 ? -1.0 : 1.0;
    sign *= orientation;
    for (auto& a : eta) a *= sign;
    sd.eta = std::move(eta);
    sd.nu = sd.eta[m - 1];

    sd.H = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sd.H(i, j) = inner(sd.jet.d2[i][j], sd.eta, c);
    sd.A = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        Vec col(n);
        for (int i = 0; i < n; ++i) col[i] = sd.H(i, j);
        col = spd_solve(sd.L, col);
        for (int i = 0; i < n; ++i) sd.A(i, j) = col[i];
    }

    if (std::fabs(sd.nu * sd.nu + sd.tnorm * sd.tnorm - 1.0) > 1e-6)
        throw RegularityError("shape_data: unit relation violated; chart not into Q^n_c x R?");
    return sd;
}

/// Residuals of the ShapeData invariants (construction guarantees them up to
/// roundoff; exposed so sweeps and reports can quote the actual numbers).
inline ResidualReport shape_invariant_residuals(const ShapeData& sd) {
    const int n = sd.G.rows, m = static_cast<int>(sd.eta.size());
    ResidualReport r;
    r.entries["unit_relation"] = std::fabs(sd.nu * sd.nu + sd.tnorm * sd.tnorm - 1.0);
    r.entries["eta_unit"] = std::fabs(inner(sd.eta, sd.eta, sd.c) - 1.0);
    r.entries["eta_xi"] = std::fabs(inner(sd.eta, sd.xi, sd.c));
    double et = 0.0;
    for (int i = 0; i < n; ++i) et = std::max(et, std::fabs(inner(sd.eta, sd.jet.d1[i], sd.c)));
    r.entries["eta_tangent"] = et;
    Mat ga = sd.G * sd.A;
    double sa = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sa = std::max(sa, std::fabs(ga(i, j) - ga(j, i)));
    r.entries["self_adjoint"] = sa;
    double mr = model_residual(sd.jet.value, sd.c);
    r.entries["model_constraint"] = mr;
    (void)m;
    return r;
}

/// The G-self-adjoint shape operator as a plain symmetric matrix in the
/// L^T-coordinates: C = L^{-1} H L^{-T}. Same spectrum as A; eigenvectors map
/// back to G-orthonormal chart vectors via x = L^{-T} y.
inline Mat symmetrized_shape_operator(const ShapeData& sd) {
    const int n = sd.G.rows;
    Mat C(n, n);
    // columns of L^{-1} H
    for (int j = 0; j < n; ++j) {
        Vec col(n);
        for (int i = 0; i < n; ++i) col[i] = sd.H(i, j);
        col = forward_subst(sd.L, col);
        for (int i = 0; i < n; ++i) C(i, j) = col[i];
    }
    // then (L^{-1} H) L^{-T}: solve rows against L
    for (int i = 0; i < n; ++i) {
        Vec row(n);
        for (int j = 0; j < n; ++j) row[j] = C(i, j);
        row = forward_subst(sd.L, row);
        for (int j = 0; j < n; ++j) C(i, j) = row[j];
    }
    // enforce exact symmetry of the roundoff-level asymmetry
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (C(i, j) + C(j, i));
            C(i, j) = C(j, i) = v;
        }
    return C;
}

/// Chart-coordinate vector of the y-coordinate vector (x = L^{-T} y).
inline Vec from_symmetrized_coords(const ShapeData& sd, const Vec& y) {
    return backward_subst_t(sd.L, y);
}

/// y-coordinates of a chart vector (y = L^T x).
inline Vec to_symmetrized_coords(const ShapeData& sd, const Vec& x) {
    return transpose(sd.L) * x;
}

/// Principal curvatures (descending) with G-orthonormal principal directions
/// as columns in chart coordinates.
struct PrincipalPairs {
    Vec values;
    Mat directions; // chart coordinates, columns
};

inline PrincipalPairs principal_pairs(const ShapeData& sd) {
    const int n = sd.G.rows;
    EigenSym e = jacobi_eigensym(symmetrized_shape_operator(sd));
    PrincipalPairs p;
    p.values = e.values;
    p.directions = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        Vec y(n);
        for (int i = 0; i < n; ++i) y[i] = e.vectors(i, j);
        Vec x = from_symmetrized_coords(sd, y);
        for (int i = 0; i < n; ++i) p.directions(i, j) = x[i];
    }
    return p;
}

/// Angle (radians) between T and the principal direction nearest to it,
/// multiplicity-aware: measured against the projection of T onto the
/// eigenspace with the largest share of T. Returns the angle and that
/// eigenvalue. Requires |T| > 0.
struct TPrincipalCheck {
    double angle = 0.0;
    double lambda = 0.0;
    int eigen_index = 0; // column in principal_pairs order
};

/// G-orthonormal principal frame adapted to T: the slot t_slot carries
/// exactly T/||T|| and the rest of T's eigencluster is re-orthonormalized
/// against it. Requires T principal (within angle_tol) and nonzero.
struct AdaptedFrame {
    std::vector<Vec> directions; // chart coordinates, value-descending order
    Vec values;
    int t_slot = -1;
};

inline TPrincipalCheck t_principal_check(const ShapeData& sd, double cluster_tol = 1e-6) {
    if (sd.tnorm <= kTnormFloor)
        throw InapplicabilityError("t_principal_check: T vanishes at this point");
    const int n = sd.G.rows;
    EigenSym e = jacobi_eigensym(symmetrized_shape_operator(sd));
    Vec yT = to_symmetrized_coords(sd, sd.T);

    // Group eigenvalues within cluster_tol; T's eigenspace is the cluster
    // carrying the largest share of |T|^2.
    double best = -1.0;
    int best_rep = 0;
    Vec best_proj;
    for (int start = 0; start < n;) {
        int end = start + 1;
        while (end < n && std::fabs(e.values[end] - e.values[start]) <= cluster_tol) ++end;
        Vec proj(n, 0.0);
        double share = 0.0;
        for (int j = start; j < end; ++j) {
            double coef = 0.0;
            for (int i = 0; i < n; ++i) coef += yT[i] * e.vectors(i, j);
            for (int i = 0; i < n; ++i) proj[i] += coef * e.vectors(i, j);
            share += coef * coef;
        }
        if (share > best) {
            best = share;
            best_rep = start;
            best_proj = proj;
        }
        start = end;
    }
    const double tn = norm2(yT), pn = norm2(best_proj);
    const double cosang = pn <= 0.0 ? 0.0 : dot(yT, best_proj) / (tn * pn);
    TPrincipalCheck out;
    out.angle = std::acos(std::min(1.0, std::max(-1.0, cosang)));
    out.lambda = e.values[best_rep];
    out.eigen_index = best_rep;
    return out;
}

inline AdaptedFrame t_adapted_frame(const ShapeData& sd, double cluster_tol = 1e-6,
                                    double angle_tol = 1e-6) {
    TPrincipalCheck tp = t_principal_check(sd, cluster_tol);
    if (tp.angle > angle_tol)
        throw InapplicabilityError("t_adapted_frame: T is not a principal direction here");
    const int n = sd.G.rows;
    PrincipalPairs pp = principal_pairs(sd);

    AdaptedFrame out;
    out.values = pp.values;
    out.directions.assign(n, Vec(n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out.directions[j][i] = pp.directions(i, j);

    std::vector<int> cluster(n, 0);
    for (int j = 1; j < n; ++j)
        cluster[j] = cluster[j - 1] + (std::fabs(pp.values[j] - pp.values[j - 1]) > cluster_tol ? 1 : 0);
    const int tcl = cluster[tp.eigen_index];
    int csize = 0;
    for (int j = 0; j < n; ++j)
        if (cluster[j] == tcl) ++csize;

    std::vector<Vec> rebuilt;
    Vec xn = sd.T;
    for (auto& v : xn) v /= sd.tnorm;
    rebuilt.push_back(xn);
    for (int j = 0; j < n && static_cast<int>(rebuilt.size()) < csize; ++j) {
        if (cluster[j] != tcl) continue;
        Vec v = out.directions[j];
        for (const auto& b : rebuilt) {
            const double pr = sd.g_inner(v, b);
            for (int a = 0; a < n; ++a) v[a] -= pr * b[a];
        }
        const double nv = sd.g_norm(v);
        if (nv < 1e-6) continue; // the direction X_n replaced
        for (auto& x : v) x /= nv;
        rebuilt.push_back(v);
    }
    if (static_cast<int>(rebuilt.size()) != csize)
        throw RegularityError("t_adapted_frame: principal frame rebuild degenerate");
    int pos = 0;
    for (int j = 0; j < n; ++j)
        if (cluster[j] == tcl) {
            if (pos == 0) out.t_slot = j;
            out.directions[j] = rebuilt[pos++];
        }
    return out;
}

} // namespace prodgeo
