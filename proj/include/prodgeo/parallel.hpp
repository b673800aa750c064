#pragma once

// Parallel hypersurface families f_t of a T-principal chart, the closed-form
// transport of principal curvatures along the family, the polynomial
// recurrence for higher t-derivatives of the transported curvatures, Newton
// identities, and the constant-curvature <-> constant-|T| equivalence test.

#include "prodgeo/ambient.hpp"
#include "prodgeo/chart.hpp"
#include "prodgeo/eigenframe.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/shape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <vector>

namespace prodgeo {

inline constexpr double kRegMargin = 1e-6; // minimum distance to a focal denominator

namespace detail {

inline void throw_focal(double lambda, double t) {
    std::ostringstream os;
    os << "focal value: transport denominator vanishes for lambda = " << lambda << " at t = " << t;
    throw FocalPointError(os.str());
}

} // namespace detail

/// Curvature of f_t in a direction orthogonal to T:
/// (c |T| S_c(|T|t) + lambda C_c(|T|t)) / (C_c(|T|t) - lambda |T|^-1 S_c(|T|t)).
inline double transport_curvature(double lambda, double tnorm, ModelConstant c, double t,
                                  double eps_reg = kRegMargin) {
    auto [C, S] = cs_kernels(tnorm * t, c);
    const double den = C - lambda * S / tnorm;
    if (std::fabs(den) <= eps_reg) detail::throw_focal(lambda, t);
    return (c.real() * tnorm * S + lambda * C) / den;
}

/// Curvature of f_t in the T direction: lambda_n / (1 - t lambda_n).
inline double transport_curvature_T(double lambda_n, double t, double eps_reg = kRegMargin) {
    const double den = 1.0 - t * lambda_n;
    if (std::fabs(den) <= eps_reg) detail::throw_focal(lambda_n, t);
    return lambda_n / den;
}

/// In-model transport for hypersurfaces of Q^n_c itself:
/// (c S_c(s) + C_c(s) lambda) / (C_c(s) - S_c(s) lambda).
inline double model_parallel_curvature(double lambda, ModelConstant c, double s,
                                       double eps_reg = kRegMargin) {
    auto [C, S] = cs_kernels(s, c);
    const double den = C - S * lambda;
    if (std::fabs(den) <= eps_reg) detail::throw_focal(lambda, s);
    return (c.real() * S + C * lambda) / den;
}

// ---------------------------------------------------------------------------
// Derivative-coefficient recurrence: u_{k,j} = (j+1) u_{k-1,j+1} + (j-1) u_{k-1,j-1}

struct CoefficientTable {
    int order = 0;
    std::map<std::pair<int, int>, unsigned __int128> u;

    unsigned __int128 at(int k, int j) const {
        auto it = u.find({k, j});
        return it == u.end() ? 0 : it->second;
    }
};

inline std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

/// Rows 1..k of the coefficient table. Row parity: odd k carries even j,
/// even k carries odd j, always 0 <= j <= k+1. Entries overflow-checked.
inline CoefficientTable derivative_coefficients(int k) {
    if (k < 1) throw UsageError("derivative_coefficients: need k >= 1");
    if (k > 30) throw UsageError("derivative_coefficients: order capped at 30");
    CoefficientTable table;
    table.order = k;
    table.u[{1, 0}] = 1;
    table.u[{1, 2}] = 1;
    for (int kk = 2; kk <= k; ++kk) {
        const int j0 = kk % 2 == 0 ? 1 : 0;
        for (int j = j0; j <= kk + 1; j += 2) {
            unsigned __int128 up = table.at(kk - 1, j + 1);
            unsigned __int128 down = j >= 1 ? table.at(kk - 1, j - 1) : 0;
            unsigned __int128 a{}, b{}, sum{};
            if (__builtin_mul_overflow(up, static_cast<unsigned __int128>(j + 1), &a) ||
                __builtin_mul_overflow(down, static_cast<unsigned __int128>(j >= 1 ? j - 1 : 0), &b) ||
                __builtin_add_overflow(a, b, &sum))
                throw UsageError("derivative_coefficients: 128-bit overflow");
            if (sum != 0) table.u[{kk, j}] = sum;
        }
    }
    return table;
}

/// k-th t-derivative of the transported curvature at t = 0, evaluated from
/// the coefficient polynomial: sum_j u_{k,j} c^{(k+1-j)/2} |T|^{k+1-j} lambda^j.
inline double curvature_derivative(double lambda, double tnorm, ModelConstant c, int k) {
    CoefficientTable table = derivative_coefficients(k);
    long double sum = 0.0L;
    const int j0 = k % 2 == 0 ? 1 : 0;
    for (int j = j0; j <= k + 1; j += 2) {
        const unsigned __int128 coeff = table.at(k, j);
        if (coeff == 0) continue;
        const int cpow = (k + 1 - j) / 2;
        const double csign = (c.value() == -1 && cpow % 2 == 1) ? -1.0 : 1.0;
        sum += static_cast<long double>(coeff) * csign *
               std::pow(static_cast<long double>(tnorm), k + 1 - j) *
               std::pow(static_cast<long double>(lambda), j);
    }
    return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// Power sums and Newton identities

inline Vec power_sums(const Vec& lambda, int k_max) {
    if (k_max < 1) throw UsageError("power_sums: need k_max >= 1");
    Vec p(k_max, 0.0);
    for (double l : lambda) {
        double acc = 1.0;
        for (int k = 0; k < k_max; ++k) {
            acc *= l;
            p[k] += acc;
        }
    }
    return p;
}

/// Elementary symmetric polynomials e_1..e_n from power sums p_1..p_n via
/// k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i.
inline Vec charpoly_from_power_sums(const Vec& p) {
    const int n = static_cast<int>(p.size());
    if (n < 1) throw UsageError("charpoly_from_power_sums: need length >= 1");
    Vec e(n + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        double sign = 1.0;
        for (int i = 1; i <= k; ++i) {
            s += sign * e[k - i] * p[i - 1];
            sign = -sign;
        }
        e[k] = s / k;
    }
    return Vec(e.begin() + 1, e.end());
}

// ---------------------------------------------------------------------------
// The parallel chart f_t

namespace detail {

/// Scalar-generic evaluation of f_t from the base chart's order-2 jets:
/// f_t = C_c(|T|t) xi + S_c(|T|t) |T|^-1 eta_Q + (pi2 + t nu) d/dt.
template <class S>
void eval_parallel(const Chart& base, const Vec& anchor, double t, std::span<const S> u,
                   std::span<S> out) {
    const int n = base.dim(), m = base.ambient_dim();
    const ModelConstant c = base.model();

    std::vector<D2<S>> uj(n), F(m);
    for (int i = 0; i < n; ++i) uj[i] = D2<S>::variable(u[i], i);
    base.eval(uj, F);

    std::vector<S> val(m), xi(m);
    std::vector<std::vector<S>> d1(n, std::vector<S>(m));
    for (int a = 0; a < m; ++a) {
        val[a] = F[a].f;
        for (int i = 0; i < n; ++i) d1[i][a] = F[a].g[i];
    }
    for (int a = 0; a < m; ++a) xi[a] = a + 1 < m ? val[a] : S(0.0);

    std::vector<S> g(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[static_cast<size_t>(i) * n + j] = inner_t<S>(d1[i], d1[j], c);
    std::vector<S> w(n);
    for (int i = 0; i < n; ++i) w[i] = d1[i][m - 1];
    std::vector<S> T = chol_solve_t<S>(n, g, w);
    S tn2 = w[0] * T[0];
    for (int i = 1; i < n; ++i) tn2 = tn2 + w[i] * T[i];
    S tnorm = sqrt(tn2);

    std::vector<S> eta = unoriented_normal<S>(d1, xi, c);
    double sgn = c.real() * leaf_value(eta[0]) * anchor[0];
    for (int a = 1; a < m; ++a) sgn += leaf_value(eta[a]) * anchor[a];
    if (sgn < 0.0)
        for (auto& x : eta) x = -x;
    S nu = eta[m - 1];

    auto [C, Sk] = cs_kernels(tnorm * t, c);
    S scale = Sk / tnorm;
    for (int a = 0; a + 1 < m; ++a) out[a] = C * xi[a] + scale * eta[a];
    out[m - 1] = val[m - 1] + t * nu;
}

} // namespace detail

class ParallelChart final : public Chart {
public:
    ParallelChart(ChartPtr base, double t)
        : Chart(base->dim(), base->model(), base->base_point(), base->domain(),
                base->name() + "@t=" + std::to_string(t)),
          base_(std::move(base)), t_(t), base_anchor_(base_->eta_anchor()) {
        eta_anchor(); // warm this chart's own anchor too
    }

    double offset() const { return t_; }
    const Chart& base() const { return *base_; }

    void eval(std::span<const double> u, std::span<double> out) const override {
        detail::eval_parallel<double>(*base_, base_anchor_, t_, u, out);
    }
    void eval(std::span<const Jet> u, std::span<Jet> out) const override {
        detail::eval_parallel<Jet>(*base_, base_anchor_, t_, u, out);
    }
    void eval(std::span<const JetJet>, std::span<JetJet>) const override {
        throw UsageError("parallel chart: jets of a parallel-of-parallel chart are not supported");
    }

private:
    ChartPtr base_;
    double t_;
    Vec base_anchor_;
};

/// Sorted curvature prediction for f_t from base shape data: the T direction
/// transports as lambda_n/(1 - t lambda_n), every other principal value
/// through the C/S formula. Throws FocalPointError inside the margin.
inline Vec predicted_parallel_spectrum(const ShapeData& sd, double t, double eps_reg = kRegMargin) {
    TPrincipalCheck tp = t_principal_check(sd);
    EigenSym e = jacobi_eigensym(symmetrized_shape_operator(sd));
    Vec out;
    out.push_back(transport_curvature_T(tp.lambda, t, eps_reg));
    bool t_slot_skipped = false;
    for (int i = 0; i < static_cast<int>(e.values.size()); ++i) {
        if (!t_slot_skipped && i == tp.eigen_index) {
            t_slot_skipped = true;
            continue;
        }
        out.push_back(transport_curvature(e.values[i], sd.tnorm, sd.c, t, eps_reg));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Regularity margin of f_t at one base point: the smallest transport
/// denominator magnitude over the spectrum.
inline double parallel_margin(const ShapeData& sd, double t) {
    TPrincipalCheck tp = t_principal_check(sd);
    EigenSym e = jacobi_eigensym(symmetrized_shape_operator(sd));
    auto [C, S] = cs_kernels(sd.tnorm * t, sd.c);
    double margin = std::fabs(1.0 - t * tp.lambda);
    bool t_slot_skipped = false;
    for (int i = 0; i < static_cast<int>(e.values.size()); ++i) {
        if (!t_slot_skipped && i == tp.eigen_index) {
            t_slot_skipped = true;
            continue;
        }
        margin = std::min(margin, std::fabs(C - e.values[i] * S / sd.tnorm));
    }
    return margin;
}

/// The parallel family over a stored t-interval with per-t regularity margins
/// evaluated over a validation grid. The requested interval is clipped to the
/// largest prefix of t-samples (outward from 0) that stays regular.
struct ParallelFamily {
    ChartPtr base;
    double t_min = 0.0, t_max = 0.0;
    std::vector<std::pair<double, double>> margins; // (t, min margin over grid)
    bool clipped = false;
};

inline ParallelFamily make_parallel_family(ChartPtr base, const GridSpec& grid, double t_lo,
                                           double t_hi, int count, double eps_reg = kRegMargin) {
    if (count < 2 || t_hi <= t_lo) throw UsageError("make_parallel_family: bad t range");
    std::vector<ShapeData> sds;
    for (const auto& u : grid.points()) {
        ShapeData sd = shape_data(*base, u);
        if (sd.tnorm < kTnormFloor)
            throw InapplicabilityError("parallel family: |T| vanishes on the grid");
        TPrincipalCheck tp = t_principal_check(sd);
        if (tp.angle > 1e-6)
            throw InapplicabilityError("parallel family: T is not a principal direction");
        sds.push_back(std::move(sd));
    }
    ParallelFamily fam;
    fam.base = std::move(base);

    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(t_lo + (t_hi - t_lo) * i / double(count - 1));
    // walk outward from zero; a focal sample blocks everything beyond it on
    // that side, so the kept interval is contiguous
    std::sort(ts.begin(), ts.end(), [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    bool pos_blocked = false, neg_blocked = false;
    double lo = 0.0, hi = 0.0;
    for (double t : ts) {
        bool& blocked = t >= 0.0 ? pos_blocked : neg_blocked;
        if (blocked) continue;
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& sd : sds) margin = std::min(margin, parallel_margin(sd, t));
        if (margin <= eps_reg) {
            blocked = true;
            fam.clipped = true;
            continue;
        }
        fam.margins.emplace_back(t, margin);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (fam.margins.empty()) throw FocalPointError("parallel family: no regular t sample");
    if (fam.clipped) {
        // keep the largest symmetric interval
        const double tau = std::min(hi, -lo);
        std::erase_if(fam.margins, [&](const auto& m) { return std::fabs(m.first) > tau + 1e-15; });
        if (fam.margins.empty()) throw FocalPointError("parallel family: no regular t sample");
        lo = -tau;
        hi = tau;
    }
    std::sort(fam.margins.begin(), fam.margins.end());
    fam.t_min = lo;
    fam.t_max = hi;
    return fam;
}

/// f_t as a chart. Preconditions (|T| > 0, T principal, positive margins)
/// are validated over a coarse grid; focal violations name the offending
/// curvature and offset.
inline ChartPtr parallel_immersion(ChartPtr base, double t, int validation_per_axis = 2,
                                   double eps_reg = kRegMargin) {
    GridSpec grid = chart_grid(*base, validation_per_axis);
    for (const auto& u : grid.points()) {
        ShapeData sd = shape_data(*base, u);
        if (sd.tnorm < kTnormFloor)
            throw InapplicabilityError("parallel_immersion: |T| vanishes on the domain");
        TPrincipalCheck tp = t_principal_check(sd);
        if (tp.angle > 1e-6)
            throw InapplicabilityError("parallel_immersion: T is not a principal direction");
        if (parallel_margin(sd, t) <= eps_reg) {
            EigenSym e = jacobi_eigensym(symmetrized_shape_operator(sd));
            auto [C, S] = cs_kernels(sd.tnorm * t, sd.c);
            for (double lam : e.values)
                if (std::fabs(C - lam * S / sd.tnorm) <= eps_reg) detail::throw_focal(lam, t);
            detail::throw_focal(tp.lambda, t);
        }
    }
    return std::make_shared<ParallelChart>(std::move(base), t);
}

/// Unit normal of f_t at u from the closed form:
/// eta_t = -c |T| S_c(|T|t) xi + C_c(|T|t) eta_Q + nu d/dt.
inline AmbientVector parallel_normal(const Chart& base, double t, std::span<const double> u) {
    ShapeData sd = shape_data(base, u);
    if (sd.tnorm < kTnormFloor)
        throw InapplicabilityError("parallel_normal: |T| vanishes at this point");
    const int m = base.ambient_dim();
    auto [C, S] = cs_kernels(sd.tnorm * t, sd.c);
    AmbientVector eta_t(m, 0.0);
    for (int a = 0; a < m; ++a) {
        const double eta_q = a + 1 < m ? sd.eta[a] : 0.0;
        eta_t[a] = -sd.c.real() * sd.tnorm * S * sd.xi[a] + C * eta_q;
    }
    eta_t[m - 1] += sd.nu;
    return eta_t;
}

/// Transport formulas against the numeric shape operator of f_t, plus the
/// first-fundamental-form scalars of f_t against their closed forms.
struct TransportComparison {
    double sign = 1.0;              // orientation of the f_t pipeline vs eta_t
    double max_eigen_mismatch = 0.0;
    double max_metric_mismatch = 0.0;
};

inline TransportComparison compare_transport_oracle(ChartPtr base, std::span<const double> u,
                                                    double t, double eps_reg = kRegMargin) {
    ShapeData sd = shape_data(*base, u);
    Vec predicted = predicted_parallel_spectrum(sd, t, eps_reg);

    ParallelChart ft(base, t);
    ShapeData sdt = shape_data(ft, u);
    AmbientVector eta_formula = parallel_normal(*base, t, u);
    const double sign = inner(sdt.eta, eta_formula, sd.c) >= 0.0 ? 1.0 : -1.0;

    EigenSym et = jacobi_eigensym(symmetrized_shape_operator(sdt));
    Vec numeric(et.values.begin(), et.values.end());
    for (auto& v : numeric) v *= sign;
    std::sort(numeric.begin(), numeric.end());

    TransportComparison cmp;
    cmp.sign = sign;
    for (size_t i = 0; i < numeric.size(); ++i)
        cmp.max_eigen_mismatch = std::max(cmp.max_eigen_mismatch, std::fabs(numeric[i] - predicted[i]));

    // <df_t(X_i), df_t(X_i)> against (C - lambda_i |T|^-1 S)^2 resp.
    // (1 - t lambda_n)^2, in the T-adapted principal frame of the base
    AdaptedFrame af = t_adapted_frame(sd);
    auto [C, S] = cs_kernels(sd.tnorm * t, sd.c);
    const int n = base->dim(), m = base->ambient_dim();
    for (int j = 0; j < n; ++j) {
        const Vec& x = af.directions[j];
        Vec v(m, 0.0);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a) v[a] += x[i] * sdt.jet.d1[i][a];
        const double measured = inner(v, v, sd.c);
        double expected;
        if (j == af.t_slot) {
            expected = (1.0 - t * af.values[j]) * (1.0 - t * af.values[j]);
        } else {
            const double den = C - af.values[j] * S / sd.tnorm;
            expected = den * den;
        }
        cmp.max_metric_mismatch = std::max(cmp.max_metric_mismatch, std::fabs(measured - expected));
    }
    return cmp;
}

// ---------------------------------------------------------------------------
// Constant principal curvatures <-> constant |T|

struct CpcVerdict {
    bool trivial_t_zero = false;     // |T| = 0 on the grid: slice branch
    double tnorm_spread = 0.0;
    std::vector<std::pair<double, double>> curvature_spread_per_t;
    double max_curvature_spread = 0.0;
    bool tnorm_constant = false;
    bool curvature_constant = false;
    bool implication_holds = false;
};

/// Checks "constant principal curvatures iff constant |T|" on a grid by
/// transporting the spectrum through regular t samples.
inline CpcVerdict isoparametric_cpc_test(const Chart& chart, const GridSpec& grid,
                                         const std::vector<double>& t_values,
                                         double tol_tnorm = 1e-8, double tol_curv = 1e-7,
                                         double eps_reg = kRegMargin) {
    CpcVerdict v;
    std::vector<ShapeData> sds;
    for (const auto& u : grid.points()) sds.push_back(shape_data(chart, u));

    double tn_lo = 1e300, tn_hi = -1e300, tn_absmax = 0.0;
    for (const auto& sd : sds) {
        tn_lo = std::min(tn_lo, sd.tnorm);
        tn_hi = std::max(tn_hi, sd.tnorm);
        tn_absmax = std::max(tn_absmax, sd.tnorm);
    }
    if (tn_absmax <= kTnormFloor) {
        v.trivial_t_zero = true;
        v.tnorm_constant = true;
        v.curvature_constant = true;
        v.implication_holds = true;
        return v;
    }
    v.tnorm_spread = tn_hi - tn_lo;

    std::vector<double> ts = t_values;
    if (std::find(ts.begin(), ts.end(), 0.0) == ts.end()) ts.insert(ts.begin(), 0.0);
    for (double t : ts) {
        std::vector<Vec> spectra;
        for (const auto& sd : sds) spectra.push_back(predicted_parallel_spectrum(sd, t, eps_reg));
        double spread = 0.0;
        for (size_t i = 0; i < spectra.front().size(); ++i) {
            double lo = 1e300, hi = -1e300;
            for (const auto& sp : spectra) {
                lo = std::min(lo, sp[i]);
                hi = std::max(hi, sp[i]);
            }
            spread = std::max(spread, hi - lo);
        }
        v.curvature_spread_per_t.emplace_back(t, spread);
        v.max_curvature_spread = std::max(v.max_curvature_spread, spread);
    }
    v.tnorm_constant = v.tnorm_spread <= tol_tnorm;
    v.curvature_constant = v.max_curvature_spread <= tol_curv;
    v.implication_holds = v.tnorm_constant == v.curvature_constant;
    return v;
}

} // namespace prodgeo
