#pragma once

// Charts: parameter -> Q^n_c x R maps evaluable at three scalar levels
// (double, Jet, JetJet). The jet levels give exact first/second derivatives;
// the nested level exists so that derived charts whose definition consumes
// second jets of a base chart (parallel families) still expose exact second
// jets themselves.

#include "prodgeo/ambient.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prodgeo {

struct Box {
    Vec lo, hi;

    bool contains(std::span<const double> u, double margin = 0.0) const {
        for (size_t i = 0; i < lo.size(); ++i)
            if (u[i] < lo[i] + margin || u[i] > hi[i] - margin) return false;
        return true;
    }
};

namespace detail {

/// Unit normal to span{tangents} + span{xi} inside E^{n+2}, in S arithmetic.
/// Branches (candidate choice) are decided on leaf values so the construction
/// stays differentiable at the evaluation point. Returns an unoriented normal;
/// the caller fixes the sign.
template <class S>
std::vector<S> unoriented_normal(std::span<const std::vector<S>> tangents,
                                 std::span<const S> xi, ModelConstant c) {
    const size_t m = xi.size();
    const size_t n = tangents.size();

    // Orthonormalize the tangents (positive definite on the tangent space).
    std::vector<std::vector<S>> t;
    t.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<S> v(tangents[i].begin(), tangents[i].end());
        for (const auto& prev : t) {
            S proj = inner_t<S>(v, prev, c);
            for (size_t a = 0; a < m; ++a) v[a] = v[a] - proj * prev[a];
        }
        S nn = inner_t<S>(v, v, c);
        if (leaf_value(nn) <= 0.0) throw RegularityError("normal solve: degenerate tangent frame");
        S inv = 1.0 / sqrt(nn);
        for (auto& a : v) a = a * inv;
        t.push_back(std::move(v));
    }

    // Pick the coordinate direction with the largest residual after projecting
    // out the tangents and xi; scan at leaf level, then redo the winner in S.
    std::vector<double> xil(m), til(m);
    for (size_t a = 0; a < m; ++a) xil[a] = leaf_value(xi[a]);
    auto residual_norm = [&](size_t k) {
        std::vector<double> r(m, 0.0);
        r[k] = 1.0;
        const double rx = inner(r, xil, c);
        for (size_t a = 0; a < m; ++a) r[a] -= c.real() * rx * xil[a];
        for (const auto& tv : t) {
            for (size_t a = 0; a < m; ++a) til[a] = leaf_value(tv[a]);
            const double pr = inner(r, til, c);
            for (size_t a = 0; a < m; ++a) r[a] -= pr * til[a];
        }
        return inner(r, r, c);
    };
    size_t best = 0;
    double best_norm = residual_norm(0);
    for (size_t k = 1; k < m; ++k) {
        const double nk = residual_norm(k);
        if (nk > best_norm) {
            best_norm = nk;
            best = k;
        }
    }
    if (best_norm <= 1e-20) throw RegularityError("normal solve: no residual direction");

    std::vector<S> r(m, S(0.0));
    r[best] = S(1.0);
    S rx = inner_t<S>(r, xi, c);
    for (size_t a = 0; a < m; ++a) r[a] = r[a] - (c.real() * rx) * xi[a];
    for (const auto& tv : t) {
        S pr = inner_t<S>(r, tv, c);
        for (size_t a = 0; a < m; ++a) r[a] = r[a] - pr * tv[a];
    }
    S nn = inner_t<S>(r, r, c);
    if (leaf_value(nn) <= 0.0) throw RegularityError("normal solve: normal not spacelike");
    S inv = 1.0 / sqrt(nn);
    for (auto& a : r) a = a * inv;
    return r;
}

} // namespace detail

/// Value and exact first/second derivatives of a chart at a parameter point.
struct Jet2 {
    Vec value;                          // n+2
    std::vector<Vec> d1;                // n rows of n+2
    std::vector<std::vector<Vec>> d2;   // n x n of n+2, index-symmetric
};

class Chart {
public:
    virtual ~Chart() = default;

    int dim() const { return n_; }
    int ambient_dim() const { return n_ + 2; }
    ModelConstant model() const { return c_; }
    const Vec& base_point() const { return base_; }
    const Box& domain() const { return domain_; }
    const std::string& name() const { return name_; }

    virtual void eval(std::span<const double> u, std::span<double> out) const = 0;
    virtual void eval(std::span<const Jet> u, std::span<Jet> out) const = 0;
    virtual void eval(std::span<const JetJet> u, std::span<JetJet> out) const = 0;

    void require_inside(std::span<const double> u, double margin = 0.0) const {
        if (static_cast<int>(u.size()) != n_)
            throw UsageError("chart '" + name_ + "': parameter dimension mismatch");
        if (!domain_.contains(u, margin)) {
            if (margin > 0.0) throw BoundaryError("chart '" + name_ + "': stencil leaves the domain");
            throw DomainError("chart '" + name_ + "': parameter outside domain");
        }
    }

    /// Orientation anchor: the unit normal at the base point, sign-fixed so
    /// that nu >= 0 there (tie-break: first non-negligible component > 0).
    /// Per-point normals are aligned against this, which realizes one
    /// continuous orientation over the whole (small) parameter box.
    const Vec& eta_anchor() const {
        if (!anchor_) anchor_ = compute_anchor();
        return *anchor_;
    }

protected:
    Chart(int n, ModelConstant c, Vec base, Box domain, std::string name)
        : n_(n), c_(c), base_(std::move(base)), domain_(std::move(domain)), name_(std::move(name)) {
        if (n_ < 2) throw UsageError("chart: need n >= 2");
        if (n_ > kMaxParams) throw UsageError("chart: parameter count exceeds jet capacity");
    }

private:
    Vec compute_anchor() const {
        const int m = ambient_dim();
        std::vector<Jet> uj(n_), outj(m);
        for (int i = 0; i < n_; ++i) uj[i] = Jet::variable(base_[i], i);
        eval(uj, outj);
        std::vector<std::vector<double>> tang(n_, std::vector<double>(m));
        for (int i = 0; i < n_; ++i)
            for (int a = 0; a < m; ++a) tang[i][a] = outj[a].g[i];
        std::vector<double> xi(m, 0.0);
        for (int a = 0; a + 1 < m; ++a) xi[a] = outj[a].f;
        Vec eta = detail::unoriented_normal<double>(tang, xi, c_);
        double sign = 0.0;
        if (std::fabs(eta[m - 1]) > 1e-12) {
            sign = eta[m - 1] > 0.0 ? 1.0 : -1.0;
        } else {
            for (int a = 0; a < m; ++a)
                if (std::fabs(eta[a]) > 1e-12) {
                    sign = eta[a] > 0.0 ? 1.0 : -1.0;
                    break;
                }
        }
        if (sign == 0.0) throw RegularityError("orientation anchor: normal is numerically zero");
        for (auto& a : eta) a *= sign;
        return eta;
    }

    int n_;
    ModelConstant c_;
    Vec base_;
    Box domain_;
    std::string name_;
    mutable std::optional<Vec> anchor_;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Adapts a scalar-generic functor (span<const T> -> span<T>) to a Chart.
template <class F>
class FunctorChart final : public Chart {
public:
    FunctorChart(int n, ModelConstant c, Vec base, Box domain, std::string name, F f)
        : Chart(n, c, std::move(base), std::move(domain), std::move(name)), f_(std::move(f)) {}

    void eval(std::span<const double> u, std::span<double> out) const override { f_(u, out); }
    void eval(std::span<const Jet> u, std::span<Jet> out) const override { f_(u, out); }
    void eval(std::span<const JetJet> u, std::span<JetJet> out) const override { f_(u, out); }

private:
    F f_;
};

template <class F>
ChartPtr make_chart(int n, ModelConstant c, Vec base, Box domain, std::string name, F f) {
    auto chart = std::make_shared<FunctorChart<F>>(n, c, std::move(base), std::move(domain),
                                                   std::move(name), std::move(f));
    chart->eta_anchor(); // warm the orientation anchor; later reads are const
    return chart;
}

/// Exact order-2 jet of a chart at u; d2 unpacked from the shared triangle
/// slot, so d2[i][j] and d2[j][i] are bit-identical.
inline Jet2 evaluate_jet2(const Chart& chart, std::span<const double> u) {
    chart.require_inside(u);
    const int n = chart.dim(), m = chart.ambient_dim();
    std::vector<Jet> uj(n), outj(m);
    for (int i = 0; i < n; ++i) uj[i] = Jet::variable(u[i], i);
    chart.eval(uj, outj);
    Jet2 jet;
    jet.value.resize(m);
    jet.d1.assign(n, Vec(m));
    jet.d2.assign(n, std::vector<Vec>(n, Vec(m)));
    for (int a = 0; a < m; ++a) {
        jet.value[a] = outj[a].f;
        for (int i = 0; i < n; ++i) jet.d1[i][a] = outj[a].g[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) jet.d2[i][j][a] = outj[a].h[hess_index(i, j)];
    }
    return jet;
}

// ---------------------------------------------------------------------------
// Parameter grids

struct Axis {
    double lo = 0.0, hi = 1.0;
    int count = 2;
};

struct GridSpec {
    std::vector<Axis> axes;

    int total() const {
        int t = 1;
        for (const auto& a : axes) t *= a.count;
        return t;
    }

    std::vector<int> unflatten(int flat) const {
        std::vector<int> idx(axes.size());
        for (int k = static_cast<int>(axes.size()) - 1; k >= 0; --k) {
            idx[k] = flat % axes[k].count;
            flat /= axes[k].count;
        }
        return idx;
    }

    Vec point(const std::vector<int>& idx) const {
        Vec u(axes.size());
        for (size_t k = 0; k < axes.size(); ++k) {
            const auto& a = axes[k];
            u[k] = a.count == 1 ? 0.5 * (a.lo + a.hi)
                                : a.lo + (a.hi - a.lo) * idx[k] / double(a.count - 1);
        }
        return u;
    }

    std::vector<Vec> points() const {
        std::vector<Vec> pts;
        pts.reserve(total());
        for (int f = 0; f < total(); ++f) pts.push_back(point(unflatten(f)));
        return pts;
    }

    /// Boustrophedon traversal: consecutive entries differ by one step along
    /// one axis, so a sequential sign-alignment pass sees only neighbors.
    /// Axis 0 is the slowest; the direction of axis k flips with the parity of
    /// the indices before it.
    std::vector<Vec> serpentine_points() const {
        std::vector<Vec> pts;
        pts.reserve(total());
        std::vector<int> idx(axes.size(), 0);
        for (int f = 0; f < total(); ++f) {
            std::vector<int> raw = unflatten(f);
            std::vector<int> snake(raw.size());
            int parity = 0;
            for (size_t k = 0; k < raw.size(); ++k) {
                snake[k] = parity % 2 == 0 ? raw[k] : axes[k].count - 1 - raw[k];
                parity += snake[k];
            }
            pts.push_back(point(snake));
        }
        return pts;
    }
};

/// Uniform grid over the chart domain, inset so FD stencils stay inside.
inline GridSpec chart_grid(const Chart& chart, int per_axis, double inset = 5e-3) {
    GridSpec g;
    for (int k = 0; k < chart.dim(); ++k) {
        const auto& d = chart.domain();
        g.axes.push_back({d.lo[k] + inset, d.hi[k] - inset, per_axis});
    }
    return g;
}

} // namespace prodgeo
