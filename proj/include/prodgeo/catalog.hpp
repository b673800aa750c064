#pragma once

// Constructors for the classified constant-principal-curvature hypersurfaces
// of Q^n_c x R, each bundled with its expected invariants: slices, cylinders
// over isoparametric bases, doubly-warped sphere/hyperbolic products, and the
// rotational family built over parallel horospheres.
//
// Coordinate conventions: ambient slots x1..x_{n+1} carry the Q factor (x1 is
// the c-weighted slot), x_{n+2} carries the R factor. Hyperbolic charts stay
// on the x1 > 0 sheet. Sphere factors are parametrized graph-style around a
// base offset, which keeps every chart polynomial/trig/sqrt so jets are exact.

#include "prodgeo/ambient.hpp"
#include "prodgeo/chart.hpp"
#include "prodgeo/eigenframe.hpp"
#include "prodgeo/errors.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace prodgeo {

enum class NuBehavior { Zero, PlusMinusOne, Constant, Varying };

struct ExpectedCurvature {
    std::optional<double> value; // nullopt: value known only numerically
    int multiplicity = 1;
};

struct CatalogEntry {
    std::string name;
    ChartPtr chart;
    ModelConstant c{1};
    int n = 2;
    int expected_g = 0;                         // 0: no expectation
    std::vector<ExpectedCurvature> curvatures;  // compared as a set up to one global sign
    NuBehavior nu = NuBehavior::Zero;
    bool t_vanishes = false;
    bool t_principal = false;
    bool cpc = true;                  // constant principal curvatures expected
    bool product_relation = false;    // nonzero curvature families satisfy mu*gamma = 1

    void validate() const {
        int total = 0;
        for (const auto& ec : curvatures) total += ec.multiplicity;
        if (!curvatures.empty() && total != n)
            throw UsageError("catalog entry '" + name + "': multiplicities must sum to n");
    }
};

namespace charts {

/// Open subset of the slice Q^n_c x {t0}.
inline ChartPtr slice(ModelConstant c, int n, double t0) {
    Vec y0(n);
    for (int k = 0; k < n; ++k) y0[k] = 0.08 + 0.04 * k;
    Box box{Vec(n, -0.22), Vec(n, 0.22)};
    const double cr = c.real();
    auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
        T s2(0.0);
        for (int k = 0; k < n; ++k) {
            T y = u[k] + y0[k];
            out[1 + k] = y;
            s2 += y * y;
        }
        out[0] = sqrt(1.0 - cr * s2);
        out[n + 1] = T(t0);
    };
    return make_chart(n, c, Vec(n, 0.0), box, "slice", f);
}

enum class CylinderBase { GeodesicSphere, Hypersphere, Horosphere, Equidistant, TotallyGeodesic };

/// Riemannian product M^{n-1} x R where M^{n-1} is an isoparametric
/// hypersurface of Q^n_c. `param` is the radius r for spheres, or the
/// height shift d (= sinh of the distance) for equidistants.
inline ChartPtr cylinder(ModelConstant c, int n, CylinderBase base, double param = 0.0) {
    const int nb = n - 1; // base parameters; the last parameter is the R height
    if (nb < 1) throw UsageError("cylinder: need n >= 2");
    Vec z0(nb);
    for (int k = 0; k < nb; ++k) z0[k] = 0.07 + 0.05 * k;
    Box box{Vec(n, -0.22), Vec(n, 0.22)};

    if (c.value() == 1) {
        double r = base == CylinderBase::TotallyGeodesic ? std::acos(0.0) : param;
        if (base != CylinderBase::GeodesicSphere && base != CylinderBase::TotallyGeodesic)
            throw UsageError("cylinder: base not available in S^n");
        if (r <= 0.0 || r > std::acos(0.0) + 1e-12)
            throw UsageError("cylinder: geodesic sphere radius outside (0, pi/2]");
        const double cr = std::cos(r), sr = std::sin(r);
        auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
            T s2(0.0);
            for (int k = 0; k < nb; ++k) {
                T z = u[k] + z0[k];
                out[2 + k] = sr * z;
                s2 += z * z;
            }
            out[0] = T(cr);
            out[1] = sr * sqrt(1.0 - s2);
            out[n + 1] = u[nb];
        };
        return make_chart(n, c, Vec(n, 0.0), box, "cylinder-sphere", f);
    }

    switch (base) {
    case CylinderBase::Hypersphere: {
        const double r = param;
        if (r <= 0.0) throw UsageError("cylinder: hypersphere radius must be positive");
        const double ch = std::cosh(r), sh = std::sinh(r);
        auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
            T s2(0.0);
            for (int k = 0; k < nb; ++k) {
                T z = u[k] + z0[k];
                out[2 + k] = sh * z;
                s2 += z * z;
            }
            out[0] = T(ch);
            out[1] = sh * sqrt(1.0 - s2);
            out[n + 1] = u[nb];
        };
        return make_chart(n, c, Vec(n, 0.0), box, "cylinder-hypersphere", f);
    }
    case CylinderBase::Horosphere: {
        auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
            T q(0.0);
            for (int k = 0; k < nb; ++k) {
                T z = u[k] + z0[k];
                out[2 + k] = z;
                q += 0.5 * (z * z);
            }
            out[0] = q + 1.0;
            out[1] = q;
            out[n + 1] = u[nb];
        };
        return make_chart(n, c, Vec(n, 0.0), box, "cylinder-horosphere", f);
    }
    case CylinderBase::Equidistant:
    case CylinderBase::TotallyGeodesic: {
        const double d = base == CylinderBase::TotallyGeodesic ? 0.0 : param;
        const double rho = std::sqrt(1.0 + d * d);
        auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
            T s2(0.0);
            for (int k = 0; k < nb; ++k) {
                T y = u[k] + z0[k];
                out[1 + k] = rho * y;
                s2 += y * y;
            }
            out[0] = rho * sqrt(1.0 + s2);
            out[n] = T(d);
            out[n + 1] = u[nb];
        };
        return make_chart(n, c, Vec(n, 0.0), box, "cylinder-equidistant", f);
    }
    default:
        throw UsageError("cylinder: base not available in H^n");
    }
}

/// S^p(r) x S^q(s) x R inside S^{p+q+1} x R, r^2 + s^2 = 1.
inline ChartPtr clifford_product(int p, int q, double r, double s) {
    if (p < 1 || q < 1) throw UsageError("clifford_product: need p, q >= 1");
    if (std::fabs(r * r + s * s - 1.0) > 1e-12 || r <= 0.0 || s <= 0.0 || r >= 1.0 || s >= 1.0)
        throw UsageError("clifford_product: need r, s in (0,1) with r^2 + s^2 = 1");
    const int n = p + q + 1;
    Vec z0(n - 1);
    for (int k = 0; k < n - 1; ++k) z0[k] = 0.06 + 0.05 * k;
    Box box{Vec(n, -0.2), Vec(n, 0.2)};
    auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
        T sp2(0.0);
        for (int k = 0; k < p; ++k) {
            T z = u[k] + z0[k];
            out[1 + k] = r * z;
            sp2 += z * z;
        }
        out[0] = r * sqrt(1.0 - sp2);
        T sq2(0.0);
        for (int k = 0; k < q; ++k) {
            T z = u[p + k] + z0[p + k];
            out[p + 2 + k] = s * z;
            sq2 += z * z;
        }
        out[p + 1] = s * sqrt(1.0 - sq2);
        out[n + 1] = u[n - 1];
    };
    return make_chart(n, ModelConstant(1), Vec(n, 0.0), box, "clifford-product", f);
}

/// S^k(r) x H^{n-k-1}(rho) x R inside H^n x R, rho = sqrt(1 + r^2).
inline ChartPtr hyperbolic_product(int k, int n, double r) {
    if (k < 1 || k > n - 2) throw UsageError("hyperbolic_product: need 1 <= k <= n-2");
    if (r <= 0.0) throw UsageError("hyperbolic_product: sphere radius must be positive");
    const double rho = std::sqrt(1.0 + r * r);
    const int nh = n - k - 1; // hyperbolic factor parameters
    Vec z0(n - 1);
    for (int i = 0; i < n - 1; ++i) z0[i] = 0.05 + 0.05 * i;
    Box box{Vec(n, -0.2), Vec(n, 0.2)};
    auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
        T sh2(0.0);
        for (int i = 0; i < nh; ++i) {
            T y = u[i] + z0[i];
            out[1 + i] = rho * y;
            sh2 += y * y;
        }
        out[0] = rho * sqrt(1.0 + sh2);
        T sk2(0.0);
        for (int i = 0; i < k; ++i) {
            T z = u[nh + i] + z0[nh + i];
            out[nh + 2 + i] = r * z;
            sk2 += z * z;
        }
        out[nh + 1] = r * sqrt(1.0 - sk2);
        out[n + 1] = u[n - 1];
    };
    return make_chart(n, ModelConstant(-1), Vec(n, 0.0), box, "hyperbolic-product", f);
}

/// Family of parallel horospheres in H^n swept with height profile a(s):
/// F(z, s) = (h_s(z), a(s)) where h_s is the horosphere at signed distance s
/// from the base horosphere, in the paraboloid parametrization of the
/// hyperboloid model. The profile functor must be scalar-generic.
template <class ProfileFn>
ChartPtr rotational_family(int n, std::string name, ProfileFn a, Box box) {
    const int nz = n - 1;
    auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
        T q(0.0);
        for (int k = 0; k < nz; ++k) {
            T z = u[k];
            out[2 + k] = z;
            q += 0.5 * (z * z);
        }
        const T s = u[nz];
        T decay = exp(-s) * q;
        out[0] = cosh(s) + decay;
        out[1] = decay - sinh(s);
        out[n + 1] = a(s);
    };
    return make_chart(n, ModelConstant(-1), Vec(n, 0.0), std::move(box), std::move(name), f);
}

/// The constant-angle rotational hypersurface over horospheres: a(s) = B s.
inline ChartPtr rotational_horosphere(double B, int n) {
    if (B <= 0.0) throw UsageError("rotational_horosphere: need B > 0");
    if (n < 2) throw UsageError("rotational_horosphere: need n >= 2");
    Box box{Vec(n, -0.3), Vec(n, 0.3)};
    return rotational_family(
        n, "rotational-horosphere", [B]<class T>(const T& s) { return B * s; }, box);
}

/// Non-affine profile a(s) = s + 0.2 s^3; same horosphere orbits, but the
/// angle function varies, so the curvatures cannot all be constant.
inline ChartPtr rotational_cubic(int n) {
    Box box{Vec(n, -0.3), Vec(n, 0.3)};
    return rotational_family(
        n, "rotational-cubic", []<class T>(const T& s) { return s + 0.2 * (s * s * s); }, box);
}

/// Generic graphs over Q^n_c (nothing special expected beyond the structure
/// equations that every hypersurface satisfies).
inline ChartPtr generic_graph(ModelConstant c, int n, int variant) {
    Vec y0(n);
    for (int k = 0; k < n; ++k) y0[k] = 0.1 + 0.05 * k;
    Box box{Vec(n, -0.2), Vec(n, 0.2)};
    const double cr = c.real();
    auto f = [=]<class T>(std::span<const T> u, std::span<T> out) {
        T s2(0.0);
        for (int k = 0; k < n; ++k) {
            T y = u[k] + y0[k];
            out[1 + k] = y;
            s2 += y * y;
        }
        out[0] = sqrt(1.0 - cr * s2);
        T y1 = u[0] + y0[0];
        T y2 = u[1] + y0[1];
        switch (variant) {
        case 0:
            out[n + 1] = 0.3 * sin(y1) + 0.2 * (y2 * y2) - 0.1 * (y1 * y2);
            break;
        case 1:
            out[n + 1] = 0.25 * (y1 * y2) + 0.15 * sin(y1 + y2);
            break;
        default: {
            T y3 = n >= 3 ? u[2] + y0[2] : y2;
            out[n + 1] = 0.2 * y1 + 0.1 * (y2 * y3) + 0.15 * sin(y2);
            break;
        }
        }
    };
    return make_chart(n, c, Vec(n, 0.0), box, "generic-graph", f);
}

} // namespace charts

// ---------------------------------------------------------------------------
// Entry constructors with expected invariants

inline CatalogEntry slice_entry(ModelConstant c, int n, double t0) {
    CatalogEntry e;
    e.name = std::string("slice-") + (c.value() == 1 ? "s" : "h") + std::to_string(n);
    e.chart = charts::slice(c, n, t0);
    e.c = c;
    e.n = n;
    e.expected_g = 1;
    e.curvatures = {{0.0, n}};
    e.nu = NuBehavior::PlusMinusOne;
    e.t_vanishes = true;
    e.validate();
    return e;
}

inline CatalogEntry cylinder_entry(ModelConstant c, int n, charts::CylinderBase base, double param,
                                   const std::string& tag) {
    CatalogEntry e;
    e.name = "cyl-" + tag + "-" + (c.value() == 1 ? "s" : "h") + std::to_string(n);
    e.chart = charts::cylinder(c, n, base, param);
    e.c = c;
    e.n = n;
    e.nu = NuBehavior::Zero;
    e.t_principal = true;
    using CB = charts::CylinderBase;
    const bool geodesic = base == CB::TotallyGeodesic ||
                          (base == CB::GeodesicSphere && std::fabs(param - std::acos(0.0)) < 1e-12);
    if (geodesic) {
        e.expected_g = 1;
        e.curvatures = {{0.0, n}};
    } else if (base == CB::Horosphere) {
        e.expected_g = 2;
        e.curvatures = {{1.0, n - 1}, {0.0, 1}}; // the nonzero family squares to 1
    } else {
        e.expected_g = 2;
        e.curvatures = {{std::nullopt, n - 1}, {0.0, 1}};
    }
    e.validate();
    return e;
}

inline CatalogEntry clifford_entry(int p, int q, double r, double s) {
    CatalogEntry e;
    e.name = "clifford-s" + std::to_string(p + q + 1);
    e.chart = charts::clifford_product(p, q, r, s);
    e.c = ModelConstant(1);
    e.n = p + q + 1;
    e.expected_g = 3;
    e.curvatures = {{std::nullopt, p}, {std::nullopt, q}, {0.0, 1}};
    e.nu = NuBehavior::Zero;
    e.t_principal = true;
    e.validate();
    return e;
}

inline CatalogEntry hyperbolic_product_entry(int k, int n, double r) {
    CatalogEntry e;
    e.name = "hyp-prod-h" + std::to_string(n);
    e.chart = charts::hyperbolic_product(k, n, r);
    e.c = ModelConstant(-1);
    e.n = n;
    e.expected_g = 3;
    e.curvatures = {{std::nullopt, k}, {std::nullopt, n - k - 1}, {0.0, 1}};
    e.nu = NuBehavior::Zero;
    e.t_principal = true;
    e.product_relation = true;
    e.validate();
    return e;
}

inline CatalogEntry rotational_horosphere_entry(double B, int n) {
    CatalogEntry e;
    std::string btag = B == 0.5 ? "b05" : (B == 1.0 ? "b1" : (B == 2.0 ? "b2" : "b"));
    e.name = "rot-horo-" + btag + "-n" + std::to_string(n);
    e.chart = charts::rotational_horosphere(B, n);
    e.c = ModelConstant(-1);
    e.n = n;
    e.expected_g = 2;
    e.curvatures = {{B / std::sqrt(1.0 + B * B), n - 1}, {0.0, 1}};
    e.nu = NuBehavior::Constant;
    e.t_principal = true;
    e.validate();
    return e;
}

inline CatalogEntry rotational_cubic_entry(int n) {
    CatalogEntry e;
    e.name = "rot-cubic-h" + std::to_string(n);
    e.chart = charts::rotational_cubic(n);
    e.c = ModelConstant(-1);
    e.n = n;
    e.expected_g = 0;
    e.nu = NuBehavior::Varying;
    e.t_principal = true;
    e.cpc = false;
    return e;
}

inline std::vector<CatalogEntry> default_catalog() {
    using CB = charts::CylinderBase;
    const double quarter_pi = std::atan(1.0);
    std::vector<CatalogEntry> cat;
    cat.push_back(slice_entry(ModelConstant(1), 2, 0.3));
    cat.push_back(slice_entry(ModelConstant(-1), 3, -0.2));
    cat.push_back(cylinder_entry(ModelConstant(1), 2, CB::GeodesicSphere, quarter_pi, "circle"));
    cat.push_back(cylinder_entry(ModelConstant(1), 3, CB::GeodesicSphere, quarter_pi, "sphere"));
    cat.push_back(cylinder_entry(ModelConstant(1), 3, CB::TotallyGeodesic, 0.0, "tg"));
    cat.push_back(cylinder_entry(ModelConstant(-1), 2, CB::Horosphere, 0.0, "horo"));
    cat.push_back(cylinder_entry(ModelConstant(-1), 3, CB::Horosphere, 0.0, "horo"));
    cat.push_back(cylinder_entry(ModelConstant(-1), 3, CB::Hypersphere, 0.8, "hsphere"));
    cat.push_back(cylinder_entry(ModelConstant(-1), 3, CB::Equidistant, 0.6, "equi"));
    cat.push_back(cylinder_entry(ModelConstant(-1), 3, CB::TotallyGeodesic, 0.0, "tg"));
    cat.push_back(clifford_entry(1, 1, std::sqrt(0.5), std::sqrt(0.5)));
    cat.push_back(clifford_entry(2, 1, 0.8, 0.6));
    cat.push_back(hyperbolic_product_entry(1, 4, 1.0));
    cat.push_back(hyperbolic_product_entry(2, 5, 1.0));
    for (double B : {0.5, 1.0, 2.0})
        for (int n : {2, 4, 5}) cat.push_back(rotational_horosphere_entry(B, n));
    cat.push_back(rotational_cubic_entry(3));
    return cat;
}

inline std::vector<CatalogEntry> generic_graph_entries() {
    std::vector<CatalogEntry> v;
    CatalogEntry a;
    a.name = "graph-s2-a";
    a.chart = charts::generic_graph(ModelConstant(1), 2, 0);
    a.c = ModelConstant(1);
    a.n = 2;
    a.cpc = false;
    a.nu = NuBehavior::Varying;
    CatalogEntry b;
    b.name = "graph-h2-b";
    b.chart = charts::generic_graph(ModelConstant(-1), 2, 1);
    b.c = ModelConstant(-1);
    b.n = 2;
    b.cpc = false;
    b.nu = NuBehavior::Varying;
    CatalogEntry c;
    c.name = "graph-s3-c";
    c.chart = charts::generic_graph(ModelConstant(1), 3, 2);
    c.c = ModelConstant(1);
    c.n = 3;
    c.cpc = false;
    c.nu = NuBehavior::Varying;
    return {a, b, c};
}

inline const CatalogEntry& find_entry(const std::vector<CatalogEntry>& cat, const std::string& name) {
    for (const auto& e : cat)
        if (e.name == name) return e;
    throw UsageError("unknown catalog entry '" + name + "'");
}

/// Default per-axis grid counts sized to keep n = 4, 5 sweeps at desk scale.
inline int default_grid_count(int n) { return n <= 2 ? 5 : (n == 3 ? 4 : 3); }

inline GridSpec entry_grid(const CatalogEntry& e, int per_axis = 0) {
    return chart_grid(*e.chart, per_axis > 0 ? per_axis : default_grid_count(e.n));
}

// ---------------------------------------------------------------------------
// Expected-spectrum matching (set comparison up to one global sign)

struct SpectrumMatch {
    bool ok = false;
    double sign = 1.0;
    double worst = 0.0;
    std::string detail;
};

/// Matches measured clusters against the expected curvature set; exact
/// expectations must agree within tol after one global sign flip, numeric
/// expectations only pin multiplicities.
inline SpectrumMatch match_expected_spectrum(const CatalogEntry& entry, const EigenStructure& measured,
                                             double tol) {
    SpectrumMatch best;
    best.detail = "cluster structure mismatch";
    if (entry.curvatures.empty()) {
        best.ok = true;
        best.detail = "no expectation";
        return best;
    }
    if (measured.groups() != static_cast<int>(entry.curvatures.size())) return best;

    for (double sign : {1.0, -1.0}) {
        std::vector<bool> used(measured.groups(), false);
        double worst = 0.0;
        bool ok = true;
        // exact values first, then numeric wildcards by multiplicity
        for (const auto& ec : entry.curvatures) {
            if (!ec.value) continue;
            int pick = -1;
            double err = 0.0;
            for (int i = 0; i < measured.groups(); ++i) {
                if (used[i] || measured.multiplicities[i] != ec.multiplicity) continue;
                const double d = std::fabs(measured.values[i] - sign * *ec.value);
                if (pick < 0 || d < err) {
                    pick = i;
                    err = d;
                }
            }
            if (pick < 0 || err > tol) {
                ok = false;
                break;
            }
            used[pick] = true;
            worst = std::max(worst, err);
        }
        if (ok) {
            for (const auto& ec : entry.curvatures) {
                if (ec.value) continue;
                int pick = -1;
                for (int i = 0; i < measured.groups(); ++i)
                    if (!used[i] && measured.multiplicities[i] == ec.multiplicity) {
                        pick = i;
                        break;
                    }
                if (pick < 0) {
                    ok = false;
                    break;
                }
                used[pick] = true;
            }
        }
        if (ok) {
            SpectrumMatch m;
            m.ok = true;
            m.sign = sign;
            m.worst = worst;
            m.detail = "matched";
            if (!best.ok || m.worst < best.worst) best = m;
        }
    }
    return best;
}

} // namespace prodgeo
