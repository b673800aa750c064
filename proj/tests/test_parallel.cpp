#include "prodgeo/parallel.hpp"

#include "prodgeo/catalog.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace prodgeo;

TEST_CASE("transport_curvature basics and the horosphere fixed point") {
    CHECK(transport_curvature(0.7, 0.8, ModelConstant(1), 0.0) == doctest::Approx(0.7).epsilon(1e-15));
    // (-sinh t - cosh t)/(cosh t + sinh t) = -1 for every t
    for (double t = -1.5; t <= 1.5; t += 0.25)
        CHECK(transport_curvature(-1.0, 1.0, ModelConstant(-1), t) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("transport_curvature satisfies d lambda/dt = c|T|^2 + lambda^2") {
    const double h = 1e-4;
    for (int c : {1, -1})
        for (double lam : {-0.8, 0.0, 0.6})
            for (double tn : {0.4, 0.9})
                for (double t : {-0.3, 0.0, 0.5}) {
                    const double plus = transport_curvature(lam, tn, ModelConstant(c), t + h);
                    const double minus = transport_curvature(lam, tn, ModelConstant(c), t - h);
                    const double mid = transport_curvature(lam, tn, ModelConstant(c), t);
                    const double fd = (plus - minus) / (2.0 * h);
                    CHECK(std::fabs(fd - (c * tn * tn + mid * mid)) <= 1e-6);
                }
}

TEST_CASE("transport_curvature_T closed form") {
    CHECK(transport_curvature_T(0.0, 2.7) == 0.0);
    CHECK(transport_curvature_T(0.31, 0.0) == doctest::Approx(0.31));
    CHECK(transport_curvature_T(0.5, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(transport_curvature_T(0.5, 2.0), FocalPointError);
}

TEST_CASE("model_parallel_curvature closed forms and ODE property") {
    CHECK(model_parallel_curvature(0.37, ModelConstant(1), 0.0) == doctest::Approx(0.37));
    for (double s = -1.0; s <= 1.0; s += 0.2)
        CHECK(model_parallel_curvature(1.0, ModelConstant(-1), s) == doctest::Approx(1.0).epsilon(1e-12));
    const double quarter_pi = std::atan(1.0);
    CHECK(model_parallel_curvature(0.0, ModelConstant(1), quarter_pi) == doctest::Approx(1.0));
    const double h = 1e-4;
    for (int c : {1, -1})
        for (double lam : {-0.5, 0.2})
            for (double s : {-0.4, 0.3}) {
                const double fd = (model_parallel_curvature(lam, ModelConstant(c), s + h) -
                                   model_parallel_curvature(lam, ModelConstant(c), s - h)) /
                                  (2.0 * h);
                const double mid = model_parallel_curvature(lam, ModelConstant(c), s);
                CHECK(std::fabs(fd - (c + mid * mid)) <= 1e-6);
            }
}

TEST_CASE("derivative coefficients reproduce the first rows") {
    CoefficientTable t1 = derivative_coefficients(1);
    CHECK(t1.at(1, 0) == 1);
    CHECK(t1.at(1, 2) == 1);
    CoefficientTable t2 = derivative_coefficients(2);
    CHECK(t2.at(2, 1) == 2);
    CHECK(t2.at(2, 3) == 2);
    // frozen by differentiating 2c|T|^2 lambda + 2 lambda^3 once more with
    // lambda' = c|T|^2 + lambda^2 and c^2 = 1: 2c^2|T|^4 + 8c|T|^2 lambda^2 + 6 lambda^4
    CoefficientTable t3 = derivative_coefficients(3);
    CHECK(t3.at(3, 0) == 2);
    CHECK(t3.at(3, 2) == 8);
    CHECK(t3.at(3, 4) == 6);
}

TEST_CASE("coefficient table parity and positivity up to order 30") {
    CoefficientTable t = derivative_coefficients(30);
    for (const auto& [kj, value] : t.u) {
        const auto [k, j] = kj;
        CHECK((k % 2 == 1 ? j % 2 == 0 : j % 2 == 1));
        CHECK(j >= 0);
        CHECK(j <= k + 1);
        CHECK(value > 0);
    }
    // top entry of row k is k!
    unsigned __int128 fact = 1;
    for (int k = 1; k <= 30; ++k) fact *= static_cast<unsigned>(k);
    CHECK(t.at(30, 31) == fact);
    CHECK(u128_to_string(t.at(3, 2)) == "8");
}

TEST_CASE("curvature_derivative frozen values") {
    CHECK(curvature_derivative(0.0, 1.0, ModelConstant(1), 1) == doctest::Approx(1.0));
    CHECK(curvature_derivative(1.0, 1.0, ModelConstant(1), 2) == doctest::Approx(4.0));
}

TEST_CASE("curvature_derivative matches finite differences of the transport") {
    // 6th-order-accurate central stencils built from a Vandermonde solve
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dl(-1.2, 1.2), dt(0.25, 0.95);
    for (int sample = 0; sample < 25; ++sample) {
        const ModelConstant c(sample % 2 == 0 ? 1 : -1);
        double lam = 0.0, tn = 0.0;
        while (true) {
            lam = dl(rng);
            tn = dt(rng);
            bool regular = true;
            try {
                for (double t = -1.2; t <= 1.2; t += 0.05) (void)transport_curvature(lam, tn, c, t, 1e-2);
            } catch (const FocalPointError&) {
                regular = false;
            }
            if (regular) break;
        }
        for (int k = 1; k <= 4; ++k) {
            const int mhalf = k / 2 + 3;
            const int pts = 2 * mhalf + 1;
            Mat vand(pts, pts);
            for (int p = 0; p < pts; ++p)
                for (int q = 0; q < pts; ++q) vand(p, q) = std::pow(q - mhalf, p);
            Vec rhs(pts, 0.0);
            double kfact = 1.0;
            for (int i = 2; i <= k; ++i) kfact *= i;
            rhs[k] = kfact;
            Vec coeff = lu_solve(vand, rhs);
            const double h = 0.04;
            double fd = 0.0;
            for (int q = 0; q < pts; ++q)
                fd += coeff[q] * transport_curvature(lam, tn, c, (q - mhalf) * h);
            fd /= std::pow(h, k);
            const double exact = curvature_derivative(lam, tn, c, k);
            CHECK(std::fabs(fd - exact) <= 1e-4 * std::max(1.0, std::fabs(exact)));
        }
    }
}

TEST_CASE("power sums") {
    Vec zero = power_sums(Vec(4, 0.0), 5);
    for (double p : zero) CHECK(p == 0.0);
    Vec p = power_sums({1.0, 2.0}, 2);
    CHECK(p[0] == doctest::Approx(3.0));
    CHECK(p[1] == doctest::Approx(5.0));
    // repeated-multiplication oracle on random input
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    Vec lam(5);
    for (auto& l : lam) l = d(rng);
    Vec ps = power_sums(lam, 6);
    for (int k = 1; k <= 6; ++k) {
        double s = 0.0;
        for (double l : lam) s += std::pow(l, k);
        CHECK(ps[k - 1] == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("Newton identities recover elementary symmetric polynomials") {
    Vec e = charpoly_from_power_sums({3.0, 5.0});
    CHECK(e[0] == doctest::Approx(3.0)); // roots {1, 2}: e1 = 3
    CHECK(e[1] == doctest::Approx(2.0)); // e2 = 2
    Vec ez = charpoly_from_power_sums(Vec(4, 0.0));
    for (double v : ez) CHECK(v == 0.0);

    // brute-force expansion oracle: coefficients of prod (x - lambda_i)
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + rep % 5;
        Vec lam(n);
        for (auto& l : lam) l = d(rng);
        Vec poly = {1.0}; // expand by repeated multiplication
        for (double l : lam) {
            Vec next(poly.size() + 1, 0.0);
            for (size_t i = 0; i < poly.size(); ++i) {
                next[i] += poly[i];
                next[i + 1] -= poly[i] * l;
            }
            poly = next;
        }
        Vec e2 = charpoly_from_power_sums(power_sums(lam, n));
        for (int k = 1; k <= n; ++k) {
            const double expected = (k % 2 == 1 ? -1.0 : 1.0) * poly[k];
            CHECK(e2[k - 1] == doctest::Approx(expected).epsilon(1e-9).scale(std::pow(5.0, k)));
        }
        // each original lambda is a root of x^n - e1 x^{n-1} + ...
        for (double l : lam) {
            double val = 1.0;
            for (int k = 1; k <= n; ++k) val = val * l; // x^n
            val = std::pow(l, n);
            double sign = -1.0;
            for (int k = 1; k <= n; ++k) {
                val += sign * e2[k - 1] * std::pow(l, n - k);
                sign = -sign;
            }
            CHECK(std::fabs(val) <= 1e-8 * std::max(1.0, std::pow(std::fabs(l) + 1.0, n)));
        }
    }
}

TEST_CASE("parallel chart at t = 0 is the base chart") {
    auto cat = default_catalog();
    const auto& e = find_entry(cat, "rot-horo-b1-n2");
    ChartPtr f0 = parallel_immersion(e.chart, 0.0);
    Vec u = {0.12, -0.05};
    Vec a(e.n + 2), b(e.n + 2);
    e.chart->eval(u, a);
    f0->eval(u, b);
    for (int i = 0; i < e.n + 2; ++i) CHECK(std::fabs(a[i] - b[i]) <= 1e-14);
}

TEST_CASE("parallel of a horosphere cylinder stays on the model") {
    auto entry = cylinder_entry(ModelConstant(-1), 2, charts::CylinderBase::Horosphere, 0.0, "horo");
    ChartPtr ft = parallel_immersion(entry.chart, 1.0);
    GridSpec grid = chart_grid(*ft, 3);
    for (const auto& u : grid.points()) {
        Vec out(entry.n + 2);
        ft->eval(u, out);
        CHECK(model_residual(out, entry.c) <= 1e-10);
    }
    // transported curvatures of the horosphere family stay at +-1
    ShapeData sd = shape_data(*entry.chart, Vec(entry.n, 0.05));
    Vec spec = predicted_parallel_spectrum(sd, 1.0);
    std::sort(spec.begin(), spec.end());
    CHECK(std::fabs(spec.front() * spec.front() - 1.0) * std::fabs(spec.front()) <= 1e-9); // +-1 survives
}

TEST_CASE("rotational horosphere stays regular far out: lambda_n = 0") {
    auto cat = default_catalog();
    const auto& e = find_entry(cat, "rot-horo-b1-n4");
    CHECK_NOTHROW(parallel_immersion(e.chart, 3.0));
    ShapeData sd = shape_data(*e.chart, Vec(e.n, 0.04));
    CHECK(parallel_margin(sd, 3.0) > kRegMargin);
}

TEST_CASE("focal values raise FocalPointError naming the curvature") {
    // geodesic-sphere cylinder in S^3 x R with cot(r) = 1: denominator
    // cos t - sin t vanishes at t = pi/4
    auto entry = cylinder_entry(ModelConstant(1), 3, charts::CylinderBase::GeodesicSphere,
                                std::atan(1.0), "sphere");
    CHECK_THROWS_AS(parallel_immersion(entry.chart, std::atan(1.0)), FocalPointError);
}

TEST_CASE("parallel_normal is unit and orthogonal to df_t") {
    auto cat = default_catalog();
    for (const auto& name : {"cyl-horo-h2", "rot-horo-b05-n2", "clifford-s3"}) {
        const auto& e = find_entry(cat, name);
        const double t = 0.4;
        ChartPtr ft = parallel_immersion(e.chart, t);
        Vec u(e.n, 0.06);
        AmbientVector eta_t = parallel_normal(*e.chart, t, u);
        INFO(name);
        CHECK(std::fabs(inner(eta_t, eta_t, e.c) - 1.0) <= 1e-10);
        Jet2 jt = evaluate_jet2(*ft, u);
        for (int i = 0; i < e.n; ++i) CHECK(std::fabs(inner(eta_t, jt.d1[i], e.c)) <= 1e-8);
        // t = 0 gives back eta
        AmbientVector eta0 = parallel_normal(*e.chart, 0.0, u);
        ShapeData sd = shape_data(*e.chart, u);
        for (int a = 0; a < e.n + 2; ++a) CHECK(eta0[a] == doctest::Approx(sd.eta[a]).epsilon(1e-14));
    }
}

TEST_CASE("numeric shape operator of f_t matches the transported spectrum") {
    auto cat = default_catalog();
    for (const auto& name : {"cyl-horo-h2", "cyl-hsphere-h3", "rot-horo-b1-n2", "clifford-s3"}) {
        const auto& e = find_entry(cat, name);
        for (double t : {-0.3, 0.2, 0.5}) {
            TransportComparison cmp = compare_transport_oracle(e.chart, Vec(e.n, 0.05), t);
            INFO(name << " t=" << t);
            CHECK(cmp.max_eigen_mismatch <= 1e-5);
            CHECK(cmp.max_metric_mismatch <= 1e-8);
        }
    }
}

TEST_CASE("T-direction transport cross-validates where lambda_n is nonzero") {
    // the cubic-profile rotational chart has T principal with a nonvanishing
    // T-curvature (mu_T = a''/b^3), so lambda_n/(1 - t lambda_n) is exercised
    // away from its fixed point, as is the (1 - t lambda_n)^2 metric scalar
    auto entry = rotational_cubic_entry(3);
    Vec u = {0.05, -0.04, 0.2};
    ShapeData sd = shape_data(*entry.chart, u);
    TPrincipalCheck tp = t_principal_check(sd);
    REQUIRE(std::fabs(tp.lambda) > 0.05); // genuinely nonzero here
    for (double t : {-0.3, 0.25}) {
        TransportComparison cmp = compare_transport_oracle(entry.chart, u, t);
        CHECK(cmp.max_eigen_mismatch <= 1e-6);
        CHECK(cmp.max_metric_mismatch <= 1e-8);
    }
}

TEST_CASE("transported lambda_n stays 0 when nu is constant and T nonzero") {
    auto cat = default_catalog();
    const auto& e = find_entry(cat, "rot-horo-b2-n4");
    ShapeData sd = shape_data(*e.chart, Vec(e.n, 0.07));
    TPrincipalCheck tp = t_principal_check(sd);
    CHECK(std::fabs(tp.lambda) <= 1e-9);
    for (double t : {-1.0, 0.5, 2.0}) CHECK(transport_curvature_T(tp.lambda, t) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("cpc test: positive, negative and trivial branches") {
    auto cat = default_catalog();
    const std::vector<double> ts = {-0.4, -0.2, 0.2, 0.4};

    const auto& pos = find_entry(cat, "rot-horo-b1-n2");
    CpcVerdict vp = isoparametric_cpc_test(*pos.chart, entry_grid(pos, 4), ts);
    CHECK(vp.tnorm_spread <= 1e-8);
    CHECK(vp.max_curvature_spread <= 1e-7);
    CHECK(vp.implication_holds);

    const auto& neg = find_entry(cat, "rot-cubic-h3");
    CpcVerdict vn = isoparametric_cpc_test(*neg.chart, entry_grid(neg, 3), ts);
    CHECK(vn.tnorm_spread > 1e-3);
    CHECK(vn.max_curvature_spread > 1e-3);
    CHECK(vn.implication_holds);

    const auto& triv = find_entry(cat, "slice-s2");
    CpcVerdict vt = isoparametric_cpc_test(*triv.chart, entry_grid(triv, 3), ts);
    CHECK(vt.trivial_t_zero);
}

TEST_CASE("second jets of a parallel-of-parallel chart are rejected") {
    auto cat = default_catalog();
    const auto& e = find_entry(cat, "rot-horo-b1-n2");
    ChartPtr first = parallel_immersion(e.chart, 0.2);
    CHECK_THROWS_AS(std::make_shared<ParallelChart>(first, 0.1), UsageError);
}

TEST_CASE("parallel family reports margins and clips at focal values") {
    auto entry = cylinder_entry(ModelConstant(1), 2, charts::CylinderBase::GeodesicSphere,
                                std::atan(1.0), "circle");
    GridSpec grid = entry_grid(entry, 3);
    // |cot(pi/4)| = 1 focuses at |t| = pi/4 (side depends on the orientation
    // sign); sample count chosen so a sample lands on +-pi/4 exactly
    const double half_pi = 2.0 * std::atan(1.0);
    ParallelFamily fam = make_parallel_family(entry.chart, grid, -half_pi, half_pi, 9);
    CHECK(fam.clipped);
    CHECK(fam.t_max < 0.786);
    CHECK(fam.t_min > -0.786);
    CHECK(fam.t_max == doctest::Approx(-fam.t_min)); // symmetric after the clip
    for (const auto& [t, margin] : fam.margins) CHECK(margin > kRegMargin);
    auto slice = slice_entry(ModelConstant(1), 2, 0.0);
    CHECK_THROWS_AS(make_parallel_family(slice.chart, entry_grid(slice, 2), -0.5, 0.5, 5),
                    InapplicabilityError);
}
