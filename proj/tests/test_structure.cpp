#include "prodgeo/structure.hpp"

#include "prodgeo/catalog.hpp"

#include <doctest.h>

using namespace prodgeo;

TEST_CASE("slice: every structure residual vanishes to 1e-10") {
    auto entry = slice_entry(ModelConstant(1), 2, 0.3);
    ResidualReport rep = structure_residuals(*entry.chart, Vec{0.05, -0.04});
    for (const auto& [name, value] : rep.entries) {
        INFO(name);
        CHECK(value <= 1e-10);
    }
}

TEST_CASE("rotational horosphere: Codazzi residual small") {
    auto entry = rotational_horosphere_entry(1.0, 2);
    ResidualReport rep = structure_residuals(*entry.chart, Vec{0.08, 0.1});
    CHECK(rep.at("codazzi") <= 1e-6);
    CHECK(rep.at("nabla_T") <= 1e-8);
    CHECK(rep.at("grad_nu") <= 1e-6);
}

TEST_CASE("generic graphs: Gauss and Codazzi hold as identities") {
    for (const auto& e : generic_graph_entries()) {
        if (e.n > 2) continue; // n = 3 one covered by the acceptance sweep
        ResidualReport rep = structure_residuals(*e.chart, Vec(e.n, 0.06));
        INFO(e.name);
        CHECK(rep.at("gauss") <= 1e-6);
        CHECK(rep.at("codazzi") <= 1e-6);
        CHECK(rep.at("nabla_T") <= 1e-8);
        CHECK(rep.at("normal_xi") <= 1e-12);
        CHECK(rep.at("normal_perp_xi") <= 1e-10);
        CHECK(rep.at("normal_perp_eta") <= 1e-6);
    }
}

TEST_CASE("structure residuals contract over custom probe directions") {
    auto entry = rotational_horosphere_entry(1.0, 2);
    Vec u = {0.08, 0.1};
    // random-ish unit-coefficient probes: residuals stay identity-small
    std::vector<Vec> probes = {{0.6, 0.8}, {-0.8, 0.6}, {1.0, 0.0}};
    ResidualReport rep = structure_residuals(*entry.chart, u, probes);
    CHECK(rep.at("gauss") <= 1e-6);
    CHECK(rep.at("codazzi") <= 1e-6);
    CHECK(rep.at("nabla_T") <= 1e-8);
    // default probes are the coordinate axes: passing them explicitly is a no-op
    ResidualReport def = structure_residuals(*entry.chart, u);
    ResidualReport axes = structure_residuals(*entry.chart, u, {{1.0, 0.0}, {0.0, 1.0}});
    for (const auto& [k, v] : def.entries) CHECK(axes.at(k) == v);
    CHECK_THROWS_AS(structure_residuals(*entry.chart, u, {{1.0, 0.0, 0.0}}), UsageError);
}

TEST_CASE("structure residuals near the boundary raise BoundaryError") {
    auto entry = slice_entry(ModelConstant(1), 2, 0.0);
    const double hi = entry.chart->domain().hi[0];
    CHECK_THROWS_AS(structure_residuals(*entry.chart, Vec{hi - 1e-4, 0.0}), BoundaryError);
}

TEST_CASE("inclusion Weingarten identities") {
    SUBCASE("slice: T = 0 makes the T identity trivial") {
        auto entry = slice_entry(ModelConstant(-1), 3, 0.1);
        ResidualReport rep = inclusion_weingarten_check(*entry.chart, Vec(3, 0.05));
        CHECK(rep.at("weingarten_T") <= 1e-12);
        CHECK(rep.at("weingarten_perp") <= 1e-10);
    }
    SUBCASE("catalog charts satisfy both identities to 1e-8") {
        auto cat = default_catalog();
        for (const auto& name : {"cyl-hsphere-h3", "clifford-s3", "rot-horo-b05-n2", "hyp-prod-h4"}) {
            const auto& e = find_entry(cat, name);
            ResidualReport rep = inclusion_weingarten_check(*e.chart, Vec(e.n, 0.04));
            INFO(name);
            CHECK(rep.at("weingarten_T") <= 1e-8);
            CHECK(rep.at("weingarten_perp") <= 1e-8);
        }
    }
    SUBCASE("a flipped xi sign is flagged with an O(1) residual") {
        auto cat = default_catalog();
        const auto& e = find_entry(cat, "clifford-s3");
        ResidualReport rep = inclusion_weingarten_check(*e.chart, Vec(e.n, 0.04), -1);
        CHECK(rep.at("weingarten_perp") >= 0.5);
    }
}

TEST_CASE("T-principal-direction identities") {
    SUBCASE("cylinder: all four residuals <= 1e-8") {
        auto entry = cylinder_entry(ModelConstant(-1), 3, charts::CylinderBase::Horosphere, 0.0, "horo");
        ResidualReport rep = t_direction_residuals(*entry.chart, Vec(3, 0.06));
        for (const auto& [name, value] : rep.entries) {
            INFO(name);
            CHECK(value <= 1e-8);
        }
    }
    SUBCASE("rotational horosphere: nu gradient residual <= 1e-8") {
        auto entry = rotational_horosphere_entry(1.0, 4);
        ResidualReport rep = t_direction_residuals(*entry.chart, Vec(4, 0.05));
        CHECK(rep.at("nu_gradient") <= 1e-8);
        CHECK(rep.at("tnorm_gradient") <= 1e-8);
        CHECK(rep.at("height_gradient") <= 1e-10);
        CHECK(rep.at("eta_Q_derivative") <= 1e-6);
    }
    SUBCASE("slice is inapplicable: T vanishes") {
        auto entry = slice_entry(ModelConstant(1), 2, 0.0);
        CHECK_THROWS_AS(t_direction_residuals(*entry.chart, Vec(2, 0.03)), InapplicabilityError);
    }
}
