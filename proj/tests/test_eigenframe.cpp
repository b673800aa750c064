#include "prodgeo/eigenframe.hpp"

#include "prodgeo/catalog.hpp"
#include "prodgeo/shape.hpp"

#include <doctest.h>

#include <cmath>

using namespace prodgeo;

namespace {

Mat diag3(double a, double b, double c) {
    Mat m(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

Mat rotated2(double theta, double l1, double l2) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat m(2, 2);
    m(0, 0) = c * c * l1 + s * s * l2;
    m(1, 1) = s * s * l1 + c * c * l2;
    m(0, 1) = m(1, 0) = c * s * (l1 - l2);
    return m;
}

} // namespace

TEST_CASE("serpentine traversal visits grid neighbors consecutively") {
    GridSpec g;
    g.axes = {{0.0, 1.0, 3}, {-1.0, 1.0, 4}, {0.0, 0.5, 2}};
    std::vector<Vec> path = g.serpentine_points();
    CHECK(static_cast<int>(path.size()) == g.total());
    // each consecutive pair differs along exactly one axis by one step
    Vec steps = {1.0 / 2, 2.0 / 3, 0.5};
    for (size_t p = 1; p < path.size(); ++p) {
        int moved = 0;
        for (size_t k = 0; k < 3; ++k) {
            const double d = std::fabs(path[p][k] - path[p - 1][k]);
            if (d > 1e-12) {
                ++moved;
                CHECK(d == doctest::Approx(steps[k]).epsilon(1e-12));
            }
        }
        CHECK(moved == 1);
    }
    // every grid point visited exactly once
    std::vector<Vec> plain = g.points();
    for (const auto& u : plain) {
        int found = 0;
        for (const auto& v : path) {
            bool same = true;
            for (int k = 0; k < 3; ++k)
                if (std::fabs(u[k] - v[k]) > 1e-12) same = false;
            if (same) ++found;
        }
        CHECK(found == 1);
    }
}

TEST_CASE("cluster_spectrum: exact diagonal, umbilic and sub-tolerance merge") {
    EigenStructure s1 = cluster_spectrum(diag3(2, 2, 5), 1e-6);
    CHECK(s1.groups() == 2);
    CHECK(s1.values[0] == doctest::Approx(5.0));
    CHECK(s1.values[1] == doctest::Approx(2.0));
    CHECK(s1.multiplicities == std::vector<int>{1, 2});

    Mat id = Mat::identity(4);
    EigenStructure s2 = cluster_spectrum(id, 1e-6);
    CHECK(s2.groups() == 1);
    CHECK(s2.multiplicities == std::vector<int>{4});

    EigenStructure s3 = cluster_spectrum(diag3(1.0, 1.0 + 1e-9, 3.0), 1e-6);
    CHECK(s3.groups() == 2);
    CHECK(s3.values[0] == doctest::Approx(3.0));
    CHECK(s3.values[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s3.multiplicities == std::vector<int>{1, 2});
}

TEST_CASE("cluster_spectrum: ambiguous gap raises ClusteringError") {
    CHECK_THROWS_AS(cluster_spectrum(diag3(0.0, 1.5e-6, 1.0), 1e-6), ClusteringError);
    Mat asym(2, 2);
    asym(0, 1) = 1e-3;
    CHECK_THROWS_AS(cluster_spectrum(asym, 1e-6), UsageError);
}

TEST_CASE("EigenStructure invariants: representative gap > 2 tol") {
    EigenStructure s = cluster_spectrum(diag3(2, 2, 5), 1e-6);
    CHECK(s.dimension() == 3);
    for (int i = 0; i + 1 < s.groups(); ++i) CHECK(s.values[i] - s.values[i + 1] > 2.0 * s.tol_used);
}

TEST_CASE("smooth_frame on a constant diagonal field returns signed canonical axes") {
    std::vector<Mat> ops(5, diag3(2, 2, 5));
    EigenStructure st = cluster_spectrum(ops[0], 1e-6);
    FrameField ff = smooth_frame(ops, st);
    CHECK(ff.max_gram_error <= 1e-12);
    CHECK(ff.max_adjacent_deviation <= 1e-14);
    CHECK(ff.oriented);
    CHECK(ff.max_eigen_residual <= 1e-12);
    CHECK(ff.max_cross_orthogonality <= 1e-12);
    for (const auto& f : ff.frames)
        for (int j = 0; j < 3; ++j) {
            // each column is +- a canonical basis vector
            int nonzero = 0;
            for (int i = 0; i < 3; ++i)
                if (std::fabs(f(i, j)) > 1e-12) ++nonzero;
            CHECK(nonzero == 1);
        }
    // eigenvalue bookkeeping follows the cluster order (5 then 2, 2)
    CHECK(ff.frame_values[0][0] == doctest::Approx(5.0));
    CHECK(ff.frame_values[0][1] == doctest::Approx(2.0));
}

TEST_CASE("smooth_frame tracks a rotating 2x2 eigenframe") {
    const double quarter_pi = std::atan(1.0);
    const int npts = 65;
    std::vector<Mat> ops;
    for (int i = 0; i < npts; ++i) ops.push_back(rotated2(quarter_pi * i / (npts - 1), 1.0, 3.0));
    EigenStructure st = cluster_spectrum(ops[0], 1e-6);
    FrameField ff = smooth_frame(ops, st);
    CHECK(ff.oriented);
    CHECK(ff.max_gram_error <= 1e-12);
    for (int i = 0; i < npts; ++i) {
        const double theta = quarter_pi * i / (npts - 1);
        // first column: eigenvector of the larger value 3, i.e. +-(sin, -cos)... up to sign
        const double dotp = std::fabs(-std::sin(theta) * ff.frames[i](0, 0) +
                                      std::cos(theta) * ff.frames[i](1, 0));
        CHECK(dotp == doctest::Approx(1.0).epsilon(1e-10));
    }
    // adjacent deviation scales linearly with the step
    const double h = quarter_pi / (npts - 1);
    CHECK(ff.max_adjacent_deviation == doctest::Approx(h).epsilon(0.05));
}

TEST_CASE("frame deviation halves under grid refinement") {
    const double quarter_pi = std::atan(1.0);
    auto deviation = [&](int npts) {
        std::vector<Mat> ops;
        for (int i = 0; i < npts; ++i) ops.push_back(rotated2(quarter_pi * i / (npts - 1), 1.0, 3.0));
        FrameField ff = smooth_frame(ops, cluster_spectrum(ops[0], 1e-6));
        return ff.max_adjacent_deviation;
    };
    double prev = deviation(17);
    for (int npts : {33, 65, 129}) {
        const double cur = deviation(npts);
        const double ratio = cur / prev;
        CHECK(ratio > 0.4);
        CHECK(ratio < 0.6);
        prev = cur;
    }
}

TEST_CASE("smooth_frame flags multiplicity changes across the grid") {
    std::vector<Mat> ops = {diag3(-0.5, 0, 1), diag3(0, 0, 1), diag3(0.5, 0, 1)};
    EigenStructure st = cluster_spectrum(ops[0], 1e-6);
    CHECK_THROWS_AS(smooth_frame(ops, st), StratificationError);
}

TEST_CASE("smooth_frame on the shape operators of a rotational horosphere") {
    auto entry = rotational_horosphere_entry(1.0, 4);
    GridSpec grid = entry_grid(entry, 3);
    std::vector<Mat> ops;
    std::vector<ShapeData> sds;
    for (const auto& u : grid.serpentine_points()) {
        sds.push_back(shape_data(*entry.chart, u));
        ops.push_back(symmetrized_shape_operator(sds.back()));
    }
    EigenStructure st = cluster_spectrum(ops[0], 1e-6);
    CHECK(st.groups() == 2);
    // clusters {sigma/sqrt(2) (m=3)} and {0}
    bool has_zero = false, has_pm = false;
    for (int k = 0; k < st.groups(); ++k) {
        if (std::fabs(st.values[k]) <= 1e-8 && st.multiplicities[k] == 1) has_zero = true;
        if (std::fabs(std::fabs(st.values[k]) - 1.0 / std::sqrt(2.0)) <= 1e-8 &&
            st.multiplicities[k] == 3)
            has_pm = true;
    }
    CHECK(has_zero);
    CHECK(has_pm);

    FrameField ff = smooth_frame(ops, st);
    CHECK(ff.oriented);
    CHECK(ff.max_gram_error <= 1e-10);
    CHECK(ff.max_eigen_residual <= 1e-8);
    CHECK(ff.max_cross_orthogonality <= 1e-9);

    // the zero-curvature frame vector aligns with T (in symmetrized coords)
    for (size_t p = 0; p < ops.size(); ++p) {
        int zero_col = -1;
        for (int j = 0; j < 4; ++j)
            if (std::fabs(ff.frame_values[p][j]) <= 1e-8) zero_col = j;
        REQUIRE(zero_col >= 0);
        Vec yt = to_symmetrized_coords(sds[p], sds[p].T);
        const double tn = norm2(yt);
        double ip = 0.0;
        for (int i = 0; i < 4; ++i) ip += yt[i] * ff.frames[p](i, zero_col);
        const double angle = std::acos(std::min(1.0, std::fabs(ip) / tn));
        CHECK(angle <= 1e-7);
    }
}

TEST_CASE("a custom smooth seed basis gives an equally valid frame") {
    const double quarter_pi = std::atan(1.0);
    const int npts = 33;
    std::vector<Mat> ops;
    for (int i = 0; i < npts; ++i) ops.push_back(rotated2(quarter_pi * i / (npts - 1), 1.0, 3.0));
    EigenStructure st = cluster_spectrum(ops[0], 1e-6);
    // a skewed but independent constant seed pair
    std::vector<Vec> seeds = {{0.8, 0.6}, {-0.6, 0.8}};
    FrameField ff = smooth_frame(ops, st, 1e-10, seeds);
    CHECK(ff.max_gram_error <= 1e-12);
    CHECK(ff.max_eigen_residual <= 1e-12);
    CHECK(ff.oriented);
    // same eigenspaces as the canonical-seed frame, up to sign
    FrameField ref = smooth_frame(ops, st);
    for (int p = 0; p < npts; ++p)
        for (int j = 0; j < 2; ++j) {
            double ip = 0.0;
            for (int r = 0; r < 2; ++r) ip += ff.frames[p](r, j) * ref.frames[p](r, j);
            CHECK(std::fabs(ip) == doctest::Approx(1.0).epsilon(1e-10));
        }
    CHECK_THROWS_AS(smooth_frame(ops, st, 1e-10, {{1.0, 0.0}}), UsageError);
}

TEST_CASE("re-seeding handles canonical seeds falling into the wrong eigenspace") {
    // diag(2,2,5): slot 0 seeds e_0, which the (A - 2I) projector kills;
    // the deterministic re-seed must recover a valid frame anyway
    std::vector<Mat> ops(2, diag3(2, 2, 5));
    EigenStructure st = cluster_spectrum(ops[0], 1e-6);
    FrameField ff = smooth_frame(ops, st);
    for (size_t p = 0; p < ops.size(); ++p)
        for (int j = 0; j < 3; ++j) {
            // A X = lambda X for the recorded lambda
            Vec x(3), ax(3, 0.0);
            for (int i = 0; i < 3; ++i) x[i] = ff.frames[p](i, j);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k) ax[i] += ops[p](i, k) * x[k];
            for (int i = 0; i < 3; ++i)
                CHECK(std::fabs(ax[i] - ff.frame_values[p][j] * x[i]) <= 1e-10);
        }
}
