#include "prodgeo/linalg.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace prodgeo;

TEST_CASE("lu_solve recovers a hand-checked system") {
    // 2x + y = 5, x + 3y = 10  ->  x = 1, y = 3
    Mat m(2, 2);
    m(0, 0) = 2;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 3;
    Vec x = lu_solve(m, {5.0, 10.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("cholesky factors SPD matrices and solves") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n = 2; n <= 7; ++n) {
        Mat b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = dist(rng);
        Mat g = transpose(b) * b;
        for (int i = 0; i < n; ++i) g(i, i) += double(n); // diagonally dominant
        Mat l = cholesky(g);
        Mat llt = l * transpose(l);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(llt(i, j) == doctest::Approx(g(i, j)).epsilon(1e-12));
        Vec rhs(n);
        for (auto& v : rhs) v = dist(rng);
        Vec x = spd_solve(l, rhs);
        Vec back = g * x;
        for (int i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
    }
}

TEST_CASE("cholesky rejects an indefinite matrix") {
    Mat g(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = -1.0;
    CHECK_THROWS_AS(cholesky(g), RegularityError);
}

TEST_CASE("jacobi eigensolver on a known 2x2") {
    // [[2,1],[1,2]] has eigenvalues 3 and 1
    Mat m(2, 2);
    m(0, 0) = 2;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 2;
    EigenSym e = jacobi_eigensym(m);
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-13));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::fabs(e.vectors(0, 0)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    CHECK(std::fabs(e.vectors(1, 0)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
}

TEST_CASE("jacobi reconstructs random symmetric matrices") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int n = 2; n <= 7; ++n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = dist(rng);
        EigenSym e = jacobi_eigensym(m);
        // V diag(L) V^T == M and V^T V == I
        Mat vt = transpose(e.vectors);
        Mat d(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = e.values[i];
        Mat rec = e.vectors * d * vt;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(rec(i, j) == doctest::Approx(m(i, j)).epsilon(1e-11));
        Mat gram = vt * e.vectors;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(gram(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
        for (int i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);
    }
}

TEST_CASE("templated cholesky solve matches the double path") {
    Mat g(3, 3);
    g(0, 0) = 4;
    g(1, 1) = 5;
    g(2, 2) = 6;
    g(0, 1) = g(1, 0) = 1;
    g(1, 2) = g(2, 1) = 0.5;
    g(0, 2) = g(2, 0) = 0.25;
    Vec rhs = {1.0, 2.0, 3.0};
    Vec ref = spd_solve(cholesky(g), rhs);
    std::vector<double> flat(g.a.begin(), g.a.end());
    std::vector<double> x = chol_solve_t<double>(3, flat, rhs);
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}

TEST_CASE("determinant sign tracks column swaps") {
    Mat id = Mat::identity(3);
    CHECK(determinant(id) == doctest::Approx(1.0));
    Mat sw(3, 3);
    sw(0, 1) = sw(1, 0) = sw(2, 2) = 1.0;
    CHECK(determinant(sw) == doctest::Approx(-1.0));
}
