#pragma once

// Small dense linear algebra over double: everything here works on matrices of
// order <= n+2 with n <= 6, so O(n^3) loops without blocking are the right tool.

#include "prodgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

namespace prodgeo {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw UsageError("Mat product: inner dimension mismatch");
    Mat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const double xik = x(i, k);
            for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline Vec operator*(const Mat& m, const Vec& v) {
    if (m.cols != static_cast<int>(v.size())) throw UsageError("Mat*Vec: dimension mismatch");
    Vec r(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r[i] += m(i, j) * v[j];
    return r;
}

inline Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline double dot(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw UsageError("dot: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double max_abs(const Mat& m) {
    double s = 0.0;
    for (double v : m.a) s = std::max(s, std::fabs(v));
    return s;
}

inline double max_abs(const Vec& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

/// LU with partial pivoting; solves a general square system in place.
inline Vec lu_solve(Mat m, Vec b) {
    const int n = m.rows;
    if (m.cols != n || static_cast<int>(b.size()) != n) throw UsageError("lu_solve: shape mismatch");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
        if (m(p, k) == 0.0) throw RegularityError("lu_solve: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(k, j));
            std::swap(b[p], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            m(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * b[j];
        b[i] = s / m(i, i);
    }
    return b;
}

/// Lower Cholesky factor of an SPD matrix; throws RegularityError otherwise.
inline Mat cholesky(const Mat& g) {
    const int n = g.rows;
    Mat l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw RegularityError("cholesky: matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

/// Solves L y = b for lower-triangular L.
inline Vec forward_subst(const Mat& l, Vec b) {
    const int n = l.rows;
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
    return b;
}

/// Solves L^T x = y for lower-triangular L.
inline Vec backward_subst_t(const Mat& l, Vec y) {
    const int n = l.rows;
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * y[k];
        y[i] = s / l(i, i);
    }
    return y;
}

inline Vec spd_solve(const Mat& l_chol, const Vec& b) {
    return backward_subst_t(l_chol, forward_subst(l_chol, b));
}

struct EigenSym {
    Vec values;  // descending
    Mat vectors; // columns match values
};

/// Cyclic Jacobi for a real symmetric matrix. Deterministic: fixed sweep order,
/// eigenpairs sorted by descending value (stable), each vector's largest
/// component made positive.
inline EigenSym jacobi_eigensym(Mat m, int max_sweeps = 64) {
    const int n = m.rows;
    if (m.cols != n) throw UsageError("jacobi_eigensym: matrix not square");
    Mat v = Mat::identity(n);
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(m(i, j)));
    if (scale == 0.0) scale = 1.0;
    const double stop = 1e-15 * scale;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::fabs(m(p, q)));
        if (off <= stop) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) <= stop * 1e-2) continue;
                const double theta = 0.5 * std::atan2(2.0 * m(p, q), m(q, q) - m(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return m(i, i) > m(j, j); });

    EigenSym e;
    e.values.resize(n);
    e.vectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        e.values[j] = m(src, src);
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::fabs(v(i, src)) > std::fabs(v(imax, src))) imax = i;
        const double sgn = v(imax, src) < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) e.vectors(i, j) = sgn * v(i, src);
    }
    return e;
}

/// Spectral condition number of a symmetric positive definite matrix.
inline double spd_condition(const Mat& g) {
    EigenSym e = jacobi_eigensym(g);
    const double lo = e.values.back(), hi = e.values.front();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

/// Pivot-free Cholesky solve over any scalar with +,-,*,/ and sqrt; used at
/// jet level where the metric is known to be SPD at the leaf. Row-major flat g.
template <class S>
std::vector<S> chol_solve_t(int n, const std::vector<S>& g, std::vector<S> b) {
    std::vector<S> l(static_cast<size_t>(n) * n, S(0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            S s = g[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) s = s - l[static_cast<size_t>(i) * n + k] * l[static_cast<size_t>(j) * n + k];
            if (i == j)
                l[static_cast<size_t>(i) * n + i] = sqrt(s);
            else
                l[static_cast<size_t>(i) * n + j] = s / l[static_cast<size_t>(j) * n + j];
        }
    }
    for (int i = 0; i < n; ++i) {
        S s = b[i];
        for (int k = 0; k < i; ++k) s = s - l[static_cast<size_t>(i) * n + k] * b[k];
        b[i] = s / l[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        S s = b[i];
        for (int k = i + 1; k < n; ++k) s = s - l[static_cast<size_t>(k) * n + i] * b[k];
        b[i] = s / l[static_cast<size_t>(i) * n + i];
    }
    return b;
}

inline double determinant(Mat m) {
    const int n = m.rows;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
        if (m(p, k) == 0.0) return 0.0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(k, j));
            det = -det;
        }
        det *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

} // namespace prodgeo
