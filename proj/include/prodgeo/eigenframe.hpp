#pragma once

// Smooth orthonormal eigenframes for a field of symmetric operators whose
// eigenvalue multiplicities stay constant: per point, annihilating projector
// products applied to a deterministic seed basis, then modified Gram-Schmidt,
// then a sequential sign alignment along the traversal path.

#include "prodgeo/errors.hpp"
#include "prodgeo/linalg.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace prodgeo {

struct EigenStructure {
    Vec values;                      // cluster representatives, strictly decreasing
    std::vector<int> multiplicities; // same length
    double tol_used = 0.0;

    int groups() const { return static_cast<int>(values.size()); }
    int dimension() const {
        int n = 0;
        for (int m : multiplicities) n += m;
        return n;
    }
};

/// Groups the spectrum of a symmetric matrix into clusters with intra-cluster
/// spread <= tol and inter-cluster gap > 2*tol. A gap inside (tol, 2*tol] is
/// ambiguous and raises ClusteringError.
inline EigenStructure cluster_spectrum(const Mat& a, double tol) {
    const int n = a.rows;
    if (a.cols != n) throw UsageError("cluster_spectrum: matrix not square");
    double asym = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
            scale = std::max(scale, std::fabs(a(i, j)));
        }
    if (asym > 1e-12 * std::max(1.0, scale))
        throw UsageError("cluster_spectrum: matrix not symmetric");

    EigenSym e = jacobi_eigensym(a);
    EigenStructure s;
    s.tol_used = tol;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        const bool boundary = i == n || e.values[i - 1] - e.values[i] > tol;
        if (!boundary) continue;
        if (i < n) {
            const double gap = e.values[i - 1] - e.values[i];
            if (gap <= 2.0 * tol)
                throw ClusteringError("cluster_spectrum: gap inside (tol, 2*tol], adjust tol");
        }
        const double spread = e.values[start] - e.values[i - 1];
        if (spread > tol)
            throw ClusteringError("cluster_spectrum: chained cluster spread exceeds tol");
        double mean = 0.0;
        for (int k = start; k < i; ++k) mean += e.values[k];
        s.values.push_back(mean / (i - start));
        s.multiplicities.push_back(i - start);
        start = i;
    }
    return s;
}

struct FrameField {
    EigenStructure structure;
    std::vector<Mat> frames;      // per path point; columns cluster-major
    std::vector<Vec> frame_values; // per path point; eigenvalue per column
    double max_eigen_residual = 0.0;   // ||(A - lambda I) X|| / ||X|| before GS
    double max_cross_orthogonality = 0.0; // cross-cluster inner products before GS
    double max_gram_error = 0.0;       // || X^T X - I ||_max after GS
    double max_adjacent_deviation = 0.0;
    double min_determinant = 0.0;
    bool oriented = false;             // det = +1 at every point
};

namespace detail {

struct ProjectorResult {
    Vec x;
    double eigen_residual;
};

inline ProjectorResult projector_image(const Mat& a, const EigenStructure& sp, int cluster, Vec x) {
    const int n = a.rows, g = sp.groups();
    for (int j = 0; j < g; ++j) {
        if (j == cluster) continue;
        Vec y(n, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) y[r] += a(r, c) * x[c];
            y[r] -= sp.values[j] * x[r];
        }
        const double scale = std::max(1.0, max_abs(y));
        for (int r = 0; r < n; ++r) x[r] = y[r] / scale;
    }
    if (cluster % 2 == 1)
        for (auto& v : x) v = -v;
    ProjectorResult out;
    const double nx = norm2(x);
    out.x = x;
    if (nx == 0.0) {
        out.eigen_residual = std::numeric_limits<double>::infinity();
        return out;
    }
    Vec r(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < n; ++c) r[i] += a(i, c) * x[c];
        r[i] -= sp.values[cluster] * x[i];
    }
    out.eigen_residual = norm2(r) / nx;
    return out;
}

} // namespace detail

/// Differentiable-frame construction over an ordered path of symmetric
/// operators. The path is expected to visit grid neighbors consecutively
/// (serpentine order); the alignment pass is sequential in that order.
/// `seed_basis` may supply the smooth independent seed vectors (one per
/// slot, cluster-major); by default the canonical basis is used, with a
/// deterministic canonical re-seed when a projector image degenerates.
inline FrameField smooth_frame(std::span<const Mat> ops, const EigenStructure& structure,
                               double reseed_threshold = 1e-10,
                               const std::vector<Vec>& seed_basis = {}) {
    if (ops.empty()) throw UsageError("smooth_frame: empty operator path");
    const int n = ops[0].rows;
    if (structure.dimension() != n) throw UsageError("smooth_frame: structure dimension mismatch");
    if (!seed_basis.empty() && static_cast<int>(seed_basis.size()) != n)
        throw UsageError("smooth_frame: need one seed vector per slot");

    FrameField out;
    out.structure = structure;
    out.frames.reserve(ops.size());
    out.frame_values.reserve(ops.size());
    out.min_determinant = std::numeric_limits<double>::infinity();

    for (size_t p = 0; p < ops.size(); ++p) {
        const Mat& a = ops[p];
        EigenStructure sp = cluster_spectrum(a, structure.tol_used);
        if (sp.groups() != structure.groups() || sp.multiplicities != structure.multiplicities)
            throw StratificationError("smooth_frame: eigenvalue multiplicities change across the grid");

        // Projector images of the seeds, cluster-major slots. A degenerate
        // image triggers a deterministic re-seed to the next canonical vector
        // not already claimed inside the same cluster.
        std::vector<Vec> raw(n);
        Vec raw_values(n, 0.0);
        int slot = 0;
        for (int k = 0; k < sp.groups(); ++k) {
            std::vector<bool> used(n, false);
            for (int i = 0; i < sp.multiplicities[k]; ++i, ++slot) {
                detail::ProjectorResult pr;
                bool found = false;
                if (!seed_basis.empty()) {
                    pr = detail::projector_image(a, sp, k, seed_basis[slot]);
                    found = norm2(pr.x) > reseed_threshold;
                }
                for (int attempt = 0; attempt < n && !found; ++attempt) {
                    const int seed = (slot + attempt) % n;
                    if (used[seed]) continue;
                    Vec e(n, 0.0);
                    e[seed] = 1.0;
                    pr = detail::projector_image(a, sp, k, std::move(e));
                    if (norm2(pr.x) > reseed_threshold) {
                        used[seed] = true;
                        found = true;
                    }
                }
                if (!found) throw SeedError("smooth_frame: every candidate seed degenerates");
                out.max_eigen_residual = std::max(out.max_eigen_residual, pr.eigen_residual);
                raw[slot] = pr.x;
                raw_values[slot] = sp.values[k];
            }
        }

        // Cross-cluster orthogonality diagnostic before any orthonormalization.
        slot = 0;
        std::vector<int> cluster_of(n);
        for (int k = 0; k < sp.groups(); ++k)
            for (int i = 0; i < sp.multiplicities[k]; ++i) cluster_of[slot++] = k;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (cluster_of[i] == cluster_of[j]) continue;
                const double ip = std::fabs(dot(raw[i], raw[j])) / (norm2(raw[i]) * norm2(raw[j]));
                out.max_cross_orthogonality = std::max(out.max_cross_orthogonality, ip);
            }

        // Modified Gram-Schmidt in cluster order, within cluster by seed index.
        Mat frame(n, n);
        std::vector<Vec> q;
        for (int i = 0; i < n; ++i) {
            Vec v = raw[i];
            for (const auto& prev : q) {
                const double pr = dot(v, prev);
                for (int r = 0; r < n; ++r) v[r] -= pr * prev[r];
            }
            const double nv = norm2(v);
            if (nv < 1e-12) throw SeedError("smooth_frame: seeds degenerate under orthogonalization");
            for (auto& x : v) x /= nv;
            q.push_back(v);
            for (int r = 0; r < n; ++r) frame(r, i) = v[r];
        }

        // Sign alignment against the previous path point.
        if (!out.frames.empty()) {
            const Mat& prev = out.frames.back();
            for (int j = 0; j < n; ++j) {
                double ip = 0.0;
                for (int r = 0; r < n; ++r) ip += frame(r, j) * prev(r, j);
                if (ip < 0.0)
                    for (int r = 0; r < n; ++r) frame(r, j) = -frame(r, j);
            }
        }

        out.frames.push_back(std::move(frame));
        out.frame_values.push_back(std::move(raw_values));
    }

    // One global flip of the last column makes the aligned family positively
    // oriented without breaking smoothness.
    if (determinant(out.frames.front()) < 0.0)
        for (auto& f : out.frames)
            for (int r = 0; r < n; ++r) f(r, n - 1) = -f(r, n - 1);

    for (size_t p = 0; p < out.frames.size(); ++p) {
        const Mat& f = out.frames[p];
        Mat gram = transpose(f) * f;
        for (int i = 0; i < n; ++i) gram(i, i) -= 1.0;
        out.max_gram_error = std::max(out.max_gram_error, max_abs(gram));
        out.min_determinant = std::min(out.min_determinant, determinant(f));
        if (p > 0) {
            double dev = 0.0;
            for (int j = 0; j < n; ++j) {
                double d2 = 0.0;
                for (int r = 0; r < n; ++r) {
                    const double d = f(r, j) - out.frames[p - 1](r, j);
                    d2 += d * d;
                }
                dev = std::max(dev, std::sqrt(d2));
            }
            out.max_adjacent_deviation = std::max(out.max_adjacent_deviation, dev);
        }
    }
    out.oriented = out.min_determinant > 0.0;
    return out;
}

} // namespace prodgeo
