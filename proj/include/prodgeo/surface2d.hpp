#pragma once

// Surface (n = 2) identities: the compatibility constraint tying two distinct
// constant principal curvatures to (nu, b1, b2), and the biquadratic in nu
// that rules out non-geodesic minimal surfaces with constant curvatures.

#include "prodgeo/ambient.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/shape.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace prodgeo {

/// Left side of
/// l1 l2 + 2 c nu^2 + c (l1 b1^2 - l2 b2^2)/(l2 - l1) + 2 nu^2 (b1^2 + b2^2)/(l2 - l1)^2,
/// which vanishes identically on surfaces with two distinct constant
/// principal curvatures; (b1, b2) are the components of T in the principal
/// frame of (l1, l2).
inline double prop21_residual(double l1, double l2, double b1, double b2, double nu,
                              ModelConstant c) {
    if (std::fabs(l1 - l2) <= 1e-12)
        throw UmbilicError("prop21_residual: principal curvatures coincide");
    const double unit = nu * nu + b1 * b1 + b2 * b2;
    if (std::fabs(unit - 1.0) > 1e-9)
        throw UsageError("prop21_residual: nu^2 + b1^2 + b2^2 must be 1");
    const double d = l2 - l1;
    return l1 * l2 + 2.0 * c.real() * nu * nu + c.real() * (l1 * b1 * b1 - l2 * b2 * b2) / d +
           2.0 * nu * nu * (b1 * b1 + b2 * b2) / (d * d);
}

/// Same residual evaluated from pipeline data at a point of an n = 2 chart.
inline double prop21_residual_at(const ShapeData& sd) {
    if (sd.G.rows != 2) throw UsageError("prop21_residual_at: need a surface chart (n = 2)");
    PrincipalPairs p = principal_pairs(sd);
    Vec x1(2), x2(2);
    for (int i = 0; i < 2; ++i) {
        x1[i] = p.directions(i, 0);
        x2[i] = p.directions(i, 1);
    }
    const double b1 = sd.g_inner(sd.T, x1);
    const double b2 = sd.g_inner(sd.T, x2);
    return prop21_residual(p.values[0], p.values[1], b1, b2, sd.nu, sd.c);
}

struct Biquadratic {
    std::array<double, 3> coefficients; // nu^4 + B nu^2 + C
    double discriminant = 0.0;
    std::vector<double> admissible_roots; // roots in nu^2 restricted to [0, 1]
};

/// The minimal-surface constraint as a biquadratic in nu:
/// nu^4 - nu^2 (1 + 5 c l1^2) + l1^2 (2 l1^2 + c) = 0 for curvatures (l1, -l1).
inline Biquadratic minimal_biquadratic(double l1, ModelConstant c) {
    if (std::fabs(l1) <= 1e-12)
        throw UmbilicError("minimal_biquadratic: l1 = 0 is the excluded umbilic case");
    Biquadratic q;
    const double b = -(1.0 + 5.0 * c.real() * l1 * l1);
    const double cc = l1 * l1 * (2.0 * l1 * l1 + c.real());
    q.coefficients = {1.0, b, cc};
    q.discriminant = b * b - 4.0 * cc;
    if (q.discriminant >= 0.0) {
        const double r = std::sqrt(q.discriminant);
        for (double root : {(-b - r) / 2.0, (-b + r) / 2.0})
            if (root >= -1e-12 && root <= 1.0 + 1e-12)
                q.admissible_roots.push_back(std::min(1.0, std::max(0.0, root)));
    }
    return q;
}

struct MinimalScan {
    int pairs_scanned = 0;
    int admissible_roots = 0;
    int surviving_candidates = 0; // must stay 0
};

/// Sweeps l1 over a grid for both signs of c and pushes every admissible root
/// of the biquadratic through the constancy chain: a root makes nu constant,
/// so b1 l1 = b2 l2 = 0 with l2 = -l1 != 0 forces b1 = b2 = 0, hence nu^2 = 1
/// (unit relation), i.e. a slice; a slice is totally geodesic, contradicting
/// l1 != 0. Roots failing each step are discarded; none may survive.
inline MinimalScan minimal_cpc_scan(double l1_lo = 0.05, double l1_hi = 5.0, int count = 250) {
    MinimalScan scan;
    for (int ci : {1, -1}) {
        const ModelConstant c(ci);
        for (int i = 0; i < count; ++i) {
            const double l1 = l1_lo + (l1_hi - l1_lo) * i / double(count - 1);
            Biquadratic q = minimal_biquadratic(l1, c);
            scan.pairs_scanned += 1;
            for (double root : q.admissible_roots) {
                scan.admissible_roots += 1;
                // chain: b1 = b2 = 0 forced, so nu^2 must be exactly 1
                const double b_sq = 1.0 - root; // b1^2 + b2^2 under the unit relation
                if (b_sq > 1e-9) continue;      // contradiction: b's forced to vanish
                // nu^2 = 1: slice, totally geodesic, needs l1 = 0; l1 > 0 here
                if (std::fabs(l1) > 1e-12) continue;
                scan.surviving_candidates += 1;
            }
        }
    }
    return scan;
}

} // namespace prodgeo
