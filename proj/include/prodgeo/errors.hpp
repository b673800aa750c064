#pragma once

#include <stdexcept>
#include <string>

namespace prodgeo {

/// Base class for every error the library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller misuse: dimension mismatch, bad arguments, unsupported operation.
struct UsageError : Error {
    using Error::Error;
};

/// Parameter point outside a chart's declared domain.
struct DomainError : Error {
    using Error::Error;
};

/// Chart point violates the quadric model constraint (or wrong sheet).
struct ConstraintError : Error {
    using Error::Error;
};

/// Induced metric degenerate or ill-conditioned at the probed point.
struct RegularityError : Error {
    using Error::Error;
};

/// FD stencil would leave the chart domain.
struct BoundaryError : Error {
    using Error::Error;
};

/// Spectrum has a gap inside (tol, 2*tol]; caller must adjust tol.
struct ClusteringError : Error {
    using Error::Error;
};

/// Eigenvalue multiplicities change across the grid.
struct StratificationError : Error {
    using Error::Error;
};

/// Projector image of every candidate seed is numerically zero.
struct SeedError : Error {
    using Error::Error;
};

/// A parallel-transport denominator vanished (focal value reached).
struct FocalPointError : Error {
    using Error::Error;
};

/// An operation's hypotheses do not hold (e.g. T not principal); not a failure.
struct InapplicabilityError : Error {
    using Error::Error;
};

/// Bad constructor parameters (e.g. c1 = 0 in a profile solution).
struct ParameterError : Error {
    using Error::Error;
};

/// Identity undefined at umbilic data (coincident principal curvatures).
struct UmbilicError : Error {
    using Error::Error;
};

} // namespace prodgeo
