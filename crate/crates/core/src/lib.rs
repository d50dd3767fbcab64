//! Multivariate Hermite interpolation on rectilinear grids.

pub mod error;
pub mod grid;
pub mod harness;
pub mod ideal;
pub mod interpolant;
pub mod multiindex;
pub mod polyring;
pub mod scalar;
pub mod spline;

pub use error::{Error, Result};
pub use grid::{Axis, DataSource, GridSpec, HermiteData, Violation};
pub use multiindex::{cmp_grevlex, leq_partial, BoxEnumeration, IndexBox, MultiIndex};
pub use polyring::{FactoredTerm, MultiPoly, UniPoly};
pub use scalar::{Rational, Scalar};
pub use interpolant::{
    build_basis, build_lambda, interpolate, solve_coefficients, spitzbart_interpolate, vandermonde_interpolate,
    AxisBasis, BasisSet, HermiteInterpolant, LambdaMatrix,
};
pub use spline::{
    continuity_report, select_window, shared_nodes, ContinuityReport, SplineInterpolant, WindowAnchor, WindowBoundary, WindowRule,
};
pub use ideal::{cascaded_divide, groebner_basis, ideal_member, interpolate_polynomial, sample_polynomial, DivisionResult, Membership};
pub use harness::{derive_data, lattice, multilinear_baseline, rmse, sample_plane, FunctionSource, PlaneSpec, TestFunction};
