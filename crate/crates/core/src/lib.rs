//! Copulas with a prescribed track section.
//!
//! A track `φ` is an increasing bijection of `[0, 1]`; a track section `δ`
//! prescribes `C(t, φ(t)) = δ(t)`. This crate validates such sections,
//! decides whether any copula realizes them, parametrizes the family of
//! constructed copulas by an eligible function `ψ`, and verifies, compares
//! and splices the results on grids.

pub mod canonical;
pub mod construction;
pub mod diagonals;
pub mod error;
pub mod funcspace;
pub mod splice;
pub mod track;
pub mod verification;

pub use canonical::{
    blend, eligibility_by_variation, psi_bounds, quadruplet, PsiBounds, PsiCandidate, PsiSelector,
    VariationVerdict,
};
pub use construction::{
    c_psi_value, default_mesh, materialize_grid, region_functions, Branch, CopulaCpsi, GridCopula,
    StSplit,
};
pub use error::{DiagonalCondition, Error, Result};
pub use funcspace::{uniform_knots, union_knots, CombineOp, PlFunction, VariationTriple};
pub use splice::SplicedFunction;
pub use track::{check_conditions, existence_check, existence_check_raw, ConditionResult, DiagonalSpec, ExistenceReport, Track};
pub use verification::{
    check_grid, compare, dominating_envelope, extract_psi, pointwise_upper_bound, ComparisonResult,
    Envelope, GridMode, Relation, UpperBound, VerificationReport,
};
