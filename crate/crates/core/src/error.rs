use std::fmt;

use thiserror::Error;

/// The four admissibility conditions of a track section, plus groundedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalCondition {
    /// `δ(1) = 1`.
    EndpointOne,
    /// `δ(t) ≤ min(t, φ(t))`.
    BelowBounds,
    /// `δ` is increasing.
    Increasing,
    /// `|δ(t') − δ(t)| ≤ |t' − t| + |φ(t') − φ(t)|`.
    Lipschitz,
    /// `δ(0) = 0`.
    Grounded,
}

impl DiagonalCondition {
    pub fn label(self) -> &'static str {
        match self {
            DiagonalCondition::EndpointOne => "a",
            DiagonalCondition::BelowBounds => "b",
            DiagonalCondition::Increasing => "c",
            DiagonalCondition::Lipschitz => "d",
            DiagonalCondition::Grounded => "grounded",
        }
    }
}

impl fmt::Display for DiagonalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            DiagonalCondition::EndpointOne => "(a) delta(1) = 1",
            DiagonalCondition::BelowBounds => "(b) delta(t) <= min(t, phi(t))",
            DiagonalCondition::Increasing => "(c) delta increasing",
            DiagonalCondition::Lipschitz => "(d) |delta'| <= 1 + phi'",
            DiagonalCondition::Grounded => "delta(0) = 0",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed knots: {0}")]
    MalformedKnots(String),

    #[error("coordinate {0} outside the unit interval")]
    OutOfDomain(f64),

    #[error("track is not strictly increasing on segment [{x0}, {x1}]")]
    NotStrictlyIncreasing { x0: f64, x1: f64 },

    #[error("track must satisfy phi(0) = 0 and phi(1) = 1, got phi(0) = {start}, phi(1) = {end}")]
    EndpointViolation { start: f64, end: f64 },

    #[error("diagonal condition {condition} violated at t = {at}")]
    DiagonalConditionViolated { condition: DiagonalCondition, at: f64 },

    #[error("psi(0) must be 0, got {0}")]
    PsiNotAnchored(f64),

    #[error("no copula has this track section: violation on [{}, {}]", .witness.0, .witness.1)]
    NoCopulaExists { witness: (f64, f64) },

    #[error("candidates belong to different diagonal specs")]
    SpecMismatch,

    #[error("psi is not eligible: {0}")]
    IneligiblePsi(String),

    #[error("bad mesh: {0}")]
    BadMesh(String),

    #[error("grids are defined on different meshes")]
    MeshMismatch,

    #[error("grid is not a copula: {0}")]
    NotACopula(String),

    #[error("grid track section deviates from delta by {deviation} at x = {at}")]
    TrackSectionMismatch { at: f64, deviation: f64 },

    #[error("extracted psi is {distance} away from the eligible set (limit {limit}); refine the mesh")]
    IneligibleExtractedPsi { distance: f64, limit: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
