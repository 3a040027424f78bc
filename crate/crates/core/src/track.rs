//! Track functions, track sections (φ-diagonals) and existence criteria.

use serde::Serialize;

use crate::error::{DiagonalCondition, Error, Result};
use crate::funcspace::{max_subarray, union_knots, CombineOp, PlFunction, DEFAULT_TOL};

/// A strictly increasing piecewise-linear bijection of `[0, 1]` together with
/// its exact inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    phi: PlFunction,
    phi_inv: PlFunction,
}

impl Track {
    pub fn new(phi: PlFunction) -> Result<Self> {
        let (xs, ys) = (phi.xs(), phi.ys());
        if let Some(i) = ys.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotStrictlyIncreasing { x0: xs[i], x1: xs[i + 1] });
        }
        let (start, end) = (ys[0], ys[ys.len() - 1]);
        if start != 0.0 || end != 1.0 {
            return Err(Error::EndpointViolation { start, end });
        }
        let phi_inv = phi.inverse()?;
        Ok(Track { phi, phi_inv })
    }

    pub fn identity() -> Self {
        Track { phi: PlFunction::identity(), phi_inv: PlFunction::identity() }
    }

    pub fn phi(&self) -> &PlFunction {
        &self.phi
    }

    pub fn phi_inv(&self) -> &PlFunction {
        &self.phi_inv
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.phi.at(x)
    }

    pub fn invert(&self, y: f64) -> f64 {
        self.phi_inv.at(y)
    }

    pub fn is_identity(&self) -> bool {
        self.phi.knots().all(|(x, y)| x == y)
    }
}

/// A validated track section `δ` for a track `φ`, with the gaps
/// `ζ = x − δ` and `δ̃ = φ − δ` materialized on the common knot refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpec {
    delta: PlFunction,
    zeta: PlFunction,
    delta_tilde: PlFunction,
    track: Track,
    knots: Vec<f64>,
    tol: f64,
}

impl DiagonalSpec {
    pub fn new(delta: PlFunction, track: Track) -> Result<Self> {
        Self::with_tol(delta, track, DEFAULT_TOL)
    }

    /// Validates with a custom slack for conditions (a)–(d).
    pub fn with_tol(delta: PlFunction, track: Track, tol: f64) -> Result<Self> {
        if let Some(r) = check_conditions(&delta, &track, tol).into_iter().find(|r| !r.holds) {
            return Err(Error::DiagonalConditionViolated { condition: r.condition, at: r.at.unwrap_or(0.0) });
        }
        let knots = union_knots(delta.xs(), track.phi().xs());
        let zeta = PlFunction::identity().combine(&delta, CombineOp::Sub).refine(&knots);
        let delta_tilde = track.phi().combine(&delta, CombineOp::Sub).refine(&knots);
        Ok(DiagonalSpec { delta, zeta, delta_tilde, track, knots, tol })
    }

    pub fn delta(&self) -> &PlFunction {
        &self.delta
    }

    /// `ζ(x) = x − δ(x)`.
    pub fn zeta(&self) -> &PlFunction {
        &self.zeta
    }

    /// `δ̃(x) = φ(x) − δ(x)`.
    pub fn delta_tilde(&self) -> &PlFunction {
        &self.delta_tilde
    }

    pub fn track(&self) -> &Track {
        &self.track
    }

    /// Common refinement of the knots of `δ` and `φ`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Per-segment admissible increments `[V⁻(δ̃), Δx − V⁺(ζ)]` of an eligible
    /// `ψ` on the given knot vector, which must refine [`Self::knots`] for
    /// the bounds to be exact.
    pub fn increment_bounds(&self, knots: &[f64]) -> Vec<(f64, f64)> {
        let z = self.zeta.sample_at(knots);
        let dt = self.delta_tilde.sample_at(knots);
        (0..knots.len() - 1)
            .map(|k| {
                let lo = (dt[k] - dt[k + 1]).max(0.0);
                let hi = (knots[k + 1] - knots[k]) - (z[k + 1] - z[k]).max(0.0);
                (lo, hi)
            })
            .collect()
    }
}

/// Status of one admissibility condition, with the first offending knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionResult {
    #[serde(serialize_with = "condition_label")]
    pub condition: DiagonalCondition,
    pub holds: bool,
    pub at: Option<f64>,
}

fn condition_label<S: serde::Serializer>(c: &DiagonalCondition, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(c.label())
}

/// Evaluates groundedness and conditions (a)–(d) on the knot refinement,
/// in that order.
pub fn check_conditions(delta: &PlFunction, track: &Track, tol: f64) -> Vec<ConditionResult> {
    let knots = union_knots(delta.xs(), track.phi().xs());
    let d = delta.sample_at(&knots);
    let p = track.phi().sample_at(&knots);
    let last = knots.len() - 1;
    let result = |condition, at: Option<f64>| ConditionResult { condition, holds: at.is_none(), at };

    vec![
        result(DiagonalCondition::Grounded, (d[0].abs() > tol).then_some(0.0)),
        result(DiagonalCondition::EndpointOne, ((d[last] - 1.0).abs() > tol).then_some(1.0)),
        result(
            DiagonalCondition::BelowBounds,
            (0..knots.len()).find(|&k| d[k] > knots[k].min(p[k]) + tol).map(|k| knots[k]),
        ),
        result(
            DiagonalCondition::Increasing,
            (0..last).find(|&k| d[k + 1] - d[k] < -tol).map(|k| knots[k]),
        ),
        // The lower side of |δ'| ≤ 1 + φ' is implied by (c) and φ' > 0.
        result(
            DiagonalCondition::Lipschitz,
            (0..last)
                .find(|&k| {
                    let dx = knots[k + 1] - knots[k];
                    (d[k + 1] - d[k] - (p[k + 1] - p[k])) / dx > 1.0 + tol
                })
                .map(|k| knots[k]),
        ),
    ]
}

/// Outcome of the existence test for a copula with a given track section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceReport {
    pub exists: bool,
    pub variational_ok: bool,
    pub lipschitz_ok: bool,
    /// Interval with the largest violation of the variational criterion.
    pub witness: Option<(f64, f64)>,
    /// Largest value of `V⁻ₓᵧ(δ̃) + V⁺ₓᵧ(ζ) − (y − x)` over knot pairs.
    pub variational_excess: f64,
    /// Largest value of `δ(y) − δ(x) − (y − x) − (φ(y) − φ(x))` over knot pairs.
    pub lipschitz_excess: f64,
}

/// Existence test on an already validated spec.
pub fn existence_check(spec: &DiagonalSpec) -> ExistenceReport {
    existence_check_raw(&spec.delta, &spec.track, spec.tol)
}

/// Existence test that does not require `δ` to pass validation first.
///
/// Both criteria are sums of per-segment quantities over the knot
/// refinement, so the maximum over all knot pairs is a maximum-sum run.
pub fn existence_check_raw(delta: &PlFunction, track: &Track, tol: f64) -> ExistenceReport {
    let knots = union_knots(delta.xs(), track.phi().xs());
    let d = delta.sample_at(&knots);
    let p = track.phi().sample_at(&knots);
    let n = knots.len() - 1;

    let mut variational = Vec::with_capacity(n);
    let mut lipschitz = Vec::with_capacity(n);
    for k in 0..n {
        let dx = knots[k + 1] - knots[k];
        let dd = d[k + 1] - d[k];
        let dp = p[k + 1] - p[k];
        let vminus_tilde = (dd - dp).max(0.0);
        let vplus_zeta = (dx - dd).max(0.0);
        variational.push(vminus_tilde + vplus_zeta - dx);
        lipschitz.push(dd - dx - dp);
    }
    let (v_excess, a, b) = max_subarray(&variational);
    let (l_excess, _, _) = max_subarray(&lipschitz);
    let variational_ok = v_excess <= tol;
    ExistenceReport {
        exists: variational_ok,
        variational_ok,
        lipschitz_ok: l_excess <= tol,
        witness: (!variational_ok).then(|| (knots[a], knots[b])),
        variational_excess: v_excess,
        lipschitz_excess: l_excess,
    }
}
