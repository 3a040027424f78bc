//! Canonical quadruplets `(ψ, χ, η, ξ)`, eligibility, and the extremal
//! eligible functions `ψ_L`, `ψ_U`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{max_subarray, union_knots, CombineOp, PlFunction, IDENTITY_TOL};
use crate::track::{existence_check, DiagonalSpec};

/// A proposed `ψ` with its derived canonical functions and eligibility verdict.
///
/// `ψ` and `ξ` are functions of `x`; `χ` and `η` are functions of `y` and
/// carry knots at the track images `φ(u)` of every knot `u` of `ψ`, `δ`, `φ`.
#[derive(Debug, Clone)]
pub struct PsiCandidate {
    spec: Arc<DiagonalSpec>,
    psi: PlFunction,
    chi: PlFunction,
    eta: PlFunction,
    xi: PlFunction,
    eligible: bool,
    violation: Option<String>,
}

impl PsiCandidate {
    pub fn spec(&self) -> &Arc<DiagonalSpec> {
        &self.spec
    }

    pub fn psi(&self) -> &PlFunction {
        &self.psi
    }

    /// `χ(y) = y − η(y)`.
    pub fn chi(&self) -> &PlFunction {
        &self.chi
    }

    /// `η(y) = δ(φ⁻¹(y)) − ψ(φ⁻¹(y))`.
    pub fn eta(&self) -> &PlFunction {
        &self.eta
    }

    /// `ξ(x) = x − ψ(x)`.
    pub fn xi(&self) -> &PlFunction {
        &self.xi
    }

    pub fn eligible(&self) -> bool {
        self.eligible
    }

    pub fn violation(&self) -> Option<&str> {
        self.violation.as_deref()
    }

    pub(crate) fn ensure_eligible(&self) -> Result<()> {
        match &self.violation {
            None => Ok(()),
            Some(v) => Err(Error::IneligiblePsi(v.clone())),
        }
    }

    fn same_spec(&self, other: &PsiCandidate) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec
    }
}

/// Builds the canonical quadruplet of `psi` and tests that all four members
/// are increasing.
pub fn quadruplet(spec: &Arc<DiagonalSpec>, psi: &PlFunction) -> Result<PsiCandidate> {
    let anchor = psi.ys()[0];
    if anchor.abs() > IDENTITY_TOL {
        return Err(Error::PsiNotAnchored(anchor));
    }
    let u = union_knots(psi.xs(), spec.knots());
    let ps = psi.sample_at(&u);
    let d = spec.delta().sample_at(&u);
    let ph = spec.track().phi().sample_at(&u);

    let psi_r = PlFunction::from_sorted_points(u.iter().copied().zip(ps.iter().copied()));
    let xi = PlFunction::from_sorted_points(u.iter().zip(&ps).map(|(&x, &p)| (x, x - p)));
    let eta_pts: Vec<(f64, f64)> = ph.iter().zip(d.iter().zip(&ps)).map(|(&y, (&dv, &p))| (y, dv - p)).collect();
    let chi = PlFunction::from_sorted_points(eta_pts.iter().map(|&(y, e)| (y, y - e)));
    let eta = PlFunction::from_sorted_points(eta_pts);

    let tol = spec.tol();
    let violation = [("psi", &psi_r, "x"), ("chi", &chi, "y"), ("eta", &eta, "y"), ("xi", &xi, "x")]
        .into_iter()
        .find_map(|(name, f, var)| {
            f.first_decrease(tol)
                .map(|(at, inc)| format!("{name} decreases by {:.3e} on the segment starting at {var} = {at}", -inc))
        });

    Ok(PsiCandidate {
        spec: Arc::clone(spec),
        psi: psi_r,
        chi,
        eta,
        xi,
        eligible: violation.is_none(),
        violation,
    })
}

/// Verdict of the variation-bound form of eligibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationVerdict {
    pub eligible: bool,
    /// Interval carrying the largest violation, if any.
    pub witness: Option<(f64, f64)>,
    /// `max (V⁻ₓᵧ(δ̃) − (ψ(y) − ψ(x)))` over knot pairs.
    pub lower_excess: f64,
    /// `max ((ψ(y) − ψ(x)) − (y − x) + V⁺ₓᵧ(ζ))` over knot pairs.
    pub upper_excess: f64,
}

/// Checks `V⁻ₓᵧ(δ̃) ≤ ψ(y) − ψ(x) ≤ (y − x) − V⁺ₓᵧ(ζ)` for all knot pairs.
///
/// Every term is additive over segments, so the worst pair is found as a
/// maximum-sum run of per-segment excesses.
pub fn eligibility_by_variation(spec: &DiagonalSpec, psi: &PlFunction) -> VariationVerdict {
    let u = union_knots(psi.xs(), spec.knots());
    let ps = psi.sample_at(&u);
    let bounds = spec.increment_bounds(&u);
    let lower: Vec<f64> = bounds.iter().enumerate().map(|(k, &(lo, _))| lo - (ps[k + 1] - ps[k])).collect();
    let upper: Vec<f64> = bounds.iter().enumerate().map(|(k, &(_, hi))| (ps[k + 1] - ps[k]) - hi).collect();
    let (lower_excess, la, lb) = max_subarray(&lower);
    let (upper_excess, ua, ub) = max_subarray(&upper);
    let tol = spec.tol();
    let witness = if lower_excess > tol && lower_excess >= upper_excess {
        Some((u[la], u[lb]))
    } else if upper_excess > tol {
        Some((u[ua], u[ub]))
    } else {
        None
    };
    VariationVerdict { eligible: witness.is_none(), witness, lower_excess, upper_excess }
}

/// Pointwise least and greatest eligible `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiBounds {
    /// `ψ_L(x) = V⁻₀ₓ(δ̃)`.
    pub lower: PlFunction,
    /// `ψ_U(x) = x − V⁺₀ₓ(ζ)`.
    pub upper: PlFunction,
}

pub fn psi_bounds(spec: &DiagonalSpec) -> Result<PsiBounds> {
    let report = existence_check(spec);
    if let Some(witness) = report.witness {
        return Err(Error::NoCopulaExists { witness });
    }
    let lower = spec.delta_tilde().negate().positive_variation_majorant();
    let vplus = spec.zeta().positive_variation_majorant();
    let upper = PlFunction::from_sorted_points(vplus.knots().map(|(x, v)| (x, x - v)));
    Ok(PsiBounds { lower, upper })
}

/// Convex combination `(1 − t)·ψ_a + t·ψ_b` of two eligible candidates.
pub fn blend(a: &PsiCandidate, b: &PsiCandidate, t: f64) -> Result<PsiCandidate> {
    if !a.same_spec(b) {
        return Err(Error::SpecMismatch);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain(t));
    }
    a.ensure_eligible()?;
    b.ensure_eligible()?;
    let psi = a.psi.scale(1.0 - t).combine(&b.psi.scale(t), CombineOp::Add);
    quadruplet(&a.spec, &psi)
}

/// How a `ψ` is chosen for a spec.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSelector {
    Lower,
    Upper,
    /// `(1 − t)·ψ_L + t·ψ_U`.
    Blend(f64),
    Explicit(PlFunction),
}

impl PsiSelector {
    pub fn resolve(&self, spec: &Arc<DiagonalSpec>) -> Result<PsiCandidate> {
        match self {
            PsiSelector::Explicit(psi) => quadruplet(spec, psi),
            PsiSelector::Lower => quadruplet(spec, &psi_bounds(spec)?.lower),
            PsiSelector::Upper => quadruplet(spec, &psi_bounds(spec)?.upper),
            PsiSelector::Blend(t) => {
                let bounds = psi_bounds(spec)?;
                let lo = quadruplet(spec, &bounds.lower)?;
                let up = quadruplet(spec, &bounds.upper)?;
                blend(&lo, &up, *t)
            }
        }
    }
}
