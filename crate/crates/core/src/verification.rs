//! Grid axiom checks, dominance comparison, the pointwise upper bound over
//! all copulas with a given track section, and the dominating envelope of a
//! grid copula.

use std::sync::Arc;

use serde::Serialize;

use crate::canonical::{psi_bounds, quadruplet, PsiSelector};
use crate::construction::{validate_mesh, CopulaCpsi, GridCopula};
use crate::error::{Error, Result};
use crate::funcspace::{union_knots, PlFunction};
use crate::track::{DiagonalSpec, Track};

const GRID_TOL: f64 = 1e-12;
const LIPSCHITZ_SLACK: f64 = 1e-9;
const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridMode {
    Copula,
    Quasi,
}

/// Outcome of [`check_grid`]. Both verdicts are always computed; `passed`
/// is the one selected by `mode`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: GridMode,
    pub passed: bool,
    pub is_copula: bool,
    pub is_quasi_copula: bool,
    pub grounded: bool,
    pub margins: bool,
    pub monotone: bool,
    pub lipschitz: bool,
    pub two_increasing: bool,
    pub quasi_only_boundary_ok: bool,
    pub min_cell_volume: f64,
    /// Lower-left corner of the cell with the smallest volume.
    pub worst_cell: (f64, f64),
    pub grounded_error: f64,
    pub margin_error: f64,
    /// Largest decrease along a mesh line; zero for monotone grids.
    pub monotone_violation: f64,
    /// Largest `|ΔC| − (1 + 1e-9)·Δ` along mesh lines.
    pub lipschitz_excess: f64,
    pub min_boundary_volume: f64,
}

/// Checks the copula or quasi-copula axioms on mesh lines.
///
/// Boundary-anchored rectangles are covered through the elementary strips
/// `[0, x]×[y_j, y_{j+1}]`, `[x, 1]×[y_j, y_{j+1}]` and their transposes;
/// every boundary rectangle on the mesh is a sum of these.
pub fn check_grid(grid: &GridCopula, mode: GridMode) -> Result<VerificationReport> {
    let mesh = grid.mesh();
    validate_mesh(mesh)?;
    let n = mesh.len();
    let last = n - 1;
    let c = |i: usize, j: usize| grid.value(i, j);

    let mut grounded_error: f64 = 0.0;
    let mut margin_error: f64 = 0.0;
    for (k, &t) in mesh.iter().enumerate() {
        grounded_error = grounded_error.max(c(0, k).abs()).max(c(k, 0).abs());
        margin_error = margin_error.max((c(k, last) - t).abs()).max((c(last, k) - t).abs());
    }

    let mut min_cell_volume = f64::INFINITY;
    let mut worst_cell = (0.0, 0.0);
    let mut monotone_violation: f64 = 0.0;
    let mut lipschitz_excess = f64::NEG_INFINITY;
    let mut min_boundary_volume = f64::INFINITY;
    for a in 0..n {
        for k in 0..last {
            let step = mesh[k + 1] - mesh[k];
            let bound = (1.0 + LIPSCHITZ_SLACK) * step;
            // along y with x = mesh[a], then along x with y = mesh[a]
            for (lo, hi, far_lo, far_hi) in [
                (c(a, k), c(a, k + 1), c(last, k), c(last, k + 1)),
                (c(k, a), c(k + 1, a), c(k, last), c(k + 1, last)),
            ] {
                let inc = hi - lo;
                monotone_violation = monotone_violation.max(-inc);
                lipschitz_excess = lipschitz_excess.max(inc.abs() - bound);
                let strip_far = (far_hi - far_lo) - inc;
                min_boundary_volume = min_boundary_volume.min(inc).min(strip_far);
            }
        }
    }
    for i in 0..last {
        for j in 0..last {
            let v = grid.cell_volume(i, j);
            if v < min_cell_volume {
                min_cell_volume = v;
                worst_cell = (mesh[i], mesh[j]);
            }
        }
    }

    let grounded = grounded_error <= GRID_TOL;
    let margins = margin_error <= GRID_TOL;
    let monotone = monotone_violation <= GRID_TOL;
    let lipschitz = lipschitz_excess <= GRID_TOL;
    let two_increasing = min_cell_volume >= -GRID_TOL;
    let quasi_only_boundary_ok = min_boundary_volume >= -GRID_TOL;
    let is_copula = grounded && margins && two_increasing;
    let is_quasi_copula = grounded && margins && monotone && lipschitz && quasi_only_boundary_ok;
    Ok(VerificationReport {
        mode,
        passed: match mode {
            GridMode::Copula => is_copula,
            GridMode::Quasi => is_quasi_copula,
        },
        is_copula,
        is_quasi_copula,
        grounded,
        margins,
        monotone,
        lipschitz,
        two_increasing,
        quasi_only_boundary_ok,
        min_cell_volume,
        worst_cell,
        grounded_error,
        margin_error,
        monotone_violation,
        lipschitz_excess,
        min_boundary_volume,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    FirstDominates,
    SecondDominates,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub relation: Relation,
    /// `(u, v)` with `u < v` maximizing `|d(u, v)·d(v, u)|` among mirror
    /// pairs of opposite sign, where `d = C₁ − C₂`.
    pub witness_pair: Option<(f64, f64)>,
    pub product: Option<f64>,
    pub max_difference: f64,
    pub min_difference: f64,
}

pub fn compare(first: &GridCopula, second: &GridCopula) -> Result<ComparisonResult> {
    if first.mesh() != second.mesh() {
        return Err(Error::MeshMismatch);
    }
    let mesh = first.mesh();
    let n = mesh.len();
    let d = |i: usize, j: usize| first.value(i, j) - second.value(i, j);

    let mut max_difference = f64::NEG_INFINITY;
    let mut min_difference = f64::INFINITY;
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let v = d(i, j);
            max_difference = max_difference.max(v);
            min_difference = min_difference.min(v);
            if i < j {
                let p = v * d(j, i);
                if p < 0.0 && best.is_none_or(|(_, _, b)| p < b) {
                    best = Some((i, j, p));
                }
            }
        }
    }

    let relation = if max_difference <= ORDER_TOL && min_difference >= -ORDER_TOL {
        Relation::Equal
    } else if min_difference >= -ORDER_TOL {
        Relation::FirstDominates
    } else if max_difference <= ORDER_TOL {
        Relation::SecondDominates
    } else {
        Relation::Incomparable
    };
    let witness = best.filter(|_| relation == Relation::Incomparable);
    Ok(ComparisonResult {
        relation,
        witness_pair: witness.map(|(i, j, _)| (mesh[i], mesh[j])),
        product: witness.map(|(_, _, p)| p),
        max_difference,
        min_difference,
    })
}

/// Pointwise supremum of all copulas with a given track section.
///
/// On the identity track this is the closed form
/// `min{x, y, y − ½(TV_{x,y}(ζ) + ζ(x) + ζ(y))}` for `x ≤ y`, mirrored for
/// `x ≥ y`. On other tracks it is `C_{ψ_L}` on or above the track and
/// `C_{ψ_U}` below it.
#[derive(Debug, Clone)]
pub struct UpperBound {
    spec: Arc<DiagonalSpec>,
    /// Cumulative total variation of `ζ` from 0, on identity tracks.
    cumulative_tv: Option<PlFunction>,
    above: CopulaCpsi,
    below: CopulaCpsi,
}

impl UpperBound {
    pub fn new(spec: &Arc<DiagonalSpec>) -> Result<Self> {
        let bounds = psi_bounds(spec)?;
        let above = CopulaCpsi::new(quadruplet(spec, &bounds.lower)?)?;
        let below = CopulaCpsi::new(quadruplet(spec, &bounds.upper)?)?;
        let cumulative_tv = spec.track().is_identity().then(|| {
            let zeta = spec.zeta();
            let up = zeta.positive_variation_majorant();
            let down = zeta.negate().positive_variation_majorant();
            up.combine(&down, crate::funcspace::CombineOp::Add)
        });
        Ok(UpperBound { spec: Arc::clone(spec), cumulative_tv, above, below })
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        match &self.cumulative_tv {
            Some(tv) => {
                let zeta = self.spec.zeta();
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                let gap = tv.at(hi) - tv.at(lo) + zeta.at(lo) + zeta.at(hi);
                let diag = hi - 0.5 * gap;
                lo.min(diag).max(0.0)
            }
            None => self.by_selection(x, y),
        }
    }

    /// `C_{ψ_L}` for `y ≥ φ(x)`, else `C_{ψ_U}`.
    pub fn by_selection(&self, x: f64, y: f64) -> f64 {
        if y >= self.spec.track().apply(x) {
            self.above.value(x, y)
        } else {
            self.below.value(x, y)
        }
    }

    pub fn grid(&self, mesh: &[f64]) -> Result<GridCopula> {
        GridCopula::from_fn(mesh.to_vec(), |x, y| self.value(x, y))
    }
}

/// One-off evaluation of the pointwise upper bound.
pub fn pointwise_upper_bound(spec: &Arc<DiagonalSpec>, x: f64, y: f64) -> Result<f64> {
    Ok(UpperBound::new(spec)?.value(x, y))
}

/// Checkerboard mass below the track in the strip `[0, x_i] × [0, 1]`, on
/// the grid mesh.
///
/// Each cell's volume is spread uniformly over the cell and apportioned by
/// the exact area of the cell lying under `y = φ(x)`.
pub fn extract_psi(grid: &GridCopula, track: &Track) -> Result<PlFunction> {
    let report = check_grid(grid, GridMode::Copula)?;
    if !report.is_copula {
        return Err(Error::NotACopula(format!(
            "min cell volume {:.3e} at {:?}, grounded error {:.3e}, margin error {:.3e}",
            report.min_cell_volume, report.worst_cell, report.grounded_error, report.margin_error
        )));
    }
    let mesh = grid.mesh();
    let phi = track.phi();
    let mut psi = Vec::with_capacity(mesh.len());
    psi.push(0.0);
    for i in 0..mesh.len() - 1 {
        let (x0, x1) = (mesh[i], mesh[i + 1]);
        let (p0, p1) = (phi.at(x0), phi.at(x1));
        let breaks = column_breaks(track, x0, x1);
        let mut mass = 0.0;
        for j in 0..mesh.len() - 1 {
            let (y0, y1) = (mesh[j], mesh[j + 1]);
            if y0 >= p1 {
                break;
            }
            let fraction = if y1 <= p0 { 1.0 } else { area_below(phi, &breaks, y0, y1) / ((x1 - x0) * (y1 - y0)) };
            mass += grid.cell_volume(i, j) * fraction;
        }
        psi.push(psi[i] + mass);
    }
    PlFunction::new(mesh.to_vec(), psi)
}

/// `x0`, the knots of `φ` strictly inside `(x0, x1)`, and `x1`.
fn column_breaks(track: &Track, x0: f64, x1: f64) -> Vec<f64> {
    let xs = track.phi().xs();
    let mut out = vec![x0];
    out.extend(xs.iter().copied().filter(|&k| k > x0 && k < x1));
    out.push(x1);
    out
}

/// `∫ clamp(φ(u) − y0, 0, y1 − y0) du` over the column spanned by `breaks`.
fn area_below(phi: &PlFunction, breaks: &[f64], y0: f64, y1: f64) -> f64 {
    let h = y1 - y0;
    let clipped = |u: f64| (phi.at(u) - y0).clamp(0.0, h);
    let mut area = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (phi.at(a), phi.at(b));
        // φ is linear on [a, b]; split where it crosses y0 or y1
        let mut pts = vec![a];
        for level in [y0, y1] {
            if fa < level && level < fb {
                pts.push(a + (b - a) * ((level - fa) / (fb - fa)));
            }
        }
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        for s in pts.windows(2) {
            area += (s[1] - s[0]) * clipped(0.5 * (s[0] + s[1]));
        }
    }
    area
}

/// The undominated copula above a grid copula, with diagnostics.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub copula: CopulaCpsi,
    /// `ψ` as extracted, before projection onto the eligible set.
    pub raw_psi: PlFunction,
    /// Sup-norm distance moved by the projection; zero when the raw `ψ` is
    /// already eligible.
    pub projection_distance: f64,
    pub grid: GridCopula,
    /// `max (envelope − input)` over the mesh.
    pub max_gain: f64,
    /// `min (envelope − input)` over the mesh.
    pub min_gain: f64,
}

/// Extracts `ψ` from a grid copula whose track section matches `spec` and
/// returns `C_ψ`, which dominates the input up to discretization.
///
/// A raw `ψ` that misses eligibility only by discretization error is
/// replaced by its nearest eligible function in sup norm; a distance above
/// `2/n` is reported as an error.
pub fn dominating_envelope(grid: &GridCopula, spec: &Arc<DiagonalSpec>) -> Result<Envelope> {
    let mesh = grid.mesh();
    validate_mesh(mesh)?;
    let limit = 2.0 / mesh.len() as f64;
    let track = spec.track();
    for &x in mesh {
        let deviation = (grid.interpolate(x, track.apply(x)) - spec.delta().at(x)).abs();
        if deviation > limit {
            return Err(Error::TrackSectionMismatch { at: x, deviation });
        }
    }

    let raw_psi = extract_psi(grid, track)?;
    let mut candidate = quadruplet(spec, &raw_psi)?;
    let mut projection_distance = 0.0;
    if !candidate.eligible() {
        let (projected, distance) = project_to_eligible(spec, &raw_psi);
        if distance > limit {
            return Err(Error::IneligibleExtractedPsi { distance, limit });
        }
        candidate = quadruplet(spec, &projected)?;
        projection_distance = distance;
    }

    let copula = CopulaCpsi::new(candidate)?;
    let env = copula.grid(mesh)?;
    let (mut max_gain, mut min_gain) = (f64::NEG_INFINITY, f64::INFINITY);
    for (a, b) in env.rows().flatten().zip(grid.rows().flatten()) {
        max_gain = max_gain.max(a - b);
        min_gain = min_gain.min(a - b);
    }
    Ok(Envelope { copula, raw_psi, projection_distance, grid: env, max_gain, min_gain })
}

/// Nearest eligible `ψ` to `target` in sup norm over the knots of `target`
/// and `spec`, and its distance.
///
/// For a trial distance `ε` the feasible values at each knot form an
/// interval propagated forward through the per-segment increment bounds;
/// the smallest feasible `ε` is found by bisection and a path is recovered
/// backward through the intervals.
pub(crate) fn project_to_eligible(spec: &DiagonalSpec, target: &PlFunction) -> (PlFunction, f64) {
    let knots = union_knots(target.xs(), spec.knots());
    let p = target.sample_at(&knots);
    let bounds = spec.increment_bounds(&knots);

    let intervals = |eps: f64| -> Option<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(knots.len());
        out.push((0.0, 0.0));
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            let (a, b) = out[k];
            let lo_k = (a + lo).max(p[k + 1] - eps);
            let hi_k = (b + hi).min(p[k + 1] + eps);
            if lo_k > hi_k {
                return None;
            }
            out.push((lo_k, hi_k));
        }
        Some(out)
    };

    let lower = crate::canonical::psi_bounds(spec).map(|b| b.lower.sample_at(&knots));
    let mut hi_eps = match &lower {
        Ok(l) => l.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        Err(_) => 1.0,
    };
    let mut lo_eps = 0.0;
    if intervals(0.0).is_some() {
        hi_eps = 0.0;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo_eps + hi_eps);
            if mid <= lo_eps || mid >= hi_eps {
                break;
            }
            if intervals(mid).is_some() {
                hi_eps = mid;
            } else {
                lo_eps = mid;
            }
        }
    }
    let iv = intervals(hi_eps).or_else(|| intervals(hi_eps * (1.0 + 1e-12) + 1e-15)).expect("feasible by construction");

    let n = knots.len();
    let mut psi = vec![0.0; n];
    psi[n - 1] = p[n - 1].clamp(iv[n - 1].0, iv[n - 1].1);
    for k in (0..n - 1).rev() {
        let (lo, hi) = bounds[k];
        let a = iv[k].0.max(psi[k + 1] - hi);
        let b = iv[k].1.min(psi[k + 1] - lo);
        psi[k] = if a <= b { p[k].clamp(a, b) } else { 0.5 * (a + b) };
    }
    psi[0] = 0.0;
    let distance = psi.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (PlFunction::from_sorted_points(knots.into_iter().zip(psi)), distance)
}

/// Resolves a selector and samples the resulting `C_ψ` on a mesh.
pub fn selector_grid(spec: &Arc<DiagonalSpec>, selector: &PsiSelector, mesh: &[f64]) -> Result<GridCopula> {
    CopulaCpsi::new(selector.resolve(spec)?)?.grid(mesh)
}
