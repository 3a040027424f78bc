//! The copula `C_ψ = S_ψ + T_ψ`, its region boundaries `g`, `h`, and grid
//! materialization.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::canonical::PsiCandidate;
use crate::error::{Error, Result};
use crate::funcspace::{union_knots, uniform_knots, CombineOp, PlFunction};
use crate::track::DiagonalSpec;

/// Tolerance for reporting the κ branch at a tie.
const TIE_TOL: f64 = 1e-12;

/// Float noise that may push a value just outside `[0, 1]`.
const CLAMP_NOISE: f64 = 1e-15;

/// `C_ψ(x, y) = min{x, y, ψ(x) − ψ(φ⁻¹(y)) + δ(φ⁻¹(y))}` for an eligible `ψ`.
#[derive(Debug, Clone)]
pub struct CopulaCpsi {
    candidate: PsiCandidate,
    /// Knots `t` with `ζ(t) = 0`, paired with `φ(t)`.
    zeta_zeros: Vec<(f64, f64)>,
    /// Knots `t` with `δ̃(t) = 0`, paired with `φ(t)`.
    tilde_zeros: Vec<(f64, f64)>,
    region: OnceLock<(PlFunction, PlFunction)>,
}

/// `S_ψ` and `T_ψ` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StSplit {
    pub s: f64,
    pub t: f64,
}

/// Active branch of the case form of `C_ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `C = x`, where `y ≥ h(x)`.
    UpperM,
    /// `C = κ(x, y)`, where `g(x) ≤ y ≤ h(x)`.
    Kappa,
    /// `C = y`, where `y ≤ g(x)`.
    LowerM,
}

impl CopulaCpsi {
    pub fn new(candidate: PsiCandidate) -> Result<Self> {
        candidate.ensure_eligible()?;
        let spec = candidate.spec();
        let track = spec.track();
        let zeros = |f: &PlFunction| -> Vec<(f64, f64)> {
            f.knots().filter(|&(_, v)| v <= 0.0).map(|(t, _)| (t, track.apply(t))).collect()
        };
        let zeta_zeros = zeros(spec.zeta());
        let tilde_zeros = zeros(spec.delta_tilde());
        Ok(CopulaCpsi { candidate, zeta_zeros, tilde_zeros, region: OnceLock::new() })
    }

    pub fn spec(&self) -> &Arc<DiagonalSpec> {
        self.candidate.spec()
    }

    pub fn candidate(&self) -> &PsiCandidate {
        &self.candidate
    }

    /// `κ(x, y) = ψ(x) + η(y)`, which equals `ψ(x) − ψ(φ⁻¹(y)) + δ(φ⁻¹(y))`.
    pub fn kappa(&self, x: f64, y: f64) -> f64 {
        self.candidate.psi().at(x) + self.candidate.eta().at(y)
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        if let Some(v) = self.forced_min(x, y) {
            return v;
        }
        clamp_unit(x.min(y).min(self.kappa(x, y)))
    }

    pub fn try_value(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(self.value(x, y))
    }

    /// Where the track section touches its upper bounds, every copula with
    /// that section equals `M` on the rectangles separated by the contact
    /// point: `ζ(t) = 0` forces `C(u, v) = u` for `u ≤ t`, `v ≥ φ(t)`, and
    /// `δ̃(t) = 0` forces `C(u, v) = v` for `u ≥ t`, `v ≤ φ(t)`.
    fn forced_min(&self, x: f64, y: f64) -> Option<f64> {
        let i = self.zeta_zeros.partition_point(|&(t, _)| t < x);
        if let Some(&(_, phi_t)) = self.zeta_zeros.get(i) {
            if phi_t <= y {
                return Some(x);
            }
        }
        let j = self.tilde_zeros.partition_point(|&(t, _)| t <= x);
        if j > 0 && y <= self.tilde_zeros[j - 1].1 {
            return Some(y);
        }
        None
    }

    /// `S_ψ(x, y) = ψ(x) ∧ χ(y)` and `T_ψ(x, y) = ξ(x) ∧ η(y)`.
    pub fn s_t_split(&self, x: f64, y: f64) -> StSplit {
        let c = &self.candidate;
        StSplit { s: c.psi().at(x).min(c.chi().at(y)), t: c.xi().at(x).min(c.eta().at(y)) }
    }

    /// Which case of `C_ψ` is active; ties within `1e-12` report `Kappa`.
    pub fn branch(&self, x: f64, y: f64) -> Branch {
        let value = self.value(x, y);
        if (self.kappa(x, y) - value).abs() <= TIE_TOL {
            Branch::Kappa
        } else if (value - x).abs() <= TIE_TOL {
            Branch::UpperM
        } else {
            Branch::LowerM
        }
    }

    /// `g(x) = min{φ(x), sup{y | χ(y) ≤ ψ(x)}}`; below it `C_ψ = y`.
    pub fn g_at(&self, x: f64) -> f64 {
        let c = &self.candidate;
        sup_level(c.chi(), c.psi().at(x)).min(self.spec().track().apply(x))
    }

    /// `h(x) = max{φ(x), inf{y | η(y) ≥ ξ(x)}}`; above it `C_ψ = x`.
    pub fn h_at(&self, x: f64) -> f64 {
        let c = &self.candidate;
        inf_level(c.eta(), c.xi().at(x)).max(self.spec().track().apply(x))
    }

    /// Piecewise-linear sampling of `g`, exact at its knots.
    pub fn g(&self) -> &PlFunction {
        &self.region().0
    }

    /// Piecewise-linear sampling of `h`, exact at its knots.
    pub fn h(&self) -> &PlFunction {
        &self.region().1
    }

    fn region(&self) -> &(PlFunction, PlFunction) {
        self.region.get_or_init(|| region_functions_of(&self.candidate))
    }

    pub fn grid(&self, mesh: &[f64]) -> Result<GridCopula> {
        materialize_grid(self, mesh)
    }
}

/// One-off evaluation of `C_ψ`.
pub fn c_psi_value(candidate: &PsiCandidate, x: f64, y: f64) -> Result<f64> {
    CopulaCpsi::new(candidate.clone())?.try_value(x, y)
}

/// Region boundaries `(g, h)` as piecewise-linear functions.
///
/// Knots are those of `ψ` plus every `x` where `ψ(x)` hits a knot value of
/// `χ` or `ξ(x)` hits a knot value of `η`, so both are exact at knots and
/// linear between them wherever they are continuous. A jump of `g` or `h`
/// (from a flat stretch of `χ` or `η`) shows up as a vertical step at a
/// knot pair.
pub fn region_functions(candidate: &PsiCandidate) -> Result<(PlFunction, PlFunction)> {
    candidate.ensure_eligible()?;
    Ok(region_functions_of(candidate))
}

fn region_functions_of(c: &PsiCandidate) -> (PlFunction, PlFunction) {
    let phi = c.spec().track().phi();
    let mut xs = c.psi().xs().to_vec();
    xs = union_knots(&xs, &preimages(c.psi(), c.chi().ys()));
    xs = union_knots(&xs, &preimages(c.xi(), c.eta().ys()));
    let sup = PlFunction::from_sorted_points(xs.iter().map(|&x| (x, sup_level(c.chi(), c.psi().at(x)))));
    let inf = PlFunction::from_sorted_points(xs.iter().map(|&x| (x, inf_level(c.eta(), c.xi().at(x)))));
    (phi.combine(&sup, CombineOp::Min), phi.combine(&inf, CombineOp::Max))
}

/// Points where the increasing function `f` crosses any of `levels` inside
/// one of its segments.
fn preimages(f: &PlFunction, levels: &[f64]) -> Vec<f64> {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for k in 0..f.len() - 1 {
        let (x0, x1, v0, v1) = (f.xs()[k], f.xs()[k + 1], f.ys()[k], f.ys()[k + 1]);
        if v1 <= v0 {
            continue;
        }
        let from = sorted.partition_point(|&l| l <= v0);
        let to = sorted.partition_point(|&l| l < v1);
        out.extend(sorted[from..to].iter().map(|&l| root_on_segment(x0, x1, v0, v1, l)));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// `sup{y | f(y) ≤ level}` for increasing `f` on `[0, 1]`, or 0 if empty.
fn sup_level(f: &PlFunction, level: f64) -> f64 {
    let (ys, vs) = (f.xs(), f.ys());
    let j = vs.partition_point(|&v| v <= level);
    if j == 0 {
        0.0
    } else if j == vs.len() {
        1.0
    } else {
        root_on_segment(ys[j - 1], ys[j], vs[j - 1], vs[j], level)
    }
}

/// `inf{y | f(y) ≥ level}` for increasing `f` on `[0, 1]`, or 1 if empty.
fn inf_level(f: &PlFunction, level: f64) -> f64 {
    let (ys, vs) = (f.xs(), f.ys());
    let i = vs.partition_point(|&v| v < level);
    if i == 0 {
        0.0
    } else if i == vs.len() {
        1.0
    } else {
        root_on_segment(ys[i - 1], ys[i], vs[i - 1], vs[i], level)
    }
}

fn root_on_segment(y0: f64, y1: f64, v0: f64, v1: f64, level: f64) -> f64 {
    if v1 <= v0 {
        return y0;
    }
    (y0 + (y1 - y0) * ((level - v0) / (v1 - v0))).clamp(y0, y1)
}

/// Values of a bivariate function on a square mesh; `value(i, j)` is the
/// function at `(mesh[i], mesh[j])` with `i` indexing the first argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCopula {
    mesh: Vec<f64>,
    values: Vec<f64>,
}

impl GridCopula {
    pub fn new(mesh: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_mesh(&mesh)?;
        let n = mesh.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadMesh(format!("value matrix is not {n} x {n}")));
        }
        Ok(GridCopula { mesh, values: rows.concat() })
    }

    pub fn from_fn(mesh: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        validate_mesh(&mesh)?;
        let values = mesh.iter().flat_map(|&x| mesh.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
        Ok(GridCopula { mesh, values })
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    pub fn size(&self) -> usize {
        self.mesh.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.mesh.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.mesh.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.mesh.len())
    }

    /// C-volume of the mesh cell `[x_i, x_{i+1}] × [y_j, y_{j+1}]`.
    pub fn cell_volume(&self, i: usize, j: usize) -> f64 {
        self.value(i + 1, j + 1) - self.value(i, j + 1) - self.value(i + 1, j) + self.value(i, j)
    }

    /// Bilinear interpolation between mesh points.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let (i, s) = locate(&self.mesh, x);
        let (j, t) = locate(&self.mesh, y);
        let v00 = self.value(i, j);
        let v01 = self.value(i, j + 1);
        let v10 = self.value(i + 1, j);
        let v11 = self.value(i + 1, j + 1);
        (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11)
    }

    /// Largest absolute difference to another grid on the same mesh.
    pub fn max_abs_diff(&self, other: &GridCopula) -> Result<f64> {
        if self.mesh != other.mesh {
            return Err(Error::MeshMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Cell index and fractional offset of `x` in the mesh.
fn locate(mesh: &[f64], x: f64) -> (usize, f64) {
    let x = x.clamp(0.0, 1.0);
    let i = mesh.partition_point(|&m| m <= x).clamp(1, mesh.len() - 1) - 1;
    let (a, b) = (mesh[i], mesh[i + 1]);
    (i, ((x - a) / (b - a)).clamp(0.0, 1.0))
}

pub(crate) fn validate_mesh(mesh: &[f64]) -> Result<()> {
    if mesh.len() < 2 {
        return Err(Error::BadMesh("need at least two mesh points".into()));
    }
    if mesh[0] != 0.0 || mesh[mesh.len() - 1] != 1.0 {
        return Err(Error::BadMesh("mesh must start at 0 and end at 1".into()));
    }
    if mesh.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::BadMesh("mesh must be strictly increasing".into()));
    }
    Ok(())
}

/// Samples `C_ψ` on the mesh.
pub fn materialize_grid(copula: &CopulaCpsi, mesh: &[f64]) -> Result<GridCopula> {
    validate_mesh(mesh)?;
    let c = copula.candidate();
    let psi: Vec<f64> = c.psi().sample_at(mesh);
    let eta: Vec<f64> = c.eta().sample_at(mesh);
    let mut values = Vec::with_capacity(mesh.len() * mesh.len());
    for (&x, &p) in mesh.iter().zip(&psi) {
        for (&y, &e) in mesh.iter().zip(&eta) {
            let v = copula.forced_min(x, y).unwrap_or_else(|| clamp_unit(x.min(y).min(p + e)));
            values.push(v);
        }
    }
    Ok(GridCopula { mesh: mesh.to_vec(), values })
}

/// `n` uniform points merged with the section knots, their track images and
/// any extra knots (with their track images). Uniform points closer than
/// `1e-12` to a knot are dropped in favour of the knot.
pub fn default_mesh(n: usize, spec: &DiagonalSpec, extra: &[f64]) -> Vec<f64> {
    let track = spec.track();
    let base = union_knots(spec.knots(), extra);
    let images: Vec<f64> = base.iter().map(|&x| track.apply(x)).collect();
    let knots = union_knots(&base, &images);
    let near_knot = |u: f64| {
        let k = knots.partition_point(|&v| v < u);
        let below = k > 0 && u - knots[k - 1] <= 1e-12;
        let above = k < knots.len() && knots[k] - u <= 1e-12;
        below || above
    };
    let uniform: Vec<f64> = uniform_knots(n.max(2)).into_iter().filter(|&u| !near_knot(u)).collect();
    union_knots(&knots, &uniform)
}

fn clamp_unit(v: f64) -> f64 {
    if (-CLAMP_NOISE..0.0).contains(&v) {
        0.0
    } else if v > 1.0 && v <= 1.0 + CLAMP_NOISE {
        1.0
    } else {
        v
    }
}

fn check_unit(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(v))
    }
}
