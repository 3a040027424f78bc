//! Piecewise-linear functions on `[0, 1]` and their variation calculus.
//!
//! Every univariate object in the crate (tracks, diagonals, the canonical
//! functions, region boundaries) is a [`PlFunction`]. Restricting to the
//! piecewise-linear class makes total, positive and negative variation exact
//! finite sums over knot increments.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute slack for identities that hold exactly in real arithmetic.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Default slack for validating user input (monotonicity, eligibility, existence).
pub const DEFAULT_TOL: f64 = 1e-9;

/// A continuous piecewise-linear function on `[0, 1]`.
///
/// Knots are strictly increasing, start at 0 and end at 1. Evaluation at a
/// knot returns the stored ordinate bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

/// Total, positive and negative variation over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct VariationTriple {
    pub tv: f64,
    pub vplus: f64,
    pub vminus: f64,
}

/// Pointwise binary operations closed over the piecewise-linear class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Sub,
    Min,
    Max,
}

impl PlFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::MalformedKnots(format!(
                "{} abscissas but {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::MalformedKnots("need at least two knots".into()));
        }
        if let Some(bad) = xs.iter().chain(ys.iter()).find(|v| !v.is_finite()) {
            return Err(Error::MalformedKnots(format!("non-finite value {bad}")));
        }
        if xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 {
            return Err(Error::MalformedKnots(format!(
                "abscissas must run from 0 to 1, got {} .. {}",
                xs[0],
                xs[xs.len() - 1]
            )));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::MalformedKnots(format!(
                "abscissas not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(PlFunction { xs, ys })
    }

    /// Builds from points that are known to be sorted, dropping any abscissa
    /// that does not strictly exceed its predecessor.
    pub(crate) fn from_sorted_points(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for (x, y) in points {
            if let Some(&last) = xs.last() {
                if x <= last {
                    continue;
                }
            }
            xs.push(x);
            ys.push(y);
        }
        debug_assert!(xs.len() >= 2 && xs[0] == 0.0 && xs[xs.len() - 1] == 1.0);
        PlFunction { xs, ys }
    }

    pub fn identity() -> Self {
        PlFunction { xs: vec![0.0, 1.0], ys: vec![0.0, 1.0] }
    }

    pub fn constant(c: f64) -> Self {
        PlFunction { xs: vec![0.0, 1.0], ys: vec![c, c] }
    }

    /// Samples `f` on `n ≥ 2` uniformly spaced knots.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let xs = uniform_knots(n);
        let ys = xs.iter().map(|&x| f(x)).collect();
        PlFunction { xs, ys }
    }

    /// Evaluates `f` on the given knots, which must be a valid knot vector.
    pub fn from_fn_on(knots: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        PlFunction::new(knots.to_vec(), knots.iter().map(|&x| f(x)).collect())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.at(x))
    }

    /// Evaluates after clamping `x` into `[0, 1]`.
    pub fn at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.xs.partition_point(|&k| k <= x);
        // x >= xs[0] = 0 so i >= 1
        let (x0, y0) = (self.xs[i - 1], self.ys[i - 1]);
        if x0 == x || i == self.xs.len() {
            return y0;
        }
        let (x1, y1) = (self.xs[i], self.ys[i]);
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    /// Values at each of `knots`.
    pub fn sample_at(&self, knots: &[f64]) -> Vec<f64> {
        knots.iter().map(|&x| self.at(x)).collect()
    }

    /// Re-expresses the function on the union of its knots and `extra`.
    pub fn refine(&self, extra: &[f64]) -> Self {
        let xs = union_knots(&self.xs, extra);
        let ys = self.sample_at(&xs);
        PlFunction { xs, ys }
    }

    pub fn scale(&self, c: f64) -> Self {
        PlFunction { xs: self.xs.clone(), ys: self.ys.iter().map(|y| c * y).collect() }
    }

    pub fn negate(&self) -> Self {
        PlFunction { xs: self.xs.clone(), ys: self.ys.iter().map(|y| -y).collect() }
    }

    /// Exact variations of the interpolant on `[a, b]`.
    pub fn variation(&self, a: f64, b: f64) -> Result<VariationTriple> {
        for v in [a, b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfDomain(v));
            }
        }
        if a > b {
            return Err(Error::OutOfDomain(a));
        }
        if a == b {
            return Ok(VariationTriple::default());
        }
        let first = self.xs.partition_point(|&k| k <= a);
        let last = self.xs.partition_point(|&k| k < b);
        let inner = self.ys[first..last].iter().copied();
        let values = std::iter::once(self.at(a)).chain(inner).chain(std::iter::once(self.at(b)));

        let (mut vplus, mut vminus) = (0.0, 0.0);
        let mut prev: Option<f64> = None;
        for y in values {
            if let Some(p) = prev {
                let d = y - p;
                if d > 0.0 {
                    vplus += d;
                } else {
                    vminus -= d;
                }
            }
            prev = Some(y);
        }
        Ok(VariationTriple { tv: vplus + vminus, vplus, vminus })
    }

    /// `x ↦ V⁺₀ₓ(f)`: the least increasing function vanishing at 0 whose
    /// difference with `f` is increasing.
    pub fn positive_variation_majorant(&self) -> Self {
        let mut acc = 0.0;
        let mut ys = Vec::with_capacity(self.len());
        ys.push(0.0);
        for w in self.ys.windows(2) {
            acc += (w[1] - w[0]).max(0.0);
            ys.push(acc);
        }
        PlFunction { xs: self.xs.clone(), ys }
    }

    /// True iff every knot increment is at least `-tol`.
    pub fn is_increasing(&self, tol: f64) -> bool {
        self.first_decrease(tol).is_none()
    }

    /// Left end of the first segment whose increment is below `-tol`.
    pub fn first_decrease(&self, tol: f64) -> Option<(f64, f64)> {
        self.ys
            .windows(2)
            .position(|w| w[1] - w[0] < -tol)
            .map(|i| (self.xs[i], self.ys[i + 1] - self.ys[i]))
    }

    /// Pointwise combination on the union of both knot sets. `Min`/`Max` also
    /// insert the exact crossing points of the two interpolants.
    pub fn combine(&self, other: &PlFunction, op: CombineOp) -> Self {
        let xs = union_knots(&self.xs, &other.xs);
        let a = self.sample_at(&xs);
        let b = other.sample_at(&xs);
        match op {
            CombineOp::Add => PlFunction { ys: zip_with(&a, &b, |p, q| p + q), xs },
            CombineOp::Sub => PlFunction { ys: zip_with(&a, &b, |p, q| p - q), xs },
            CombineOp::Min | CombineOp::Max => {
                let pick = |p: f64, q: f64| if op == CombineOp::Min { p.min(q) } else { p.max(q) };
                let mut out_x = Vec::with_capacity(xs.len());
                let mut out_y = Vec::with_capacity(xs.len());
                for k in 0..xs.len() {
                    if k > 0 {
                        let d0 = a[k - 1] - b[k - 1];
                        let d1 = a[k] - b[k];
                        if (d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0) {
                            let (x0, x1) = (xs[k - 1], xs[k]);
                            let xc = x0 + (x1 - x0) * (d0 / (d0 - d1));
                            if xc > x0 && xc < x1 {
                                out_x.push(xc);
                                out_y.push(pick(self.at(xc), other.at(xc)));
                            }
                        }
                    }
                    out_x.push(xs[k]);
                    out_y.push(pick(a[k], b[k]));
                }
                PlFunction { xs: out_x, ys: out_y }
            }
        }
    }

    /// Largest absolute difference; exact for piecewise-linear functions.
    pub fn max_abs_diff(&self, other: &PlFunction) -> f64 {
        let xs = union_knots(&self.xs, &other.xs);
        xs.iter().map(|&x| (self.at(x) - other.at(x)).abs()).fold(0.0, f64::max)
    }

    /// Swaps the roles of abscissas and ordinates. Requires strictly
    /// increasing ordinates from 0 to 1.
    pub fn inverse(&self) -> Result<Self> {
        PlFunction::new(self.ys.clone(), self.xs.clone())
    }
}

/// `n` uniformly spaced points from 0 to 1 inclusive.
pub fn uniform_knots(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two knots");
    let last = (n - 1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

/// Sorted union of two sorted knot vectors, exact duplicates removed.
pub fn union_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) if p < q => {
                i += 1;
                p
            }
            (Some(&p), Some(&q)) if q < p => {
                j += 1;
                q
            }
            (Some(&p), Some(_)) => {
                i += 1;
                j += 1;
                p
            }
            (Some(&p), None) => {
                i += 1;
                p
            }
            (None, Some(&q)) => {
                j += 1;
                q
            }
            (None, None) => unreachable!(),
        };
        if out.last().is_none_or(|&l| next > l) {
            out.push(next);
        }
    }
    out
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&p, &q)| f(p, q)).collect()
}

/// Maximum-sum contiguous run of `values`, returned as `(sum, start, end)`
/// with `end` exclusive. Ties prefer the shortest, earliest run.
pub(crate) fn max_subarray(values: &[f64]) -> (f64, usize, usize) {
    let mut best = (f64::NEG_INFINITY, 0, 0);
    let mut cur = 0.0;
    let mut start = 0;
    for (k, &v) in values.iter().enumerate() {
        if cur <= 0.0 {
            cur = 0.0;
            start = k;
        }
        cur += v;
        if cur > best.0 {
            best = (cur, start, k + 1);
        }
    }
    best
}
