//! Built-in track sections on the identity track.

use std::f64::consts::PI;

use crate::funcspace::{uniform_knots, PlFunction};

/// `δ(t) = t`, the diagonal of `M`.
pub fn m_diag() -> PlFunction {
    PlFunction::identity()
}

/// `δ(t) = max(2t − 1, 0)`, the diagonal of `W`.
pub fn w_diag() -> PlFunction {
    PlFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 1.0]).expect("valid knots")
}

/// `δ(t) = t²` sampled on `n` uniform knots.
pub fn indep(n: usize) -> PlFunction {
    PlFunction::sample(n, |t| t * t)
}

/// `δ(t) = t − sin²(2πt)/(2π)` sampled on `n` uniform knots.
pub fn fig1(n: usize) -> PlFunction {
    sampled(n, |t| t - (2.0 * PI * t).sin().powi(2) / (2.0 * PI))
}

/// `δ(t) = t − sin(πt)/π` sampled on `n` uniform knots.
pub fn fig2(n: usize) -> PlFunction {
    sampled(n, |t| t - (PI * t).sin() / PI)
}

/// Samples `f`, snapping the endpoints and the exact zeros of the gap
/// `t − f(t)` that float evaluation of `sin` would miss.
fn sampled(n: usize, f: impl Fn(f64) -> f64) -> PlFunction {
    let xs = uniform_knots(n);
    let ys = xs
        .iter()
        .map(|&t| if t == 0.0 || t == 0.5 && n % 2 == 1 || t == 1.0 { exact_at(t, &f) } else { f(t) })
        .collect();
    PlFunction::new(xs, ys).expect("sampled knots are valid")
}

fn exact_at(t: f64, f: &impl Fn(f64) -> f64) -> f64 {
    let v = f(t);
    let snapped = [0.0, t, 1.0].into_iter().find(|&c| (v - c).abs() < 1e-15);
    snapped.unwrap_or(v).max(0.0)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["m-diag", "w-diag", "indep", "fig1", "fig2"];

/// A builtin by name, sampled on `n` knots where it is not already
/// piecewise linear.
pub fn builtin(name: &str, n: usize) -> Option<PlFunction> {
    match name {
        "m-diag" => Some(m_diag()),
        "w-diag" => Some(w_diag()),
        "indep" => Some(indep(n)),
        "fig1" => Some(fig1(n)),
        "fig2" => Some(fig2(n)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::{DiagonalSpec, Track};

    #[test]
    fn builtins_are_valid_sections() {
        for name in BUILTIN_NAMES {
            let d = builtin(name, 201).unwrap();
            DiagonalSpec::new(d, Track::identity()).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn fig1_touches_identity_at_half() {
        let d = fig1(201);
        assert_eq!(d.at(0.5), 0.5);
        assert_eq!(d.at(0.0), 0.0);
        assert_eq!(d.at(1.0), 1.0);
    }
}
