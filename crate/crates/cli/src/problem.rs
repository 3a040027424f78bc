//! JSON problem files: track, track section, `ψ` choice and mesh size.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use trackcop::diagonals::{builtin, BUILTIN_NAMES};
use trackcop::{DiagonalSpec, PlFunction, PsiSelector, Track};

use crate::io::read_function;
use crate::Failure;

pub const DEFAULT_MESH: usize = 201;

/// A function given by name or by knots.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FunctionField {
    Name(String),
    Knots { x: Vec<f64>, y: Vec<f64> },
}

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub track: Option<FunctionField>,
    pub diagonal: FunctionField,
    #[serde(default)]
    pub psi: Option<FunctionField>,
    #[serde(default)]
    pub mesh: Option<usize>,
}

/// A parsed problem whose functions are well formed but whose track
/// section has not been validated yet.
#[derive(Debug, Clone)]
pub struct Problem {
    pub delta: PlFunction,
    pub track: Track,
    pub psi: Option<FunctionField>,
    pub mesh_size: usize,
    pub tol: f64,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Malformed(anyhow!("invalid problem file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .map_err(Failure::Malformed)?;
        Self::from_json(&text)
    }

    /// Resolves functions; `mesh` overrides the file's mesh size.
    pub fn load(&self, mesh: Option<usize>, tol: f64) -> Result<Problem, Failure> {
        let mesh_size = mesh.or(self.mesh).unwrap_or(DEFAULT_MESH);
        if mesh_size < 3 {
            return Err(Failure::Malformed(anyhow!("mesh must have at least 3 points, got {mesh_size}")));
        }
        let track = match &self.track {
            None => Track::identity(),
            Some(FunctionField::Name(name)) if name == "identity" => Track::identity(),
            Some(FunctionField::Name(name)) => {
                return Err(Failure::Malformed(anyhow!("unknown track {name:?}; use \"identity\" or knots")))
            }
            Some(FunctionField::Knots { x, y }) => Track::new(knots(x, y).map_err(Failure::Malformed)?)
                .map_err(|e| Failure::Malformed(e.into()))?,
        };
        let delta = match &self.diagonal {
            FunctionField::Name(name) => builtin(name, mesh_size).ok_or_else(|| {
                Failure::Malformed(anyhow!("unknown diagonal {name:?}; builtins are {}", BUILTIN_NAMES.join(", ")))
            })?,
            FunctionField::Knots { x, y } => knots(x, y).map_err(Failure::Malformed)?,
        };
        Ok(Problem { delta, track, psi: self.psi.clone(), mesh_size, tol })
    }
}

impl Problem {
    /// Validates the track section.
    pub fn spec(&self) -> Result<Arc<DiagonalSpec>, Failure> {
        DiagonalSpec::with_tol(self.delta.clone(), self.track.clone(), self.tol)
            .map(Arc::new)
            .map_err(|e| Failure::Rejected(e.into()))
    }

    /// The file's `ψ` choice, defaulting to the lower bound.
    pub fn selector(&self) -> Result<PsiSelector, Failure> {
        match &self.psi {
            None => Ok(PsiSelector::Lower),
            Some(FunctionField::Name(name)) => parse_selector(name),
            Some(FunctionField::Knots { x, y }) => {
                knots(x, y).map(PsiSelector::Explicit).map_err(Failure::Malformed)
            }
        }
    }
}

fn knots(x: &[f64], y: &[f64]) -> anyhow::Result<PlFunction> {
    Ok(PlFunction::new(x.to_vec(), y.to_vec())?)
}

/// `lower`, `upper` or `blend:t`.
pub fn parse_selector(text: &str) -> Result<PsiSelector, Failure> {
    let parse = || -> anyhow::Result<PsiSelector> {
        match text {
            "lower" => Ok(PsiSelector::Lower),
            "upper" => Ok(PsiSelector::Upper),
            _ => {
                let Some(t) = text.strip_prefix("blend:") else {
                    bail!("unknown psi {text:?}; use lower, upper, blend:t or a function CSV");
                };
                let t: f64 = t.parse().with_context(|| format!("bad blend weight in {text:?}"))?;
                if !(0.0..=1.0).contains(&t) {
                    bail!("blend weight {t} outside [0, 1]");
                }
                Ok(PsiSelector::Blend(t))
            }
        }
    };
    parse().map_err(Failure::Malformed)
}

/// A selector keyword, or a path to a two-column function CSV.
pub fn parse_selector_arg(text: &str) -> Result<PsiSelector, Failure> {
    let path = Path::new(text);
    if path.is_file() {
        return read_function(path).map(PsiSelector::Explicit).map_err(Failure::Malformed);
    }
    parse_selector(text)
}
