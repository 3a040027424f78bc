//! Track splices: one `C_ψ` on and above the track, another below it.

use std::sync::Arc;

use crate::canonical::PsiCandidate;
use crate::construction::{validate_mesh, CopulaCpsi, GridCopula};
use crate::error::{Error, Result};
use crate::track::DiagonalSpec;

/// `upper` where `v ≥ φ(u)`, `lower` where `v < φ(u)`. Always a
/// quasi-copula; not a copula in general.
#[derive(Debug, Clone)]
pub struct SplicedFunction {
    upper: CopulaCpsi,
    lower: CopulaCpsi,
}

impl SplicedFunction {
    pub fn new(upper: PsiCandidate, lower: PsiCandidate) -> Result<Self> {
        let same = Arc::ptr_eq(upper.spec(), lower.spec()) || **upper.spec() == **lower.spec();
        if !same {
            return Err(Error::SpecMismatch);
        }
        Ok(SplicedFunction { upper: CopulaCpsi::new(upper)?, lower: CopulaCpsi::new(lower)? })
    }

    pub fn spec(&self) -> &Arc<DiagonalSpec> {
        self.upper.spec()
    }

    pub fn upper(&self) -> &CopulaCpsi {
        &self.upper
    }

    pub fn lower(&self) -> &CopulaCpsi {
        &self.lower
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        if v >= self.spec().track().apply(u) {
            self.upper.value(u, v)
        } else {
            self.lower.value(u, v)
        }
    }

    pub fn try_value(&self, u: f64, v: f64) -> Result<f64> {
        for c in [u, v] {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::OutOfDomain(c));
            }
        }
        Ok(self.value(u, v))
    }

    pub fn grid(&self, mesh: &[f64]) -> Result<GridCopula> {
        validate_mesh(mesh)?;
        let above = self.upper.grid(mesh)?;
        let below = self.lower.grid(mesh)?;
        let track = self.spec().track();
        let rows = mesh
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let phi_u = track.apply(u);
                mesh.iter()
                    .enumerate()
                    .map(|(j, &v)| if v >= phi_u { above.value(i, j) } else { below.value(i, j) })
                    .collect()
            })
            .collect();
        GridCopula::new(mesh.to_vec(), rows)
    }
}
