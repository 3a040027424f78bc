//! Subcommand implementations behind the `trackcop` binary. Each command
//! returns its exit code or a [`Failure`] that carries one.

pub mod io;
pub mod problem;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, Context};
use serde::Serialize;
use trackcop::{
    check_conditions, check_grid, compare as compare_grids, default_mesh, dominating_envelope, existence_check_raw,
    psi_bounds, union_knots, CopulaCpsi, DiagonalSpec, GridMode, PsiCandidate, PsiSelector, Relation,
    SplicedFunction,
};

use crate::io::{read_grid, write_columns, write_function, write_grid};
use crate::problem::{parse_selector_arg, Problem, ProblemSpec};

/// Exit codes shared by all commands.
pub mod exit {
    pub const OK: i32 = 0;
    pub const REJECTED: i32 = 1;
    pub const MALFORMED: i32 = 2;
    pub const INCOMPARABLE: i32 = 3;
    pub const DOMINANCE: i32 = 4;
}

/// A command failure: unreadable input, or input that is well formed but
/// mathematically rejected.
#[derive(Debug)]
pub enum Failure {
    Malformed(anyhow::Error),
    Rejected(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Malformed(_) => exit::MALFORMED,
            Failure::Rejected(_) => exit::REJECTED,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Malformed(e) => write!(f, "malformed input: {e:#}"),
            Failure::Rejected(e) => write!(f, "{e:#}"),
        }
    }
}

/// Output failures are reported as rejections.
fn output<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Rejected)
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub out: PathBuf,
    pub mesh: Option<usize>,
    pub tol: f64,
    pub quiet: bool,
}

impl Settings {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn out_file(&self, name: &str) -> Result<PathBuf, Failure> {
        output(fs::create_dir_all(&self.out).with_context(|| format!("cannot create {}", self.out.display())))?;
        Ok(self.out.join(name))
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf, Failure> {
        let path = self.out_file(name)?;
        let text = output(serde_json::to_string_pretty(value).map_err(anyhow::Error::from))?;
        output(fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display())))?;
        Ok(path)
    }

    fn load(&self, spec_path: &Path) -> Result<Problem, Failure> {
        ProblemSpec::read(spec_path)?.load(self.mesh, self.tol)
    }
}

fn resolve(spec: &Arc<DiagonalSpec>, selector: &PsiSelector) -> Result<CopulaCpsi, Failure> {
    let candidate = selector.resolve(spec).map_err(|e| Failure::Rejected(e.into()))?;
    CopulaCpsi::new(candidate).map_err(|e| Failure::Rejected(e.into()))
}

fn mesh_for(problem: &Problem, spec: &DiagonalSpec, candidates: &[&PsiCandidate]) -> Vec<f64> {
    let extra = candidates.iter().fold(Vec::new(), |acc, c| union_knots(&acc, c.psi().xs()));
    default_mesh(problem.mesh_size, spec, &extra)
}

#[derive(Serialize)]
struct ValidationReport {
    conditions: Vec<trackcop::ConditionResult>,
    existence: trackcop::ExistenceReport,
}

/// Checks the admissibility conditions and the existence criterion.
pub fn validate(spec_path: &Path, settings: &Settings) -> Result<i32, Failure> {
    let problem = settings.load(spec_path)?;
    let conditions = check_conditions(&problem.delta, &problem.track, problem.tol);
    for c in &conditions {
        match c.at {
            None => settings.say(format!("condition {}: ok", c.condition)),
            Some(at) => settings.say(format!("condition {}: violated at t = {at}", c.condition)),
        }
    }
    let existence = existence_check_raw(&problem.delta, &problem.track, problem.tol);
    match existence.witness {
        None => settings.say(format!(
            "existence: a copula exists (largest excess {:.3e})",
            existence.variational_excess
        )),
        Some((x, y)) => settings.say(format!(
            "existence: no copula; criterion exceeded by {:.3e} on [{x}, {y}]",
            existence.variational_excess
        )),
    }
    let ok = conditions.iter().all(|c| c.holds) && existence.exists;
    settings.write_json("validation.json", &ValidationReport { conditions, existence })?;
    Ok(if ok { exit::OK } else { exit::REJECTED })
}

/// Writes the least and greatest eligible `ψ`.
pub fn bounds(spec_path: &Path, settings: &Settings) -> Result<i32, Failure> {
    let problem = settings.load(spec_path)?;
    let spec = problem.spec()?;
    let b = psi_bounds(&spec).map_err(|e| Failure::Rejected(e.into()))?;
    let lower = settings.out_file("psi_lower.csv")?;
    let upper = settings.out_file("psi_upper.csv")?;
    output(write_function(&lower, &b.lower))?;
    output(write_function(&upper, &b.upper))?;
    settings.say(format!("wrote {} and {}", lower.display(), upper.display()));
    Ok(exit::OK)
}

/// Materializes `C_ψ`, its region boundaries and a copula report.
pub fn build(spec_path: &Path, psi: Option<&str>, settings: &Settings) -> Result<i32, Failure> {
    let problem = settings.load(spec_path)?;
    let spec = problem.spec()?;
    let selector = match psi {
        Some(arg) => parse_selector_arg(arg)?,
        None => problem.selector()?,
    };
    let copula = resolve(&spec, &selector)?;
    let mesh = mesh_for(&problem, &spec, &[copula.candidate()]);
    let grid = copula.grid(&mesh).map_err(|e| Failure::Rejected(e.into()))?;
    let report = check_grid(&grid, GridMode::Copula).map_err(|e| Failure::Rejected(e.into()))?;

    output(write_grid(&settings.out_file("grid.csv")?, &grid))?;
    let region = mesh.iter().map(|&x| vec![x, copula.g_at(x), copula.h_at(x)]);
    output(write_columns(&settings.out_file("region.csv")?, &["x", "g", "h"], region))?;
    settings.write_json("report.json", &report)?;
    settings.say(format!(
        "copula checks {}: min cell volume {:.3e} on a {}-point mesh",
        if report.passed { "pass" } else { "FAIL" },
        report.min_cell_volume,
        mesh.len()
    ));
    Ok(if report.passed { exit::OK } else { exit::REJECTED })
}

/// Compares two constructed copulas for the same spec.
pub fn compare(spec_path: &Path, psi_a: &str, psi_b: &str, settings: &Settings) -> Result<i32, Failure> {
    let problem = settings.load(spec_path)?;
    let spec = problem.spec()?;
    let a = resolve(&spec, &parse_selector_arg(psi_a)?)?;
    let b = resolve(&spec, &parse_selector_arg(psi_b)?)?;
    let mesh = mesh_for(&problem, &spec, &[a.candidate(), b.candidate()]);
    let ga = a.grid(&mesh).map_err(|e| Failure::Rejected(e.into()))?;
    let gb = b.grid(&mesh).map_err(|e| Failure::Rejected(e.into()))?;
    let result = compare_grids(&ga, &gb).map_err(|e| Failure::Rejected(e.into()))?;
    settings.write_json("compare.json", &result)?;
    settings.say(output(serde_json::to_string_pretty(&result).map_err(anyhow::Error::from))?);
    Ok(match result.relation {
        Relation::Equal => exit::OK,
        Relation::Incomparable => exit::INCOMPARABLE,
        Relation::FirstDominates | Relation::SecondDominates => exit::DOMINANCE,
    })
}

#[derive(Serialize)]
struct EnvelopeSummary {
    max_gain: f64,
    min_gain: f64,
    projection_distance: f64,
}

/// Replaces a grid copula by the constructed copula that dominates it.
pub fn envelope(grid_path: &Path, spec_path: &Path, settings: &Settings) -> Result<i32, Failure> {
    let grid = read_grid(grid_path).map_err(Failure::Malformed)?;
    let mesh_size = settings.mesh.unwrap_or(grid.size());
    let problem = ProblemSpec::read(spec_path)?.load(Some(mesh_size), settings.tol)?;
    let spec = problem.spec()?;
    let env = dominating_envelope(&grid, &spec).map_err(|e| Failure::Rejected(e.into()))?;
    output(write_function(&settings.out_file("psi.csv")?, env.copula.candidate().psi()))?;
    output(write_grid(&settings.out_file("envelope_grid.csv")?, &env.grid))?;
    settings.write_json(
        "envelope.json",
        &EnvelopeSummary {
            max_gain: env.max_gain,
            min_gain: env.min_gain,
            projection_distance: env.projection_distance,
        },
    )?;
    if env.projection_distance > 0.0 {
        settings.say(format!("extracted psi projected by {:.3e}", env.projection_distance));
    }
    // the gain line is printed even in quiet mode
    println!("max gain {}", env.max_gain);
    Ok(exit::OK)
}

/// `upper` on and above the track, `lower` below it.
pub fn splice(spec_path: &Path, upper: &str, lower: &str, settings: &Settings) -> Result<i32, Failure> {
    let problem = settings.load(spec_path)?;
    let spec = problem.spec()?;
    let resolve_candidate = |arg: &str| -> Result<PsiCandidate, Failure> {
        let c = parse_selector_arg(arg)?.resolve(&spec).map_err(|e| Failure::Rejected(e.into()))?;
        match c.violation() {
            None => Ok(c),
            Some(v) => Err(Failure::Rejected(anyhow!("psi {arg:?} is not eligible: {v}"))),
        }
    };
    let up = resolve_candidate(upper)?;
    let lo = resolve_candidate(lower)?;
    let mesh = mesh_for(&problem, &spec, &[&up, &lo]);
    let spliced = SplicedFunction::new(up, lo).map_err(|e| Failure::Rejected(e.into()))?;
    let grid = spliced.grid(&mesh).map_err(|e| Failure::Rejected(e.into()))?;
    let report = check_grid(&grid, GridMode::Quasi).map_err(|e| Failure::Rejected(e.into()))?;
    output(write_grid(&settings.out_file("splice_grid.csv")?, &grid))?;
    settings.write_json("splice_report.json", &report)?;
    settings.say(format!(
        "quasi-copula checks {}; copula checks {}",
        if report.passed { "pass" } else { "FAIL" },
        if report.is_copula { "pass" } else { "fail" }
    ));
    Ok(if report.passed { exit::OK } else { exit::REJECTED })
}
