//! Acceptance suite. Every criterion runs, prints one PASS/FAIL line to
//! stderr (bypassing the test harness capture), and the test fails if any
//! criterion does.

mod common;

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use trackcop::diagonals::{fig1, fig2, indep, w_diag};
use trackcop::{
    check_grid, compare, dominating_envelope, eligibility_by_variation, existence_check_raw, extract_psi,
    psi_bounds, quadruplet, uniform_knots, CopulaCpsi, DiagonalSpec, GridCopula, GridMode, PlFunction,
    PsiSelector, Relation, SplicedFunction, Track,
};
use trackcop::verification::UpperBound;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn identity_spec(delta: PlFunction) -> Arc<DiagonalSpec> {
    Arc::new(DiagonalSpec::new(delta, Track::identity()).expect("valid section"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn copula_of(spec: &Arc<DiagonalSpec>, selector: PsiSelector) -> CopulaCpsi {
    CopulaCpsi::new(selector.resolve(spec).expect("resolvable")).expect("eligible")
}

fn max_abs(grid: &GridCopula, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mesh = grid.mesh();
    let mut worst: f64 = 0.0;
    for (i, &x) in mesh.iter().enumerate() {
        for (j, &y) in mesh.iter().enumerate() {
            worst = worst.max((grid.value(i, j) - f(x, y)).abs());
        }
    }
    worst
}

fn m_diagonal_collapse() -> Outcome {
    let spec = identity_spec(PlFunction::identity());
    let mesh = uniform_knots(201);
    let mut rng = common::rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let psi = common::random_lipschitz(&mut rng, 12);
        let c = quadruplet(&spec, &psi).map_err(|e| e.to_string())?;
        ensure(c.eligible(), || format!("increasing 1-Lipschitz psi rejected: {:?}", c.violation()))?;
        let grid = CopulaCpsi::new(c).map_err(|e| e.to_string())?.grid(&mesh).map_err(|e| e.to_string())?;
        worst = worst.max(max_abs(&grid, f64::min));
    }
    ensure(worst <= 1e-12, || format!("max deviation from M {worst:.3e}"))?;
    Ok(format!("max deviation from M {worst:.1e} over 20 psi"))
}

fn independence_closed_form() -> Outcome {
    let spec = identity_spec(indep(201));
    let psi = PlFunction::sample(201, |x| 0.5 * x * x);
    let c = CopulaCpsi::new(quadruplet(&spec, &psi).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let grid = c.grid(&uniform_knots(201)).map_err(|e| e.to_string())?;
    let worst = max_abs(&grid, |x, y| x.min(y).min(0.5 * (x * x + y * y)));
    ensure(worst <= 1e-12, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn w_diagonal_shuffle() -> Outcome {
    let spec = identity_spec(w_diag());
    let b = psi_bounds(&spec).map_err(|e| e.to_string())?;
    let target = PlFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 0.5]).unwrap();
    let (dl, du) = (b.lower.max_abs_diff(&target), b.upper.max_abs_diff(&target));
    ensure(dl <= 1e-12 && du <= 1e-12, || format!("bounds deviate by {dl:.3e}, {du:.3e}"))?;
    let c = copula_of(&spec, PsiSelector::Lower);
    let (a, b2) = (c.value(0.7, 0.3), c.value(0.25, 0.75));
    ensure((a - 0.2).abs() <= 1e-12 && (b2 - 0.25).abs() <= 1e-12, || format!("C(0.7,0.3) = {a}, C(0.25,0.75) = {b2}"))?;
    let report = check_grid(&c.grid(&uniform_knots(201)).unwrap(), GridMode::Copula).unwrap();
    ensure(report.passed, || format!("grid fails copula checks: {report:?}"))?;
    Ok("psi_L = psi_U = max(x - 1/2, 0); C(0.7,0.3) = 0.2; C(0.25,0.75) = 0.25; grid is a copula".into())
}

fn sine_diagonal_reproduction() -> Outcome {
    let spec = identity_spec(fig2(1001));
    let b = psi_bounds(&spec).map_err(|e| e.to_string())?;
    let lower = copula_of(&spec, PsiSelector::Lower);
    let upper = copula_of(&spec, PsiSelector::Upper);
    let checks = [
        ("psi_L(0.6)", b.lower.at(0.6), 0.0155792),
        ("psi_U(0.5)", b.upper.at(0.5), 0.1816901),
        ("C_L(0.5,0.6)", lower.value(0.5, 0.6), 0.2816901),
        ("C_U(0.5,0.6)", upper.value(0.5, 0.6), 0.1972693),
    ];
    for (name, got, want) in checks {
        ensure((got - want).abs() <= 1e-4, || format!("{name} = {got:.7}, expected {want}"))?;
    }
    let mesh = uniform_knots(1001);
    let mut min_vol = f64::INFINITY;
    let mut diag_dev: f64 = 0.0;
    for c in [&lower, &upper] {
        let grid = c.grid(&mesh).unwrap();
        let r = check_grid(&grid, GridMode::Copula).unwrap();
        ensure(r.passed, || format!("grid fails copula checks: {r:?}"))?;
        min_vol = min_vol.min(r.min_cell_volume);
        for (i, &x) in mesh.iter().enumerate() {
            diag_dev = diag_dev.max((grid.value(i, i) - spec.delta().at(x)).abs());
        }
    }
    ensure(min_vol >= -1e-12, || format!("min cell volume {min_vol:.3e}"))?;
    ensure(diag_dev <= 1e-9, || format!("diagonal deviation {diag_dev:.3e}"))?;
    Ok(format!(
        "psi_L(0.6) = {:.7}, psi_U(0.5) = {:.7}, C_L(0.5,0.6) = {:.7}, C_U(0.5,0.6) = {:.7}; min cell volume {min_vol:.1e}",
        checks[0].1, checks[1].1, checks[2].1, checks[3].1
    ))
}

fn squared_sine_region_split() -> Outcome {
    let spec = identity_spec(fig1(1001));
    let mesh = uniform_knots(1001);
    let mut count = 0usize;
    for selector in [PsiSelector::Lower, PsiSelector::Upper] {
        let c = copula_of(&spec, selector);
        for &x in mesh.iter().filter(|&&x| x <= 0.5) {
            for &y in mesh.iter().filter(|&&y| y >= 0.5) {
                let (a, b) = (c.value(x, y), c.value(y, x));
                ensure(a == x.min(y) && b == x.min(y), || format!("C({x},{y}) = {a}, C({y},{x}) = {b}"))?;
                count += 2;
            }
        }
    }
    Ok(format!("{count} evaluations equal min(x, y) exactly"))
}

fn mirror_points() -> Outcome {
    let spec = identity_spec(fig2(201));
    let mesh = uniform_knots(201);
    let lower = copula_of(&spec, PsiSelector::Lower);
    let upper = copula_of(&spec, PsiSelector::Upper);
    let r = compare(&lower.grid(&mesh).unwrap(), &upper.grid(&mesh).unwrap()).unwrap();
    ensure(r.relation == Relation::Incomparable, || format!("relation {:?}", r.relation))?;
    let product = r.product.ok_or("no witness")?;
    ensure(product <= -1e-4, || format!("witness product {product}"))?;
    let at = (lower.value(0.5, 0.6) - upper.value(0.5, 0.6)) * (lower.value(0.6, 0.5) - upper.value(0.6, 0.5));
    ensure((at + 0.0071269).abs() <= 1e-4, || format!("product at (0.5, 0.6) = {at}"))?;

    let mut rng = common::rng(6);
    let mut pairs = 0;
    while pairs < 50 {
        let a = common::random_eligible(&mut rng, &spec);
        let b = common::random_eligible(&mut rng, &spec);
        if a.max_abs_diff(&b) < 1e-3 {
            continue;
        }
        let ga = CopulaCpsi::new(quadruplet(&spec, &a).unwrap()).unwrap().grid(&mesh).unwrap();
        let gb = CopulaCpsi::new(quadruplet(&spec, &b).unwrap()).unwrap().grid(&mesh).unwrap();
        let rel = compare(&ga, &gb).unwrap().relation;
        ensure(matches!(rel, Relation::Incomparable), || format!("pair {pairs}: relation {rel:?}"))?;
        pairs += 1;
    }
    Ok(format!(
        "witness {:?} product {product:.7}; product at (0.5,0.6) = {at:.7}; 50 random pairs incomparable",
        r.witness_pair.unwrap()
    ))
}

fn three_way_equivalence() -> Outcome {
    let mut rng = common::rng(7);
    let mut tally = [0usize; 3];
    for (name, delta) in [("fig1", fig1(201)), ("fig2", fig2(201)), ("w", w_diag()), ("indep", indep(201))] {
        let spec = identity_spec(delta);
        let mesh = trackcop::default_mesh(201, &spec, &[]);
        for k in 0..100 {
            let (psi, kind) = match k % 5 {
                0 | 1 => (common::random_eligible(&mut rng, &spec), 0),
                2 | 3 => (common::perturbed(&mut rng, &spec), 1),
                _ => (common::random_lipschitz(&mut rng, 15), 2),
            };
            let c = quadruplet(&spec, &psi).unwrap();
            let v = eligibility_by_variation(&spec, &psi);
            ensure(c.eligible() == v.eligible, || {
                format!("{name} #{k}: quadruplet {} vs variation {}", c.eligible(), v.eligible)
            })?;
            match kind {
                0 => ensure(c.eligible(), || format!("{name} #{k}: generated eligible psi rejected"))?,
                1 => ensure(!c.eligible(), || format!("{name} #{k}: perturbed psi accepted"))?,
                _ => {}
            }
            if c.eligible() {
                let grid = CopulaCpsi::new(c).unwrap().grid(&mesh).unwrap();
                let r = check_grid(&grid, GridMode::Copula).unwrap();
                ensure(r.passed, || format!("{name} #{k}: grid fails copula checks: {r:?}"))?;
            }
            tally[kind] += 1;
        }
    }
    Ok(format!(
        "{} eligible, {} perturbed, {} arbitrary; zero disagreements",
        tally[0], tally[1], tally[2]
    ))
}

fn existence_equivalence() -> Outcome {
    let mut rng = common::rng(8);
    let mut invalid = 0;
    for k in 0..100 {
        let track = common::random_track(&mut rng, 8);
        let count = rng.gen_range(2..10);
        let knots = trackcop::union_knots(&common::random_knots(&mut rng, count), track.phi().xs());
        let scale = rng.gen_range(0.3..1.6);
        let mut ys = vec![0.0];
        for w in knots.windows(2) {
            let room = (w[1] - w[0]) + (track.apply(w[1]) - track.apply(w[0]));
            let last = *ys.last().unwrap();
            ys.push(last + scale * rng.gen_range(0.0..1.0) * room);
        }
        let delta = PlFunction::new(knots, ys).unwrap();
        let r = existence_check_raw(&delta, &track, 1e-9);
        ensure(r.variational_ok == r.lipschitz_ok, || format!("pair {k}: variational {} vs lipschitz {}", r.variational_ok, r.lipschitz_ok))?;
        if !r.exists {
            invalid += 1;
        }
    }
    Ok(format!("100 pairs ({invalid} without a copula); zero disagreements"))
}

fn envelope_characterization() -> Outcome {
    let n = 201;
    let limit = 2.0 / n as f64;
    let mesh = uniform_knots(n);
    let product = GridCopula::from_fn(mesh.clone(), |x, y| x * y).unwrap();

    let psi = extract_psi(&product, &Track::identity()).map_err(|e| e.to_string())?;
    let extract_err = mesh.iter().map(|&x| (psi.at(x) - 0.5 * x * x).abs()).fold(0.0, f64::max);
    ensure(extract_err <= limit, || format!("extracted psi off x^2/2 by {extract_err:.3e}"))?;

    let spec = identity_spec(indep(n));
    let env = dominating_envelope(&product, &spec).map_err(|e| e.to_string())?;
    ensure(env.min_gain >= 0.0, || format!("envelope below product by {:.3e}", -env.min_gain))?;
    ensure(env.max_gain >= 0.015, || format!("max gain {:.4}", env.max_gain))?;
    let gain_at = env.copula.value(0.4, 0.6) - 0.24;

    let spec2 = identity_spec(fig2(n));
    let lower = copula_of(&spec2, PsiSelector::Lower);
    let round = dominating_envelope(&lower.grid(&mesh).unwrap(), &spec2).map_err(|e| e.to_string())?;
    let drift = round.copula.candidate().psi().max_abs_diff(lower.candidate().psi());
    ensure(drift <= limit, || format!("fixed point drift {drift:.3e}"))?;
    Ok(format!(
        "extraction error {extract_err:.1e}; max gain {:.4} (gain at (0.4,0.6) {gain_at:.4}); fixed point drift {drift:.1e}",
        env.max_gain
    ))
}

fn splice_quasi_copula() -> Outcome {
    let spec = identity_spec(fig2(201));
    let mesh = uniform_knots(201);
    let lo = PsiSelector::Lower.resolve(&spec).unwrap();
    let up = PsiSelector::Upper.resolve(&spec).unwrap();
    let splice = SplicedFunction::new(lo.clone(), up).map_err(|e| e.to_string())?;
    let grid = splice.grid(&mesh).unwrap();
    let r = check_grid(&grid, GridMode::Quasi).unwrap();
    ensure(r.passed, || format!("splice fails quasi-copula checks: {r:?}"))?;
    let bound = UpperBound::new(&spec).unwrap();
    let dev = max_abs(&grid, |x, y| bound.value(x, y));
    ensure(dev <= 1e-9, || format!("splice deviates from pointwise upper bound by {dev:.3e}"))?;
    let degenerate = SplicedFunction::new(lo.clone(), lo).unwrap().grid(&mesh).unwrap();
    let rd = check_grid(&degenerate, GridMode::Copula).unwrap();
    ensure(rd.passed, || format!("degenerate splice fails copula checks: {rd:?}"))?;
    Ok(format!(
        "quasi-copula; deviation from upper bound {dev:.1e}; splice copula verdict {}; degenerate splice is a copula",
        r.is_copula
    ))
}

fn variation_identities() -> Outcome {
    let mut rng = common::rng(11);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let f = common::random_pl(&mut rng, 12);
        let mut ab = [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
        ab.sort_by(f64::total_cmp);
        let [a, b] = ab;
        let mid = rng.gen_range(a..=b);
        let v = f.variation(a, b).unwrap();
        let (fa, fb) = (f.at(a), f.at(b));
        ensure(v.tv == v.vplus + v.vminus, || format!("#{k}: tv != vplus + vminus"))?;
        let flipped = f.negate().variation(a, b).unwrap();
        ensure(flipped.vplus == v.vminus, || format!("#{k}: sign flip"))?;
        let head = f.variation(0.0, a).unwrap().vplus;
        let whole = f.variation(0.0, b).unwrap().vplus;
        let left = f.variation(a, mid).unwrap();
        let right = f.variation(mid, b).unwrap();
        for err in [
            (v.vplus - v.vminus) - (fb - fa),
            whole - (head + v.vplus),
            v.tv - (left.tv + right.tv),
            v.vplus - 0.5 * (v.tv + fb - fa),
            v.vminus - 0.5 * (v.tv + fa - fb),
        ] {
            worst = worst.max(err.abs());
        }

        let m = f.positive_variation_majorant();
        ensure(m.ys()[0] == 0.0 && m.is_increasing(0.0), || format!("#{k}: majorant not increasing from 0"))?;
        ensure(m.combine(&f, trackcop::CombineOp::Sub).is_increasing(1e-12), || format!("#{k}: majorant minus f decreases"))?;
        for c in 0..100 {
            let h = competitor(&mut rng, &f);
            for (x, hv) in h.knots() {
                ensure(hv >= m.at(x) - 1e-12, || format!("#{k}/{c}: competitor below majorant at {x}"))?;
            }
        }
    }
    ensure(worst <= 1e-12, || format!("identity error {worst:.3e}"))?;
    Ok(format!("1000 functions, max identity error {worst:.1e}; majorant minimal against 100 competitors each"))
}

/// Increasing `h` with `h(0) = 0` and `h − f` increasing, on a random
/// refinement of the knots of `f`.
fn competitor(rng: &mut rand_chacha::ChaCha8Rng, f: &PlFunction) -> PlFunction {
    let count = rng.gen_range(1..6);
    let extra = common::random_knots(rng, count);
    let xs = trackcop::union_knots(f.xs(), &extra);
    let fs = f.sample_at(&xs);
    let slack = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..0.2) };
    let mut ys = vec![0.0];
    for k in 0..xs.len() - 1 {
        let need = (fs[k + 1] - fs[k]).max(0.0);
        ys.push(ys[k] + need + slack * rng.gen_range(0.0..1.0) * (xs[k + 1] - xs[k]));
    }
    PlFunction::new(xs, ys).unwrap()
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("1 M-diagonal collapse", m_diagonal_collapse),
        ("2 independence-diagonal closed form", independence_closed_form),
        ("3 W-diagonal uniqueness and shuffle", w_diagonal_shuffle),
        ("4 sine diagonal bounds and grids", sine_diagonal_reproduction),
        ("5 squared-sine diagonal region split", squared_sine_region_split),
        ("6 mirror points", mirror_points),
        ("7 three-way eligibility equivalence", three_way_equivalence),
        ("8 existence equivalence", existence_equivalence),
        ("9 envelope characterization", envelope_characterization),
        ("10 splice quasi-copula", splice_quasi_copula),
        ("11 variation identities", variation_identities),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (name, run) in criteria {
        let line = match run() {
            Ok(detail) => format!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed.push(name);
                format!("FAIL  criterion {name}: {detail}")
            }
        };
        writeln!(err, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
