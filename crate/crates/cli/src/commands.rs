use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use quadrom_core::flow::{
    evolve_with, invert_moments, EvolveOptions, FlowState, LogEntry, Monitor, SourceSchedule, VelocityField,
};
use quadrom_core::geometry::{sample_boundary, singular_set_clearance};
use quadrom_core::moments::moment_exact;
use quadrom_core::operators::build_solution_basis;
use quadrom_core::oracle::{pde_residual, QuadratureRule};
use quadrom_core::quad_solver::{verify_identity, IdentityJson, VerificationReport, VerifyOptions};
use quadrom_core::{construct_identity, BivarPoly, CRat, CoefficientProfile, ConformalMap, Error, FloatMap, QuadratureIdentity};

use crate::output::{ensure_dir, write_json, FloatMapJson};
use crate::{BasisArgs, Cli, Command, EvolveArgs, GlobalArgs, InvertArgs, VerifyArgs};

/// Finite-difference residual tolerance for basis elements.
const PDE_TOLERANCE: f64 = 1e-5;
const PDE_POINTS: usize = 50;

pub fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Basis(a) => basis(g, a),
        Command::Identity => identity(g),
        Command::Verify(a) => verify(g, a),
        Command::Evolve(a) => evolve(g, a),
        Command::Invert(a) => invert(g, a),
    }
}

fn profile(g: &GlobalArgs) -> Result<CoefficientProfile> {
    let text = g.profile.as_deref().ok_or_else(|| Error::InvalidProfile("--profile is required".into()))?;
    Ok(CoefficientProfile::parse(text)?)
}

/// Inline spec, or a JSON file holding a spec string or an object with a `map` field.
fn map(g: &GlobalArgs) -> Result<ConformalMap> {
    let text = g.map.as_deref().ok_or_else(|| Error::InvalidMap("--map is required".into()))?;
    let path = Path::new(text);
    if !path.is_file() {
        return Ok(ConformalMap::parse(text)?);
    }
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    let spec = match &value {
        serde_json::Value::String(s) => s.as_str(),
        serde_json::Value::Object(o) => o
            .get("map")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::InvalidMap(format!("{} has no string field 'map'", path.display())))?,
        _ => return Err(Error::InvalidMap(format!("{} does not hold a map spec", path.display())).into()),
    };
    Ok(ConformalMap::parse(spec)?)
}

fn rule(g: &GlobalArgs) -> Result<QuadratureRule> {
    if g.oracle_nr == 0 || g.oracle_ntheta == 0 {
        return Err(anyhow!("oracle node counts must be positive"));
    }
    Ok(QuadratureRule::new(g.oracle_nr, g.oracle_ntheta))
}

#[derive(Serialize)]
struct PdeCheck {
    index: usize,
    residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct PdeReport {
    profile: String,
    z1: String,
    fd_step: f64,
    points: usize,
    sample_radius: f64,
    seed: u64,
    tolerance: f64,
    elements: Vec<PdeCheck>,
    passed: bool,
}

fn basis(g: &GlobalArgs, a: &BasisArgs) -> Result<u8> {
    let prof = profile(g)?;
    let z1 = match (&a.z1, &g.map) {
        (Some(s), _) => CRat::parse(s)?,
        (None, Some(_)) => map(g)?.z1,
        (None, None) => CRat::zero(),
    };
    let basis = build_solution_basis(&prof, &z1, a.count)?;
    ensure_dir(&g.out)?;
    write_json(&g.out.join("basis.json"), &basis)?;

    // Test points in a disk about z1 well inside the regular region.
    let c = z1.to_c64();
    let clearance = singular_set_clearance(&FloatMap::new(c, 1e-9, vec![]), &prof);
    let radius = (0.5 * clearance).min(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let points: Vec<Complex64> = (0..PDE_POINTS)
        .map(|_| c + Complex64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let elements: Vec<PdeCheck> = basis
        .elements
        .iter()
        .enumerate()
        .map(|(index, phi)| {
            let residual = pde_residual(&prof, phi, &points, g.fd_step);
            PdeCheck { index, residual, pass: residual <= PDE_TOLERANCE }
        })
        .collect();
    let passed = elements.iter().all(|e| e.pass);
    let report = PdeReport {
        profile: prof.to_string(),
        z1: z1.to_string(),
        fd_step: g.fd_step,
        points: PDE_POINTS,
        sample_radius: radius,
        seed: g.seed,
        tolerance: PDE_TOLERANCE,
        elements,
        passed,
    };
    write_json(&g.out.join("pde_residual.json"), &report)?;
    println!("{} basis elements for {prof} at z1 = {z1}", basis.elements.len());
    for (e, phi) in report.elements.iter().zip(&basis.elements) {
        println!("  [{:>2}] residual {:.2e} {}  {phi}", e.index, e.residual, if e.pass { "ok" } else { "FAIL" });
    }
    Ok(if passed { 0 } else { 3 })
}

fn print_identity(id: &QuadratureIdentity) {
    println!("M[phi] = pi * ( {} phi(z1)", id.q0);
    for (i, q) in id.q.iter().enumerate() {
        println!("         + ({q}) d^{0}phi/dz^{0}(z1) + ({1}) d^{0}phi/dzb^{0}(z1)", i + 1, q.conj());
    }
    println!("         )   for {} on {}", id.profile, id.map);
}

fn print_report(rep: &VerificationReport) {
    let exact_fail = rep.exact.iter().filter(|c| !c.pass).count();
    println!("exact checks: {} run, {} failed", rep.exact.len(), exact_fail);
    for c in rep.exact.iter().filter(|c| !c.pass) {
        println!("  order {}{}: residual {}", c.order, if c.conjugate { " (conjugate)" } else { "" }, c.residual);
    }
    println!("oracle checks (n_r = {}, n_theta = {}, tolerance {:e}):", rep.oracle_nr, rep.oracle_ntheta, rep.tolerance);
    println!("  {:>3}  {:>24}  {:>24}  {:>10}", "#", "identity", "oracle", "rel. err");
    for c in &rep.oracle {
        println!(
            "  {:>3}  {:>11.4e}{:+.4e}i  {:>11.4e}{:+.4e}i  {:>10.2e} {}",
            c.index,
            c.identity_re,
            c.identity_im,
            c.oracle_re,
            c.oracle_im,
            c.relative_error,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!("{}", if rep.passed { "PASS" } else { "FAIL" });
}

fn identity(g: &GlobalArgs) -> Result<u8> {
    let prof = profile(g)?;
    let m = map(g)?;
    let id = construct_identity(&prof, &m)?;
    ensure_dir(&g.out)?;
    write_json(&g.out.join("identity.json"), &id.to_json())?;
    print_identity(&id);
    let opts = VerifyOptions { rule: rule(g)?, seed: g.seed, ..VerifyOptions::default() };
    let rep = verify_identity(&id, &opts)?;
    write_json(&g.out.join("verification.json"), &rep)?;
    print_report(&rep);
    Ok(if rep.passed { 0 } else { 5 })
}

fn verify(g: &GlobalArgs, a: &VerifyArgs) -> Result<u8> {
    let path = a.identity.clone().unwrap_or_else(|| g.out.join("identity.json"));
    let raw = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let json: IdentityJson = serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    let id = QuadratureIdentity::from_json(&json)?;
    let opts = VerifyOptions { rule: rule(g)?, seed: g.seed, random_functions: a.samples, tolerance: a.tolerance };
    let rep = verify_identity(&id, &opts)?;
    print_report(&rep);
    Ok(if rep.passed { 0 } else { 5 })
}

#[derive(Serialize)]
struct MonitorSummary {
    label: String,
    initial: [f64; 2],
    last: [f64; 2],
    expected_change: [f64; 2],
    drift: f64,
    relative_drift: f64,
}

#[derive(Serialize)]
struct ConservationReport {
    profile: String,
    completed: bool,
    error: Option<String>,
    t: f64,
    steps: usize,
    dt: f64,
    source_integral: f64,
    monitors: Vec<MonitorSummary>,
    max_bracket_residual: f64,
    max_truncation_residual: f64,
    final_map: FloatMapJson,
}

fn timeseries(path: &Path, labels: &[String], log: &[LogEntry]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    let degree = log.iter().map(|e| e.map.degree()).max().unwrap_or(1);
    let mut header = vec!["t".to_string(), "r".to_string()];
    for k in 1..degree {
        header.push(format!("re_u{k}"));
        header.push(format!("im_u{k}"));
    }
    for l in labels {
        header.push(format!("re_{l}"));
        header.push(format!("im_{l}"));
    }
    header.push("bracket_residual".into());
    header.push("truncation_residual".into());
    w.write_record(&header)?;
    for e in log {
        let mut row = vec![format!("{:.17e}", e.t), format!("{:.17e}", e.map.r)];
        for k in 0..degree - 1 {
            let c = e.map.u.get(k).copied().unwrap_or_default();
            row.push(format!("{:.17e}", c.re));
            row.push(format!("{:.17e}", c.im));
        }
        for c in &e.monitors {
            row.push(format!("{:.17e}", c.re));
            row.push(format!("{:.17e}", c.im));
        }
        row.push(format!("{:.6e}", e.bracket_residual));
        row.push(format!("{:.6e}", e.truncation_residual));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn snapshot(dir: &Path, step: usize, map: &FloatMap, samples: usize) -> Result<()> {
    let curve = sample_boundary(map, samples);
    fs::write(dir.join(format!("boundary_{step:05}.svg")), curve.to_svg())?;
    fs::write(dir.join(format!("boundary_{step:05}.csv")), curve.to_csv())?;
    Ok(())
}

fn evolve(g: &GlobalArgs, a: &EvolveArgs) -> Result<u8> {
    let prof = g.profile.as_deref().map(CoefficientProfile::parse).transpose()?.unwrap_or(CoefficientProfile::Constant);
    let m = map(g)?;
    if !(a.dt > 0.0 && a.dt.is_finite()) {
        return Err(anyhow!("--dt must be positive"));
    }
    let schedule = SourceSchedule::parse(&a.q)?;
    let (field, monitors, labels): (VelocityField, Vec<Monitor>, Vec<String>) = match &prof {
        CoefficientProfile::Constant => {
            let monitors = (0..=m.degree() as u32)
                .map(|k| Monitor::moment(BivarPoly::shifted_z_power(&m.z1, k)))
                .collect();
            let labels = (0..=m.degree()).map(|k| format!("M{k}")).collect();
            (VelocityField::PolubarinovaGalin, monitors, labels)
        }
        CoefficientProfile::GaugeTrivial { h, eta } if *eta == BivarPoly::one() => (
            VelocityField::String { h: h.clone(), truncation: a.truncation },
            vec![Monitor::inverse_weight(h.clone())],
            vec!["I0".to_string()],
        ),
        other => return Err(Error::Unsupported(format!("{other} (evolution needs constant or gauge-trivial with eta = 1)")).into()),
    };
    let mut opts = EvolveOptions::new(a.dt, a.steps, schedule.clone());
    opts.monitors = monitors;
    opts.rule = rule(g)?;

    let snapshots = g.out.join("snapshots");
    ensure_dir(&snapshots)?;
    let mut state = FlowState::new(m.to_float());
    snapshot(&snapshots, 0, &state.map, a.svg_samples)?;
    let stride = a.stride.max(1);
    let result = evolve_with(&mut state, &field, &opts, |step, st| {
        if step % stride == 0 || step == a.steps {
            snapshot(&snapshots, step, &st.map, a.svg_samples).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        Ok(())
    });

    timeseries(&g.out.join("timeseries.csv"), &labels, &state.conserved_log)?;
    let source_integral = schedule.integral(state.t);
    let summaries = conservation(&labels, &state, source_integral);
    let report = ConservationReport {
        profile: prof.to_string(),
        completed: result.is_ok(),
        error: result.as_ref().err().map(|e| e.to_string()),
        t: state.t,
        steps: state.conserved_log.len().saturating_sub(1),
        dt: a.dt,
        source_integral,
        monitors: summaries,
        max_bracket_residual: state.conserved_log.iter().map(|e| e.bracket_residual).fold(0.0, f64::max),
        max_truncation_residual: state.conserved_log.iter().map(|e| e.truncation_residual).fold(0.0, f64::max),
        final_map: FloatMapJson::from(&state.map),
    };
    write_json(&g.out.join("conservation.json"), &report)?;
    match result {
        Ok(()) => {
            println!("t = {:.6}, r = {:.12}", state.t, state.map.r);
            for s in &report.monitors {
                println!("  {}: relative drift {:.2e}", s.label, s.relative_drift);
            }
            Ok(0)
        }
        Err(e) => {
            write_json(
                &g.out.join("last_good_map.json"),
                &serde_json::json!({ "t": state.t, "map": FloatMapJson::from(&state.map) }),
            )?;
            Err(e.into())
        }
    }
}

/// Drift of each monitor from its expected change `π ∫q φ(z1)` (moments are
/// recorded as multiples of `π`, so the expected change is `∫q φ(z1)`).
fn conservation(labels: &[String], state: &FlowState, source_integral: f64) -> Vec<MonitorSummary> {
    let (Some(first), Some(last)) = (state.conserved_log.first(), state.conserved_log.last()) else {
        return Vec::new();
    };
    let area = first.monitors.first().map_or(1.0, |c| c.norm());
    labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            // Only φ = 1 (constant case) and 1/h (gauge case) change, at rate q.
            let expected = if k == 0 { source_integral } else { 0.0 };
            let change = last.monitors[k] - first.monitors[k];
            let drift = (change - Complex64::new(expected, 0.0)).norm();
            let scale = last.monitors[k].norm().max(first.monitors[k].norm()).max(area);
            MonitorSummary {
                label: label.clone(),
                initial: [first.monitors[k].re, first.monitors[k].im],
                last: [last.monitors[k].re, last.monitors[k].im],
                expected_change: [expected, 0.0],
                drift,
                relative_drift: drift / scale,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct InversionReport {
    targets: Vec<[f64; 2]>,
    iterations: usize,
    residual: f64,
    map: FloatMapJson,
    map_spec: String,
    achieved: Vec<[f64; 2]>,
}

fn invert(g: &GlobalArgs, a: &InvertArgs) -> Result<u8> {
    let prof = g.profile.as_deref().map(CoefficientProfile::parse).transpose()?.unwrap_or(CoefficientProfile::Constant);
    let guess = map(g)?;
    let targets: Vec<Complex64> = a
        .targets
        .split(',')
        .map(|t| parse_complex(t.trim()))
        .collect::<Result<_>>()?;
    let inv = invert_moments(&prof, &targets, &guess.to_float())?;
    let exact = inv.map.to_exact(1 << 40)?;
    let achieved = (0..targets.len() as u32)
        .map(|k| {
            let c = moment_exact(&exact, &BivarPoly::one(), &BivarPoly::shifted_z_power(&exact.z1, k)).to_c64();
            [c.re, c.im]
        })
        .collect();
    let report = InversionReport {
        targets: targets.iter().map(|c| [c.re, c.im]).collect(),
        iterations: inv.iterations,
        residual: inv.residual,
        map: FloatMapJson::from(&inv.map),
        map_spec: exact.to_string(),
        achieved,
    };
    ensure_dir(&g.out)?;
    write_json(&g.out.join("inverted_map.json"), &report)?;
    println!("recovered in {} iterations (residual {:.2e}): r = {:.15}", inv.iterations, inv.residual, inv.map.r);
    for (k, u) in inv.map.u.iter().enumerate() {
        println!("  u{} = {:.15}{:+.15}i", k + 1, u.re, u.im);
    }
    Ok(0)
}

/// Complex number as an exact literal (`1/2-3i`) or a float pair (`0.5-3e-2i`).
fn parse_complex(s: &str) -> Result<Complex64> {
    if let Ok(c) = CRat::parse(s) {
        return Ok(c.to_c64());
    }
    s.parse::<Complex64>().map_err(|_| anyhow!("bad complex number '{s}'"))
}
