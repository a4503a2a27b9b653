use num_complex::Complex64;

use crate::algebra::BivarPoly;
use crate::error::{Error, Result};
use crate::geometry::{check_univalence, FloatMap};
use crate::moments::moment_float;
use crate::oracle::{integrate_over_domain, QuadratureRule};

use super::velocity::VelocityField;

/// Piecewise-constant source strength `q(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSchedule {
    /// `(t_start, q)` pairs sorted by start time; `q(t)` is the value of the last start `<= t`.
    pieces: Vec<(f64, f64)>,
}

impl SourceSchedule {
    pub fn constant(q: f64) -> Self {
        SourceSchedule { pieces: vec![(f64::NEG_INFINITY, q)] }
    }

    pub fn piecewise(mut pieces: Vec<(f64, f64)>) -> Result<Self> {
        if pieces.is_empty() || pieces.iter().any(|(t, q)| t.is_nan() || !q.is_finite()) {
            return Err(Error::Invalid("source schedule needs finite (t, q) pairs".into()));
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        pieces[0].0 = f64::NEG_INFINITY;
        Ok(SourceSchedule { pieces })
    }

    /// Parses `q` or `t0:q0,t1:q1,…`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |p: &str| Error::Invalid(format!("bad source schedule entry '{p}'"));
        if !s.contains(':') {
            return Ok(SourceSchedule::constant(s.trim().parse().map_err(|_| bad(s))?));
        }
        let mut pieces = Vec::new();
        for part in s.split(',') {
            let (t, q) = part.split_once(':').ok_or_else(|| bad(part))?;
            pieces.push((t.trim().parse().map_err(|_| bad(part))?, q.trim().parse().map_err(|_| bad(part))?));
        }
        SourceSchedule::piecewise(pieces)
    }

    pub fn at(&self, t: f64) -> f64 {
        self.pieces.iter().rev().find(|(t0, _)| *t0 <= t).map_or(self.pieces[0].1, |p| p.1)
    }

    /// `∫_0^t q`.
    pub fn integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, (t0, q)) in self.pieces.iter().enumerate() {
            let start = t0.max(0.0);
            let end = self.pieces.get(i + 1).map_or(t, |p| p.0.min(t));
            if end > start {
                acc += q * (end - start);
            }
        }
        acc
    }
}

/// Functional recorded along a trajectory, as a multiple of `π`.
#[derive(Clone, Debug, PartialEq)]
pub enum Monitor {
    /// `M[φ]` with `η = 1`, by residues.
    Moment { label: String, phi: BivarPoly },
    /// `∫_Ω 1/h dX dY`, by quadrature.
    InverseWeight { label: String, h: BivarPoly },
}

impl Monitor {
    pub fn moment(phi: BivarPoly) -> Self {
        Monitor::Moment { label: format!("M[{phi}]"), phi }
    }

    pub fn inverse_weight(h: BivarPoly) -> Self {
        Monitor::InverseWeight { label: format!("I0[{h}]"), h }
    }

    pub fn label(&self) -> &str {
        match self {
            Monitor::Moment { label, .. } | Monitor::InverseWeight { label, .. } => label,
        }
    }

    pub fn evaluate(&self, map: &FloatMap, rule: &QuadratureRule) -> Result<Complex64> {
        match self {
            Monitor::Moment { phi, .. } => Ok(moment_float(map, &BivarPoly::one(), phi)),
            Monitor::InverseWeight { h, .. } => {
                let v = integrate_over_domain(map, rule, |z| 1.0 / h.eval_c64(z))?;
                Ok(v / std::f64::consts::PI)
            }
        }
    }
}

/// One accepted step of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct LogEntry {
    pub t: f64,
    pub map: FloatMap,
    pub monitors: Vec<Complex64>,
    pub bracket_residual: f64,
    pub truncation_residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub map: FloatMap,
    pub conserved_log: Vec<LogEntry>,
}

impl FlowState {
    pub fn new(map: FloatMap) -> Self {
        FlowState { t: 0.0, map, conserved_log: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub dt: f64,
    pub steps: usize,
    pub schedule: SourceSchedule,
    pub monitors: Vec<Monitor>,
    pub rule: QuadratureRule,
    /// Boundary samples for the univalence check.
    pub univalence_samples: usize,
    pub max_halvings: usize,
}

impl EvolveOptions {
    pub fn new(dt: f64, steps: usize, schedule: SourceSchedule) -> Self {
        EvolveOptions {
            dt,
            steps,
            schedule,
            monitors: Vec::new(),
            rule: QuadratureRule::default(),
            univalence_samples: 256,
            max_halvings: 10,
        }
    }
}

fn axpy(map: &FloatMap, h: f64, v: &FloatMap) -> FloatMap {
    let n = map.u.len().max(v.u.len());
    let mut u = map.u.clone();
    u.resize(n, Complex64::new(0.0, 0.0));
    for (k, c) in v.u.iter().enumerate() {
        u[k] += c * h;
    }
    FloatMap::new(map.z1, map.r + h * v.r, u)
}

fn rk4_step(field: &VelocityField, schedule: &SourceSchedule, t: f64, map: &FloatMap, h: f64) -> Result<FloatMap> {
    let f = |t: f64, m: &FloatMap| -> Result<FloatMap> {
        let v = field.velocities(m)?;
        Ok(axpy(&FloatMap::new(Complex64::new(0.0, 0.0), 0.0, vec![]), schedule.at(t), &v.rate))
    };
    let k1 = f(t, map)?;
    let k2 = f(t + h / 2.0, &axpy(map, h / 2.0, &k1))?;
    let k3 = f(t + h / 2.0, &axpy(map, h / 2.0, &k2))?;
    let k4 = f(t + h, &axpy(map, h, &k3))?;
    let mut out = axpy(map, h / 6.0, &k1);
    out = axpy(&out, h / 3.0, &k2);
    out = axpy(&out, h / 3.0, &k3);
    Ok(axpy(&out, h / 6.0, &k4))
}

fn log_entry(state: &FlowState, field: &VelocityField, opts: &EvolveOptions) -> Result<LogEntry> {
    let v = field.velocities(&state.map)?;
    let monitors = opts.monitors.iter().map(|m| m.evaluate(&state.map, &opts.rule)).collect::<Result<_>>()?;
    Ok(LogEntry {
        t: state.t,
        map: state.map.clone(),
        monitors,
        bracket_residual: v.bracket_residual,
        truncation_residual: v.truncation_residual,
        condition: v.condition,
    })
}

/// Advances `state` by `opts.steps` RK4 steps of size `opts.dt`. A step whose
/// result fails the univalence check is retried with half the step size, up to
/// `opts.max_halvings` times. On failure `state` holds the last accepted map.
pub fn evolve(state: &mut FlowState, field: &VelocityField, opts: &EvolveOptions) -> Result<()> {
    evolve_with(state, field, opts, |_, _| Ok(()))
}

/// As [`evolve`], calling `on_step(step, state)` after every accepted step.
pub fn evolve_with<F>(state: &mut FlowState, field: &VelocityField, opts: &EvolveOptions, mut on_step: F) -> Result<()>
where
    F: FnMut(usize, &FlowState) -> Result<()>,
{
    let initial = check_univalence(&state.map, opts.univalence_samples);
    if !initial.univalent || state.map.r <= 0.0 {
        return Err(Error::UnivalenceLost { t: state.t, detail: format!("initial map: {}", initial.detail) });
    }
    let degree = field.working_degree(&state.map);
    state.map.u.resize(degree - 1, Complex64::new(0.0, 0.0));
    if state.conserved_log.is_empty() {
        let entry = log_entry(state, field, opts)?;
        state.conserved_log.push(entry);
    }
    for step in 1..=opts.steps {
        let t_end = state.t + opts.dt;
        let mut h = opts.dt;
        let mut halvings = 0;
        while state.t < t_end {
            let h_try = h.min(t_end - state.t);
            let attempt = rk4_step(field, &opts.schedule, state.t, &state.map, h_try).and_then(|m| {
                let rep = check_univalence(&m, opts.univalence_samples);
                if rep.univalent && m.r > 0.0 {
                    Ok(m)
                } else {
                    Err(Error::UnivalenceLost { t: state.t + h_try, detail: rep.detail })
                }
            });
            match attempt {
                Ok(m) => {
                    state.map = m;
                    state.t = if h_try == t_end - state.t { t_end } else { state.t + h_try };
                }
                Err(e @ (Error::UnivalenceLost { .. } | Error::SingularVelocitySystem { .. })) => {
                    halvings += 1;
                    if halvings > opts.max_halvings {
                        return Err(match e {
                            Error::UnivalenceLost { .. } => e,
                            other => Error::UnivalenceLost { t: state.t, detail: other.to_string() },
                        });
                    }
                    h /= 2.0;
                }
                Err(e) => return Err(e),
            }
        }
        let entry = log_entry(state, field, opts)?;
        state.conserved_log.push(entry);
        on_step(step, state)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        let s = SourceSchedule::parse("0:1,0.5:2").unwrap();
        assert_eq!(s.at(0.25), 1.0);
        assert_eq!(s.at(0.75), 2.0);
        assert!((s.integral(1.0) - 1.5).abs() < 1e-15);
        assert!((SourceSchedule::parse("3").unwrap().integral(2.0) - 6.0).abs() < 1e-15);
        assert!(SourceSchedule::parse("0:x").is_err());
    }

    #[test]
    fn disk_closed_form() {
        let mut st = FlowState::new(FloatMap::new(Complex64::new(0.0, 0.0), 1.0, vec![]));
        let opts = EvolveOptions::new(0.03, 100, SourceSchedule::constant(1.0));
        evolve(&mut st, &VelocityField::PolubarinovaGalin, &opts).unwrap();
        assert!((st.t - 3.0).abs() < 1e-12);
        assert!((st.map.r - 2.0).abs() < 1e-10, "r = {}", st.map.r);
        assert_eq!(st.conserved_log.len(), 101);
    }
}
