//! Multipole quadrature identities
//! `M[φ] = π (Q0 φ(z1) + Σ_i Q^(i) ∂_z^i φ(z1) + conj(Q^(i)) ∂_z̄^i φ(z1))`
//! solved exactly from the moments of a solution basis.

pub mod linalg;
mod verify;

pub use verify::{verify_identity, ExactCheck, OracleCheck, VerificationReport, VerifyOptions, ORACLE_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::algebra::{format_rat, parse_rat, BivarPoly, CRat, Rat};
use crate::error::{Error, Result};
use crate::geometry::ConformalMap;
use crate::moments::MomentTable;
use crate::operators::{BasisGenerator, CoefficientProfile};

use linalg::{bareiss_solve, solve_complex, Echelon};

pub const DEFAULT_MARGIN: usize = 4;

/// Highest derivative order `K` of the identity for a degree-`s` map.
pub fn multipole_order(profile: &CoefficientProfile, s: usize) -> usize {
    match profile {
        CoefficientProfile::Constant | CoefficientProfile::GaugeTrivial { .. } => s - 1,
        CoefficientProfile::PowerX { n, .. } => s * (*n as usize + 1) - 1,
        CoefficientProfile::Dihedral { n, l, m } => s * (*m as usize * (*n + *l) as usize + 1) - 1,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureIdentity {
    pub profile: CoefficientProfile,
    pub map: ConformalMap,
    pub z1: CRat,
    /// Coefficient of `φ(z1)`, a multiple of `π`.
    pub q0: Rat,
    /// `Q^(i)` for `i = 1..=K`, multiples of `π`.
    pub q: Vec<CRat>,
    /// Basis orders whose equations entered the square solve.
    pub orders_used: usize,
    /// Basis orders beyond `orders_used` verified exactly.
    pub held_out_checked: usize,
}

impl QuadratureIdentity {
    pub fn order(&self) -> usize {
        self.q.len()
    }

    /// `Q^(i)`; zero beyond the stored order.
    pub fn coefficient(&self, i: usize) -> CRat {
        if i == 0 {
            CRat::real(self.q0.clone())
        } else {
            self.q.get(i - 1).cloned().unwrap_or_else(CRat::zero)
        }
    }
}

/// Values `φ(z1)`, `∂_z^i φ(z1)` and `∂_z̄^i φ(z1)` for `i = 1..=k`.
pub fn point_derivatives(phi: &BivarPoly, z1: &CRat, k: usize) -> (CRat, Vec<CRat>, Vec<CRat>) {
    let local = phi.recentered(z1);
    let mut fact = Rat::from_integer(1.into());
    let mut dz = Vec::with_capacity(k);
    let mut dzb = Vec::with_capacity(k);
    for i in 1..=k as u32 {
        fact *= Rat::from_integer(i.into());
        dz.push(local.coeff(i, 0).scale(&fact));
        dzb.push(local.coeff(0, i).scale(&fact));
    }
    (local.coeff(0, 0), dz, dzb)
}

/// Right-hand side of the identity as a multiple of `π`.
pub fn evaluate_rhs(identity: &QuadratureIdentity, phi: &BivarPoly) -> CRat {
    let k = identity.order();
    let (v, dz, dzb) = point_derivatives(phi, &identity.z1, k);
    let mut acc = v.scale(&identity.q0);
    for (i, q) in identity.q.iter().enumerate() {
        acc += &(q * &dz[i]);
        acc += &(&q.conj() * &dzb[i]);
    }
    acc
}

/// One complex equation `M[φ] = rhs(φ)` expressed in the real unknowns
/// `(Q0, Re Q^(1), Im Q^(1), …)`.
struct Equation {
    coeffs: Vec<CRat>,
    moment: CRat,
}

impl Equation {
    fn new(phi: &BivarPoly, z1: &CRat, k: usize, moment: CRat) -> Self {
        let (v, dz, dzb) = point_derivatives(phi, z1, k);
        let mut coeffs = Vec::with_capacity(2 * k + 1);
        coeffs.push(v);
        for i in 0..k {
            // Q a + conj(Q) b = x (a + b) + y i (a − b)
            coeffs.push(&dz[i] + &dzb[i]);
            coeffs.push(&CRat::i() * &(&dz[i] - &dzb[i]));
        }
        Equation { coeffs, moment }
    }

    fn real_row(&self) -> (Vec<Rat>, Rat) {
        (self.coeffs.iter().map(|c| c.re.clone()).collect(), self.moment.re.clone())
    }

    fn imag_row(&self) -> (Vec<Rat>, Rat) {
        (self.coeffs.iter().map(|c| c.im.clone()).collect(), self.moment.im.clone())
    }

    fn residual(&self, x: &[Rat]) -> CRat {
        let mut acc = self.moment.clone();
        for (c, xi) in self.coeffs.iter().zip(x) {
            acc -= &c.scale(xi);
        }
        acc
    }
}

/// Exact moments of generated basis elements, with the moment table grown on demand.
pub(super) struct MomentOracle<'a> {
    map: &'a ConformalMap,
    eta: BivarPoly,
    table: MomentTable<CRat>,
}

impl<'a> MomentOracle<'a> {
    pub(super) fn new(map: &'a ConformalMap, eta: BivarPoly) -> Self {
        let table = MomentTable::new(&map.laurent(), 8, 8);
        MomentOracle { map, eta, table }
    }

    pub(super) fn moment(&mut self, phi: &BivarPoly) -> CRat {
        let f = &self.eta * phi;
        let (a, b) = (f.max_z_degree(), f.max_zbar_degree());
        if a > self.table.max_a() || b > self.table.max_b() {
            let na = a.max(self.table.max_a()).max(2 * self.table.max_a());
            let nb = b.max(self.table.max_b()).max(2 * self.table.max_b());
            self.table = MomentTable::new(&self.map.laurent(), na, nb);
        }
        self.table.integrate(&f)
    }
}

/// Builds and verifies the quadrature identity for `profile` on `map`, with the
/// default of four held-out basis orders.
pub fn construct_identity(profile: &CoefficientProfile, map: &ConformalMap) -> Result<QuadratureIdentity> {
    construct_identity_with_margin(profile, map, DEFAULT_MARGIN)
}

pub fn construct_identity_with_margin(
    profile: &CoefficientProfile,
    map: &ConformalMap,
    margin: usize,
) -> Result<QuadratureIdentity> {
    let generator = BasisGenerator::new(profile, &map.z1)?;
    let k = multipole_order(profile, map.degree());
    let attempts: Vec<usize> = match profile {
        CoefficientProfile::Dihedral { .. } => {
            let mut v = vec![k, k + 1];
            if k > 0 {
                v.push(k - 1);
            }
            v
        }
        _ => vec![k],
    };
    let mut tried = Vec::new();
    let mut last_err = None;
    for order in attempts {
        tried.push(order);
        match solve_for_order(&generator, map, order, margin) {
            Ok(id) => return Ok(id),
            Err(e @ (Error::SingularSystem { .. } | Error::HeldOutViolation { .. })) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(match last_err {
        Some(Error::SingularSystem { rank, unknowns, .. }) => Error::SingularSystem { rank, unknowns, tried },
        Some(e) => e,
        None => unreachable!("at least one attempt is made"),
    })
}

fn solve_for_order(generator: &BasisGenerator, map: &ConformalMap, k: usize, margin: usize) -> Result<QuadratureIdentity> {
    let z1 = generator.z1().clone();
    let unknowns = 2 * k + 1;
    let mut oracle = MomentOracle::new(map, generator.profile().eta());
    let mut echelon = Echelon::new();
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::with_capacity(unknowns);
    let mut equations: Vec<(usize, Equation)> = Vec::new();
    let cap = 2 * unknowns + 8;
    let mut order = 0usize;
    while echelon.rank() < unknowns {
        if order > cap {
            return Err(Error::SingularSystem { rank: echelon.rank(), unknowns, tried: vec![k] });
        }
        let phi = generator.element(order)?;
        let eq = Equation::new(&phi, &z1, k, oracle.moment(&phi));
        for (row, rhs) in [eq.real_row(), eq.imag_row()] {
            if rows.len() < unknowns && echelon.try_insert(&row) {
                rows.push((row, rhs));
            }
        }
        equations.push((order, eq));
        order += 1;
    }
    let orders_used = order - 1;
    let (a, b): (Vec<Vec<Rat>>, Vec<Rat>) = rows.into_iter().unzip();
    let x = bareiss_solve(&a, &b).ok_or(Error::SingularSystem { rank: unknowns - 1, unknowns, tried: vec![k] })?;

    for extra in (orders_used + 1)..=(orders_used + margin) {
        let phi = generator.element(extra)?;
        let eq = Equation::new(&phi, &z1, k, oracle.moment(&phi));
        equations.push((extra, eq));
    }
    // Every equation, used or held out, and its conjugate must hold exactly.
    for (ord, eq) in &equations {
        let res = eq.residual(&x);
        if !res.is_zero() {
            return Err(Error::HeldOutViolation { order: *ord, residual: res.to_string() });
        }
    }
    for ord in 1..=(orders_used + margin) {
        let phi = generator.element(ord)?.conj();
        let eq = Equation::new(&phi, &z1, k, oracle.moment(&phi));
        let res = eq.residual(&x);
        if !res.is_zero() {
            return Err(Error::HeldOutViolation { order: ord, residual: format!("conjugate: {res}") });
        }
    }

    let q = (0..k).map(|i| CRat::new(x[2 * i + 1].clone(), x[2 * i + 2].clone())).collect();
    Ok(QuadratureIdentity {
        profile: generator.profile().clone(),
        map: map.clone(),
        z1,
        q0: x[0].clone(),
        q,
        orders_used,
        held_out_checked: margin,
    })
}

/// Solves the identity treating `Q0`, `Q^(i)` and `conj(Q^(i))` as independent
/// complex unknowns, using the equations of `φ_k` and `conj(φ_k)`. Used to
/// confirm that the real-ified solve loses nothing.
pub fn solve_complexified(profile: &CoefficientProfile, map: &ConformalMap, k: usize) -> Result<Vec<CRat>> {
    let generator = BasisGenerator::new(profile, &map.z1)?;
    let mut oracle = MomentOracle::new(map, profile.eta());
    let unknowns = 2 * k + 1;
    let mut rows: Vec<Vec<CRat>> = Vec::new();
    let mut rhs = Vec::new();
    let mut order = 0;
    // Greedy selection over Q(i) via real and imaginary parts of each row.
    let mut echelon = Echelon::new();
    while rows.len() < unknowns && order <= 2 * unknowns + 8 {
        let phi = generator.element(order)?;
        for f in [phi.clone(), phi.conj()] {
            let (v, dz, dzb) = point_derivatives(&f, &map.z1, k);
            let mut row = vec![v];
            for i in 0..k {
                row.push(dz[i].clone());
                row.push(dzb[i].clone());
            }
            let flat: Vec<Rat> = row.iter().flat_map(|c| [c.re.clone(), c.im.clone()]).collect();
            if rows.len() < unknowns && echelon.try_insert(&flat) {
                rhs.push(oracle.moment(&f));
                rows.push(row);
            }
        }
        order += 1;
    }
    solve_complex(&rows, &rhs).ok_or(Error::SingularSystem { rank: rows.len(), unknowns, tried: vec![k] })
}

/// Serialized form of a [`QuadratureIdentity`]; rationals are written as `p/q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
#[serde(deny_unknown_fields)]
pub struct IdentityJson {
    pub profile: String,
    pub map: String,
    pub z1: String,
    pub Q0_pi_multiple: String,
    pub Q: Vec<MultipoleJson>,
    pub held_out_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultipoleJson {
    pub order: usize,
    pub re: String,
    pub im: String,
}

impl QuadratureIdentity {
    pub fn to_json(&self) -> IdentityJson {
        IdentityJson {
            profile: self.profile.to_string(),
            map: self.map.to_string(),
            z1: self.z1.to_string(),
            Q0_pi_multiple: format_rat(&self.q0),
            Q: self
                .q
                .iter()
                .enumerate()
                .map(|(i, c)| MultipoleJson { order: i + 1, re: format_rat(&c.re), im: format_rat(&c.im) })
                .collect(),
            held_out_checked: self.held_out_checked,
        }
    }

    pub fn from_json(j: &IdentityJson) -> Result<Self> {
        let profile = CoefficientProfile::parse(&j.profile)?;
        let map = ConformalMap::parse(&j.map)?;
        let z1 = CRat::parse(&j.z1)?;
        if z1 != map.z1 {
            return Err(Error::Invalid(format!("z1 = {z1} does not match the map's constant term {}", map.z1)));
        }
        let mut q = Vec::with_capacity(j.Q.len());
        for (i, m) in j.Q.iter().enumerate() {
            if m.order != i + 1 {
                return Err(Error::Invalid(format!("multipole orders must be 1, 2, …; found {} at position {}", m.order, i + 1)));
            }
            q.push(CRat::new(parse_rat(&m.re)?, parse_rat(&m.im)?));
        }
        Ok(QuadratureIdentity {
            profile,
            map,
            z1,
            q0: parse_rat(&j.Q0_pi_multiple)?,
            q,
            orders_used: 0,
            held_out_checked: j.held_out_checked,
        })
    }
}
