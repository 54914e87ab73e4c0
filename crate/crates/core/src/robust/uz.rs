//! UZn and sUZn: amplitude-robust ZC sequences built from a time-reversal
//! symmetric pair of global halves around a local Z rotation.
//!
//! `Z(α) · H · Z(β+π) · rev(H) · Z(γ−π)` where
//! `H = [2π]_{φ₁+π}…[2π]_{φₙ+π} [π/2]_π` (UZn) or
//! `H = [π]_{φ₁+π}…[π]_{φₙ+π} [π/2]_{φₙ₊₁+π}` (sUZn).
//! The phases are target independent: they only need `H · rev(H) = [π]_π`
//! up to `O(ε^{n+1})`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::{Mutex, OnceLock};

use super::{
    norm4, solve_family, Family, FamilyProblem, FamilyRoot, FamilyTarget, RobustFamilySolution, SolveOptions, SOLVE_JET,
};
use crate::error::{Error, Result};
use crate::jet::ErrorDirection;
use crate::sequences::{product_jet, ControlScheme, EulerTarget, PulseElement, PulseSequence};
use crate::su2::{global_pulse, ErrorParams};
use crate::tables;

pub const MAX_UZ_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Uz,
    Suz,
}

impl Kind {
    fn n_params(self, n: usize) -> usize {
        match self {
            Kind::Uz => n,
            Kind::Suz => n + 1,
        }
    }

    fn table(self) -> &'static str {
        match self {
            Kind::Uz => "uzn",
            Kind::Suz => "suzn",
        }
    }

    fn half(self, phases: &[f64]) -> Vec<PulseElement> {
        match self {
            Kind::Uz => phases
                .iter()
                .map(|&p| PulseElement::global(TAU, p + PI))
                .chain(std::iter::once(PulseElement::global(FRAC_PI_2, PI)))
                .collect(),
            Kind::Suz => {
                let (last, rest) = phases.split_last().expect("sUZ needs at least one phase");
                rest.iter()
                    .map(|&p| PulseElement::global(PI, p + PI))
                    .chain(std::iter::once(PulseElement::global(FRAC_PI_2, last + PI)))
                    .collect()
            }
        }
    }

    fn symmetric_product(self, phases: &[f64]) -> Vec<PulseElement> {
        let mut h = self.half(phases);
        let rev: Vec<_> = h.iter().rev().copied().collect();
        h.extend(rev);
        h
    }
}

/// Residual of `H·rev(H) = [π]_π + O(ε^{n+1})`. The sign is matched exactly:
/// with `−[π]_π` the outer Z rotations would no longer combine into the
/// intended target.
fn trs_residual(kind: Kind, n: usize, phases: &[f64]) -> Vec<f64> {
    let j = product_jet::<SOLVE_JET>(&kind.symmetric_product(phases), ErrorDirection::AMPLITUDE);
    let t = global_pulse(PI, PI, ErrorParams::ZERO).components();
    let mut out: Vec<f64> = j.coeff(0).iter().zip(&t).map(|(a, b)| a - b).collect();
    for k in 1..=n {
        out.extend_from_slice(&j.coeff(k));
    }
    out
}

fn solutions(kind: Kind, n: usize, opts: &SolveOptions) -> Result<Vec<FamilyRoot>> {
    if !(1..=MAX_UZ_ORDER).contains(&n) {
        return Err(Error::InvalidArgument(format!("UZ order {n} outside 1..={MAX_UZ_ORDER}")));
    }
    type Key = (Kind, usize, bool, usize, u64);
    static CACHE: OnceLock<Mutex<HashMap<Key, Vec<FamilyRoot>>>> = OnceLock::new();
    let key = (kind, n, opts.table_seeds, opts.random_seeds, opts.rng_seed);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(r.clone());
    }
    let m = kind.n_params(n);
    let residual = move |p: &[f64]| trs_residual(kind, n, p);
    let next_order = move |p: &[f64]| {
        norm4(product_jet::<SOLVE_JET>(&kind.symmetric_product(p), ErrorDirection::AMPLITUDE).coeff(n + 1))
    };
    let area = move |p: &[f64]| {
        kind.symmetric_product(p)
            .iter()
            .map(|e| match e {
                PulseElement::Global { theta, .. } => *theta,
                PulseElement::LocalZ { .. } => 0.0,
            })
            .sum()
    };
    let problem = FamilyProblem {
        what: format!("{}{n} phases", if kind == Kind::Uz { "UZ" } else { "sUZ" }),
        residual: &residual,
        next_order: &next_order,
        area: &area,
        lower: vec![-4.0 * PI; m],
        upper: vec![4.0 * PI; m],
        periodic: vec![true; m],
        seed_lower: vec![0.0; m],
        seed_upper: vec![TAU; m],
    };
    let seeds: Vec<Vec<f64>> =
        tables::table(kind.table()).and_then(|t| t.row_at(n as f64)).map(|r| r.radians(0)).into_iter().collect();
    let roots = solve_family(&problem, &seeds, &[], opts)?;
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, roots.clone());
    Ok(roots)
}

/// Every distinct UZn phase solution found, best first.
pub fn uz_phase_solutions(n: usize, opts: &SolveOptions) -> Result<Vec<FamilyRoot>> {
    solutions(Kind::Uz, n, opts)
}

pub fn suz_phase_solutions(n: usize, opts: &SolveOptions) -> Result<Vec<FamilyRoot>> {
    solutions(Kind::Suz, n, opts)
}

/// The published UZn phases refined to full precision.
pub fn uz_n_phases(n: usize) -> Result<Vec<f64>> {
    Ok(solutions(Kind::Uz, n, &SolveOptions::default())?.remove(0).params)
}

pub fn suz_n_phases(n: usize) -> Result<Vec<f64>> {
    Ok(solutions(Kind::Suz, n, &SolveOptions::default())?.remove(0).params)
}

fn build(kind: Kind, alpha: f64, beta: f64, gamma: f64, n: usize) -> Result<RobustFamilySolution> {
    if ![alpha, beta, gamma].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite Euler angle".into()));
    }
    let mut roots = solutions(kind, n, &SolveOptions::default())?;
    let best = roots.remove(0);
    let half = kind.half(&best.params);
    let mut el = Vec::with_capacity(2 * half.len() + 3);
    el.push(PulseElement::z(alpha));
    el.extend_from_slice(&half);
    // The mirrored half with every phase advanced by π: Z(π)·M·Z(−π), so the
    // Z angles are exactly the Euler angles.
    el.push(PulseElement::z(beta));
    el.extend(half.iter().rev().map(|e| match *e {
        PulseElement::Global { theta, phi } => PulseElement::global(theta, phi + PI),
        z => z,
    }));
    el.push(PulseElement::z(gamma));
    let (family, label) = match kind {
        Kind::Uz => (Family::Uz, format!("UZ{n}")),
        Kind::Suz => (Family::Suz, format!("sUZ{n}")),
    };
    Ok(RobustFamilySolution {
        family,
        order: n,
        target: FamilyTarget::Euler(EulerTarget::zyz(alpha, beta, gamma)),
        residual: best.residual,
        next_order_residual: best.next_order_residual,
        sequence: PulseSequence::try_new(ControlScheme::ZC, el, label)?,
        params: best.params,
        alternatives: roots,
    })
}

/// UZn realizing the ZC target `Z(α)[π/2]_π Z(β)[π/2]_0 Z(γ)`.
pub fn uz_n(alpha: f64, beta: f64, gamma: f64, n: usize) -> Result<RobustFamilySolution> {
    build(Kind::Uz, alpha, beta, gamma, n)
}

pub fn suz_n(alpha: f64, beta: f64, gamma: f64, n: usize) -> Result<RobustFamilySolution> {
    build(Kind::Suz, alpha, beta, gamma, n)
}
