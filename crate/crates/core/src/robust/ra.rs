//! Amplitude-robust sequences for AC (RA1, RA2) and a Stark-robust Z
//! rotation for ZC (RZ1).

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::{Mutex, OnceLock};

use super::{
    norm4, solve_family, Family, FamilyProblem, FamilyRoot, FamilyTarget, RobustFamilySolution, SolveOptions, SOLVE_JET,
};
use crate::error::{Error, Result};
use crate::jet::ErrorDirection;
use crate::sequences::{product_jet, series_residual, ControlScheme, PulseElement, PulseSequence};
use crate::su2::{global_pulse, ErrorParams};
use crate::tables;

fn check_theta(what: &'static str, theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta <= TAU {
        Ok(())
    } else {
        Err(Error::Domain { what, value: theta })
    }
}

/// `[ϑ]_{φ+π/2} [π]_φ [2ϑ]_{φ+π/2} [π]_φ [ϑ]_{φ+π/2} [θ]_φ`, `ϑ = acos(−θ/2π)`.
pub fn ra1(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_theta("RA1", theta)?;
    let v = (-theta / TAU).acos();
    let q = phi + FRAC_PI_2;
    PulseSequence::try_new(
        ControlScheme::AC,
        vec![
            PulseElement::global(v, q),
            PulseElement::global(PI, phi),
            PulseElement::global(2.0 * v, q),
            PulseElement::global(PI, phi),
            PulseElement::global(v, q),
            PulseElement::global(theta, phi),
        ],
        "RA1",
    )
}

fn ra2_elements(theta: f64, phi: f64, v: &[f64]) -> Vec<PulseElement> {
    let q = phi + FRAC_PI_2;
    let (v1, v2, v3) = (v[0], v[1], v[2]);
    let mut out = Vec::with_capacity(14);
    for a in [v1, v1 - v2, v3 - v2, 2.0 * v3, v3 - v2, v1 - v2] {
        out.push(PulseElement::global(a, q));
        out.push(PulseElement::global(PI, phi));
    }
    out.push(PulseElement::global(v1, q));
    out.push(PulseElement::global(theta, phi));
    out
}

/// The three RA2 conditions on `ϑ₁, ϑ₂, ϑ₃` (radians).
pub fn ra2_constraints(v: [f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = (v.map(f64::sin), v.map(f64::cos));
    [
        theta + TAU * c.iter().sum::<f64>(),
        v.iter().zip(&s).map(|(a, b)| a * b).sum(),
        c[0] * s[0] + c[1] * (2.0 * s[0] + s[1]) + c[2] * (2.0 * (s[0] + s[1]) + s[2]),
    ]
}

pub fn ra2(theta: f64, phi: f64) -> Result<RobustFamilySolution> {
    ra2_with(theta, phi, &SolveOptions::default())
}

/// RA2: cancels amplitude error to second order with six π-pulse pairs and
/// a final compensating pulse in front of `[θ]_φ`.
pub fn ra2_with(theta: f64, phi: f64, opts: &SolveOptions) -> Result<RobustFamilySolution> {
    check_theta("RA2", theta)?;
    type Key = (u64, bool, usize, u64);
    static CACHE: OnceLock<Mutex<HashMap<Key, Vec<FamilyRoot>>>> = OnceLock::new();
    let key = (theta.to_bits(), opts.table_seeds, opts.random_seeds, opts.rng_seed);
    let cache = CACHE.get_or_init(Default::default);
    let cached = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key).cloned();
    let mut roots = match cached {
        Some(r) => r,
        None => {
            let target = global_pulse(theta, 0.0, ErrorParams::ZERO);
            let residual = move |v: &[f64]| {
                let mut out = Vec::with_capacity(12);
                series_residual::<SOLVE_JET>(
                    &ra2_elements(theta, 0.0, v),
                    target,
                    &[ErrorDirection::AMPLITUDE],
                    2,
                    &mut out,
                );
                out
            };
            let next_order = move |v: &[f64]| {
                norm4(product_jet::<SOLVE_JET>(&ra2_elements(theta, 0.0, v), ErrorDirection::AMPLITUDE).coeff(3))
            };
            let area = move |v: &[f64]| {
                ra2_elements(theta, 0.0, v)
                    .iter()
                    .map(|e| match e {
                        PulseElement::Global { theta, .. } => *theta,
                        PulseElement::LocalZ { .. } => 0.0,
                    })
                    .sum()
            };
            let problem = FamilyProblem {
                what: format!("RA2 at θ = {:.6}π", theta / PI),
                residual: &residual,
                next_order: &next_order,
                area: &area,
                lower: vec![0.0; 3],
                upper: vec![TAU; 3],
                periodic: vec![false; 3],
                seed_lower: vec![0.0; 3],
                seed_upper: vec![PI; 3],
            };
            let seeds: Vec<Vec<f64>> =
                tables::table("ra2").and_then(|t| t.row_at(theta / PI)).map(|r| r.radians(0)).into_iter().collect();
            let roots = solve_family(&problem, &seeds, &[], opts)?;
            cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, roots.clone());
            roots
        }
    };
    let best = roots.remove(0);
    let sequence = PulseSequence::try_new(ControlScheme::AC, ra2_elements(theta, phi, &best.params), "RA2")?;
    Ok(RobustFamilySolution {
        family: Family::Ra,
        order: 2,
        target: FamilyTarget::Rotation { theta, phi },
        residual: best.residual,
        next_order_residual: best.next_order_residual,
        params: best.params,
        alternatives: roots,
        sequence,
    })
}

/// Z rotation robust to Stark shift:
/// `[π/2]_π Z(ϑ) [π/2]_0 Z(π) [π/2]_π Z(2ϑ) [π/2]_0 Z(π) [π/2]_π Z(ϑ) [π/2]_0 Z(θ)`.
pub fn rz1(theta: f64) -> Result<PulseSequence> {
    check_theta("RZ1", theta)?;
    let v = (-theta / TAU).acos();
    let mut el = Vec::with_capacity(12);
    for a in [v, 2.0 * v, v] {
        el.push(PulseElement::global(FRAC_PI_2, PI));
        el.push(PulseElement::z(a));
        el.push(PulseElement::global(FRAC_PI_2, 0.0));
        el.push(PulseElement::z(PI));
    }
    el.pop();
    el.push(PulseElement::z(theta));
    PulseSequence::try_new(ControlScheme::ZC, el, "RZ1")
}
