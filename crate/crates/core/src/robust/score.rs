//! SCOREn: nested switchback pulses compensating detuning to order n.
//!
//! `[ϑ₁]…[ϑₙ]_{φ+π} [Θ]_φ [ϑₙ]_{φ+π}…[ϑ₁]` with phases alternating between
//! `φ` and `φ+π` (innermost `φ+π`) and `Θ = θ + Σ_k (−1)^{n−k} 2ϑ_k`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Mutex, OnceLock};

use super::{
    norm4, solve_family, Family, FamilyProblem, FamilyRoot, FamilyTarget, RobustFamilySolution, SolveOptions, SOLVE_JET,
};
use crate::error::{Error, Result};
use crate::jet::ErrorDirection;
use crate::sequences::{product_jet, series_residual, ControlScheme, PulseElement, PulseSequence};
use crate::su2::{global_pulse, ErrorParams};
use crate::tables;

pub const MAX_SCORE_ORDER: usize = 4;

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < TAU {
        Ok(())
    } else {
        Err(Error::Domain { what: "SCORE", value: theta })
    }
}

/// Closed-form SCORE1 angle `ϑ₁ = π − θ/2 − asin(½ sin(θ/2))`.
pub fn score1_angle(theta: f64) -> f64 {
    PI - theta / 2.0 - (0.5 * (theta / 2.0).sin()).asin()
}

fn score_elements(theta: f64, phi: f64, varthetas: &[f64]) -> Vec<PulseElement> {
    let n = varthetas.len();
    let phase = |k: usize| if (n - k + 1) % 2 == 1 { phi + PI } else { phi };
    let central = theta
        + varthetas
            .iter()
            .enumerate()
            .map(|(i, v)| if (n - (i + 1)) % 2 == 0 { 2.0 * v } else { -2.0 * v })
            .sum::<f64>();
    let mut out = Vec::with_capacity(2 * n + 1);
    out.extend(varthetas.iter().enumerate().map(|(i, &v)| PulseElement::global(v, phase(i + 1))));
    out.push(PulseElement::global(central, phi));
    out.extend(varthetas.iter().enumerate().rev().map(|(i, &v)| PulseElement::global(v, phase(i + 1))));
    out
}

/// The SCOREn layout for given auxiliary angles `ϑ₁…ϑₙ`.
pub fn score_n_sequence(theta: f64, phi: f64, varthetas: &[f64]) -> Result<PulseSequence> {
    PulseSequence::try_new(
        ControlScheme::PC,
        score_elements(theta, phi, varthetas),
        format!("SCORE{}", varthetas.len()),
    )
}

/// SCORE1 from its closed form: `[ϑ₁]_{φ+π} [θ+2ϑ₁]_φ [ϑ₁]_{φ+π}`.
pub fn score1(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_theta(theta)?;
    score_n_sequence(theta, phi, &[score1_angle(theta)])
}

type CacheKey = (u64, usize, bool, usize, u64);

fn solve_roots(theta: f64, n: usize, opts: &SolveOptions) -> Result<Vec<FamilyRoot>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Vec<FamilyRoot>>>> = OnceLock::new();
    let key = (theta.to_bits(), n, opts.table_seeds, opts.random_seeds, opts.rng_seed);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(r.clone());
    }

    let target = global_pulse(theta, 0.0, ErrorParams::ZERO);
    let dirs = [ErrorDirection::DETUNING];
    let residual = move |v: &[f64]| {
        let mut out = Vec::with_capacity(4 * (n + 1));
        series_residual::<SOLVE_JET>(&score_elements(theta, 0.0, v), target, &dirs, n, &mut out);
        out
    };
    let next_order = move |v: &[f64]| {
        norm4(product_jet::<SOLVE_JET>(&score_elements(theta, 0.0, v), ErrorDirection::DETUNING).coeff(n + 1))
    };
    let area = move |v: &[f64]| score_elements(theta, 0.0, v).iter().map(global_area).sum();
    let problem = FamilyProblem {
        what: format!("SCORE{n} at θ = {:.6}π", theta / PI),
        residual: &residual,
        next_order: &next_order,
        area: &area,
        lower: vec![0.0; n],
        upper: vec![3.0 * PI; n],
        periodic: vec![false; n],
        seed_lower: vec![0.0; n],
        seed_upper: vec![TAU; n],
    };
    let mut table_seeds = Vec::new();
    if let Some(row) = tables::table("scoren").and_then(|t| t.row_at(theta / PI)) {
        table_seeds.push(row.radians(n - 1));
    }
    // SCORE1 has a closed form; it defines the family at n = 1 even where
    // another root has a smaller next-order residual.
    let structural: Vec<Vec<f64>> = if n == 1 { vec![vec![score1_angle(theta)]] } else { Vec::new() };
    let roots = solve_family(&problem, &table_seeds, &structural, opts)?;
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, roots.clone());
    Ok(roots)
}

fn global_area(e: &PulseElement) -> f64 {
    match *e {
        PulseElement::Global { theta, .. } => theta,
        PulseElement::LocalZ { .. } => 0.0,
    }
}

/// SCOREn with the default seeding (table rows, then random seeds).
pub fn score_n(theta: f64, phi: f64, n: usize) -> Result<RobustFamilySolution> {
    score_n_with(theta, phi, n, &SolveOptions::default())
}

pub fn score_n_with(theta: f64, phi: f64, n: usize, opts: &SolveOptions) -> Result<RobustFamilySolution> {
    check_theta(theta)?;
    if !(1..=MAX_SCORE_ORDER).contains(&n) {
        return Err(Error::InvalidArgument(format!("SCORE order {n} outside 1..={MAX_SCORE_ORDER}")));
    }
    let mut roots = solve_roots(theta, n, opts)?;
    let best = roots.remove(0);
    let sequence = score_n_sequence(theta, phi, &best.params)?;
    Ok(RobustFamilySolution {
        family: Family::Score,
        order: n,
        target: FamilyTarget::Rotation { theta, phi },
        residual: best.residual,
        next_order_residual: best.next_order_residual,
        params: best.params,
        alternatives: roots,
        sequence,
    })
}
