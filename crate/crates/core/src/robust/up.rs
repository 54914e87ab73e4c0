//! UPn: the PC sequence with `2n` inserted 2π pulses that cancel amplitude
//! error to order n.
//!
//! `[π/2]_α [2π]_{φ₁}…[2π]_{φₙ} [π]_{(γ+α−β)/2} [2π]_{φₙ₊₁}…[2π]_{φ₂ₙ} [π/2]_γ`

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::{Mutex, OnceLock};

use super::{
    norm4, solve_family, Family, FamilyProblem, FamilyRoot, FamilyTarget, RobustFamilySolution, SolveOptions, SOLVE_JET,
};
use crate::error::{Error, Result};
use crate::jet::ErrorDirection;
use crate::sequences::{
    basic_pc, benchmark_targets, evaluate, product_jet, series_residual, ControlScheme, EulerTarget, PulseElement,
    PulseSequence,
};
use crate::su2::{wrap_2pi, ErrorParams};
use crate::tables;

pub const MAX_UP_ORDER: usize = 4;

/// The four benchmark targets as PC angles `(α, β, γ)`; see
/// [`benchmark_targets`] for the choice of representatives.
pub fn pc_benchmark_angles() -> [(&'static str, [f64; 3]); 4] {
    benchmark_targets().map(|t| (t.name, t.pc))
}

fn up_elements(alpha: f64, beta: f64, gamma: f64, phases: &[f64]) -> Vec<PulseElement> {
    let n = phases.len() / 2;
    let mid = crate::sequences::pc_mid_phase(alpha, beta, gamma);
    let mut out = Vec::with_capacity(phases.len() + 3);
    out.push(PulseElement::global(FRAC_PI_2, alpha));
    out.extend(phases[..n].iter().map(|&p| PulseElement::global(TAU, p)));
    out.push(PulseElement::global(PI, mid));
    out.extend(phases[n..].iter().map(|&p| PulseElement::global(TAU, p)));
    out.push(PulseElement::global(FRAC_PI_2, gamma));
    out
}

/// The UPn layout for the given 2n phases.
pub fn up_n_sequence(alpha: f64, beta: f64, gamma: f64, phases: &[f64]) -> Result<PulseSequence> {
    if phases.is_empty() || phases.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "UP needs an even, non-zero number of phases, got {}",
            phases.len()
        )));
    }
    PulseSequence::try_new(
        ControlScheme::PC,
        up_elements(alpha, beta, gamma, phases),
        format!("UP{}", phases.len() / 2),
    )
}

/// Right-hand side `(S, C)` of the UP1 conditions.
fn up1_rhs(alpha: f64, beta: f64, gamma: f64) -> (f64, f64) {
    let h = (alpha - gamma) / 2.0;
    (-0.5 * h.sin(), -0.5 * ((beta / 2.0).cos() + h.cos()))
}

/// Largest violation of the two trigonometric UP1 conditions
/// `sin φ̃₁ + sin φ̃₂ = S`, `cos φ̃₁ + cos φ̃₂ = C`.
pub fn up1_equations_residual(alpha: f64, beta: f64, gamma: f64, phi1: f64, phi2: f64) -> f64 {
    let (s, c) = up1_rhs(alpha, beta, gamma);
    let t1 = -phi1 - beta / 2.0 + alpha;
    let t2 = phi2 + beta / 2.0 - gamma;
    (t1.sin() + t2.sin() - s).abs().max((t1.cos() + t2.cos() - c).abs())
}

fn up1_branches(alpha: f64, beta: f64, gamma: f64) -> [[f64; 2]; 2] {
    let (s, c) = up1_rhs(alpha, beta, gamma);
    let m = if s == 0.0 && c == 0.0 { 0.0 } else { s.atan2(c) };
    let d = (s.hypot(c) / 2.0).min(1.0).acos();
    let phases = |t1: f64, t2: f64| [wrap_2pi(-t1 - beta / 2.0 + alpha), wrap_2pi(t2 - beta / 2.0 + gamma)];
    [phases(m + d, m - d), phases(m - d, m + d)]
}

fn amplitude_next_order(elements: &[PulseElement], order: usize) -> f64 {
    norm4(product_jet::<SOLVE_JET>(elements, ErrorDirection::AMPLITUDE).coeff(order + 1))
}

/// UP1 from the closed-form solution. Both branches are computed; the one
/// with the smaller second-order residual is returned and the other is kept
/// as an alternative.
pub fn up1(alpha: f64, beta: f64, gamma: f64) -> RobustFamilySolution {
    let target = evaluate(&basic_pc(alpha, beta, gamma), ErrorParams::ZERO);
    let mut roots: Vec<FamilyRoot> = up1_branches(alpha, beta, gamma)
        .into_iter()
        .map(|p| {
            let el = up_elements(alpha, beta, gamma, &p);
            let mut r = Vec::new();
            series_residual::<SOLVE_JET>(&el, target, &[ErrorDirection::AMPLITUDE], 1, &mut r);
            FamilyRoot {
                residual: r.iter().fold(0.0, |m, v| m.max(v.abs())),
                next_order_residual: amplitude_next_order(&el, 1),
                area: 6.0 * PI,
                params: p.to_vec(),
                preferred: false,
            }
        })
        .collect();
    if roots[1].next_order_residual < roots[0].next_order_residual * (1.0 - 1e-9) {
        roots.swap(0, 1);
    }
    let best = roots.remove(0);
    RobustFamilySolution {
        family: Family::Up,
        order: 1,
        target: FamilyTarget::Euler(EulerTarget::zyz(alpha, beta, gamma)),
        residual: best.residual,
        next_order_residual: best.next_order_residual,
        sequence: PulseSequence::new(ControlScheme::PC, up_elements(alpha, beta, gamma, &best.params), "UP1"),
        params: best.params,
        alternatives: roots,
    }
}

fn table_seed(alpha: f64, beta: f64, gamma: f64, n: usize) -> Option<Vec<f64>> {
    let (name, _) = pc_benchmark_angles()
        .into_iter()
        .find(|(_, a)| (a[0] - alpha).abs() < 1e-12 && (a[1] - beta).abs() < 1e-12 && (a[2] - gamma).abs() < 1e-12)?;
    let row = tables::table("up")?.row(name)?;
    row.fields.get(n).map(|_| row.radians(n))
}

type CacheKey = ([u64; 3], usize, bool, usize, u64);

pub fn up_n(alpha: f64, beta: f64, gamma: f64, n: usize) -> Result<RobustFamilySolution> {
    up_n_with(alpha, beta, gamma, n, &SolveOptions::default())
}

/// UPn by numerically solving the order-n amplitude conditions.
pub fn up_n_with(alpha: f64, beta: f64, gamma: f64, n: usize, opts: &SolveOptions) -> Result<RobustFamilySolution> {
    if !(1..=MAX_UP_ORDER).contains(&n) {
        return Err(Error::InvalidArgument(format!("UP order {n} outside 1..={MAX_UP_ORDER}")));
    }
    if ![alpha, beta, gamma].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite Euler angle".into()));
    }
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Vec<FamilyRoot>>>> = OnceLock::new();
    let key =
        ([alpha.to_bits(), beta.to_bits(), gamma.to_bits()], n, opts.table_seeds, opts.random_seeds, opts.rng_seed);
    let cache = CACHE.get_or_init(Default::default);
    let cached = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key).cloned();
    let mut roots = match cached {
        Some(r) => r,
        None => {
            let target = evaluate(&basic_pc(alpha, beta, gamma), ErrorParams::ZERO);
            let residual = move |p: &[f64]| {
                let mut out = Vec::with_capacity(4 * (n + 1));
                series_residual::<SOLVE_JET>(
                    &up_elements(alpha, beta, gamma, p),
                    target,
                    &[ErrorDirection::AMPLITUDE],
                    n,
                    &mut out,
                );
                out
            };
            let next_order = move |p: &[f64]| amplitude_next_order(&up_elements(alpha, beta, gamma, p), n);
            let area = move |_: &[f64]| (4.0 * n as f64 + 2.0) * PI;
            let m = 2 * n;
            let problem = FamilyProblem {
                what: format!("UP{n}"),
                residual: &residual,
                next_order: &next_order,
                area: &area,
                lower: vec![-4.0 * PI; m],
                upper: vec![4.0 * PI; m],
                periodic: vec![true; m],
                seed_lower: vec![0.0; m],
                seed_upper: vec![TAU; m],
            };
            let seeds: Vec<Vec<f64>> = table_seed(alpha, beta, gamma, n).into_iter().collect();
            let roots = solve_family(&problem, &seeds, &[], opts)?;
            cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, roots.clone());
            roots
        }
    };
    let best = roots.remove(0);
    Ok(RobustFamilySolution {
        family: Family::Up,
        order: n,
        target: FamilyTarget::Euler(EulerTarget::zyz(alpha, beta, gamma)),
        residual: best.residual,
        next_order_residual: best.next_order_residual,
        sequence: up_n_sequence(alpha, beta, gamma, &best.params)?,
        params: best.params,
        alternatives: roots,
    })
}
