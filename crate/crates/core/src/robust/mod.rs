//! Robust composite-pulse families.
//!
//! Every family is a fixed pulse layout with free angles that are solved so
//! the sequence equals its target up to `O(ζ^{n+1})` along an error axis.
//! The conditions are written directly on Taylor coefficients of the
//! sequence unitary (see [`crate::jet`]), so solving and certifying share the
//! same exact derivatives.

mod concat;
mod ra;
mod rep;
mod score;
mod theorem1;
mod up;
mod uz;

pub use concat::{concatenate, sr1_in_ra1, sr1_in_up1, sr1_in_uz1};
pub use ra::{ra1, ra2, ra2_constraints, ra2_with, rz1};
pub use rep::{rep_check, RepKind, RepReport};
pub use score::{score1, score1_angle, score_n, score_n_sequence, score_n_with, MAX_SCORE_ORDER};
pub use theorem1::{theorem1_construct, TrsHalfSequence};
pub use up::{pc_benchmark_angles, up1, up1_equations_residual, up_n, up_n_sequence, up_n_with, MAX_UP_ORDER};
pub use uz::{suz_n, suz_n_phases, suz_phase_solutions, uz_n, uz_n_phases, uz_phase_solutions, MAX_UZ_ORDER};

use std::fmt;

use crate::error::{Error, Result};
use crate::sequences::{EulerTarget, PulseSequence};
use crate::solve::{multistart, param_distance, random_seeds, LmOptions, RootProblem};

/// Jet length used by the family solvers (orders 0 through 6).
pub(crate) const SOLVE_JET: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Score,
    Up,
    Uz,
    Suz,
    Ra,
    Rz,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Score => "SCORE",
            Family::Up => "UP",
            Family::Uz => "UZ",
            Family::Suz => "sUZ",
            Family::Ra => "RA",
            Family::Rz => "RZ",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyTarget {
    /// A rotation `[θ]_φ` (or `Z(θ)` for RZ).
    Rotation { theta: f64, phi: f64 },
    /// An arbitrary unitary given by Euler angles.
    Euler(EulerTarget),
    /// Target-independent parameters (UZn, sUZn).
    Universal,
}

/// One converged root of a family's conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRoot {
    pub params: Vec<f64>,
    /// Largest residual of the solved conditions.
    pub residual: f64,
    /// Norm of the first Taylor coefficient left uncancelled.
    pub next_order_residual: f64,
    /// Total global pulse area in radians.
    pub area: f64,
    /// Whether the root was reached from a published-table or closed-form seed.
    pub preferred: bool,
}

#[derive(Debug, Clone)]
pub struct RobustFamilySolution {
    pub family: Family,
    pub order: usize,
    pub params: Vec<f64>,
    pub target: FamilyTarget,
    pub residual: f64,
    pub next_order_residual: f64,
    /// Every other distinct root found, best first.
    pub alternatives: Vec<FamilyRoot>,
    pub sequence: PulseSequence,
}

/// Controls how family solvers are seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Seed from the published tables when the target matches a row.
    pub table_seeds: bool,
    pub random_seeds: usize,
    pub rng_seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { table_seeds: true, random_seeds: 64, rng_seed: 0x5eed }
    }
}

impl SolveOptions {
    /// Random seeds only.
    pub fn generic(random_seeds: usize, rng_seed: u64) -> Self {
        SolveOptions { table_seeds: false, random_seeds, rng_seed }
    }
}

/// Roots with residuals above this are discarded.
pub(crate) const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Relative tolerance below which two next-order residuals count as equal.
const TIE_TOL: f64 = 1e-9;

pub(crate) struct FamilyProblem<'a> {
    pub what: String,
    pub residual: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
    pub next_order: &'a dyn Fn(&[f64]) -> f64,
    pub area: &'a dyn Fn(&[f64]) -> f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
    /// Box for random seeds (may be narrower than the bounds).
    pub seed_lower: Vec<f64>,
    pub seed_upper: Vec<f64>,
}

/// Runs the multi-start solve and orders the roots.
///
/// The chosen root is the one reached from a preferred seed when there is
/// one (so published and closed-form parameterizations are reproduced):
/// `structural` seeds are always used, `table_seeds` only when enabled in
/// `opts`. Otherwise the root with
/// the smallest next-order residual, ties broken by total area. All roots
/// are returned, best first.
pub(crate) fn solve_family(
    p: &FamilyProblem<'_>,
    table_seeds: &[Vec<f64>],
    structural: &[Vec<f64>],
    opts: &SolveOptions,
) -> Result<Vec<FamilyRoot>> {
    let mut seeds: Vec<Vec<f64>> = structural.to_vec();
    if opts.table_seeds {
        seeds.extend_from_slice(table_seeds);
    }
    let n_preferred = seeds.len();
    seeds.extend(random_seeds(&p.seed_lower, &p.seed_upper, opts.random_seeds, opts.rng_seed));
    let problem = RootProblem {
        residual: p.residual,
        lower: p.lower.clone(),
        upper: p.upper.clone(),
        periodic: p.periodic.clone(),
        accept: ACCEPT_RESIDUAL,
    };
    let roots = multistart(&problem, &seeds, &LmOptions::default());
    if roots.is_empty() {
        let best = seeds
            .iter()
            .take(8)
            .map(|s| {
                let out = crate::solve::levenberg_marquardt(p.residual, s, &p.lower, &p.upper, &LmOptions::default());
                out.residual
            })
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NoConvergence { what: p.what.clone(), residual: best });
    }
    let mut out: Vec<FamilyRoot> = roots
        .into_iter()
        .map(|r| {
            let preferred =
                r.seed_index < n_preferred && param_distance(&r.x, &seeds[r.seed_index], &p.periodic) < 1e-2;
            FamilyRoot {
                next_order_residual: (p.next_order)(&r.x),
                area: (p.area)(&r.x),
                residual: r.residual,
                params: r.x,
                preferred,
            }
        })
        .collect();
    // Next-order residuals are compared on a log scale quantized to the
    // relative tie tolerance, which keeps the ordering a strict total order.
    let bucket = |v: f64| (v.max(1e-300).ln() / TIE_TOL).round();
    out.sort_by(|a, b| {
        b.preferred
            .cmp(&a.preferred)
            .then_with(|| bucket(a.next_order_residual).total_cmp(&bucket(b.next_order_residual)))
            .then_with(|| a.area.total_cmp(&b.area))
    });
    Ok(out)
}

/// Euclidean norm of a 4-vector.
pub(crate) fn norm4(v: [f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
