//! Numerical search for robust pulse areas with fixed phases.
//!
//! A problem fixes a slot pattern (global pulses for AC; alternating local Z
//! rotations and x-y rotations for ZC), a target and an error hypercube.
//! [`two_stage_search`] first maximizes `F(0) + mean_i F(ζ_i)` over the
//! hypercube corners `ζ_i`, then re-maximizes `F(0)` alone from that point so
//! the result is exact at zero error. `F = ½|Tr(U†V)|` throughout.

mod lbfgs;
mod presets;

pub use lbfgs::{minimize, projected_gradient, LbfgsOptions, LbfgsOutcome};
pub use presets::{parse_problem, preset, presets, Preset, DEFAULT_HALF_WIDTH};

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::parallel::with_thread_cap;
use crate::sequences::{ControlScheme, PulseElement, PulseSequence};
use crate::solve::random_seeds;
use crate::su2::{global_pulse, hamilton, z_pulse, ErrorParams, Su2};

/// Upper bound on every searched area.
pub const THETA_MAX: f64 = 3.0 * PI;
pub const DEFAULT_SEEDS: usize = 256;
/// Zero-error fidelity required of an accepted result.
pub const ACCEPT_FIDELITY: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    /// Global pulse `[θ]_φ` (AC).
    Global { phi: f64 },
    /// Local rotation `Z(θ)` (ZC).
    Z,
    /// x-y rotation `[θ]_φ` made of a local Z between two global π/2 pulses (ZC).
    XyRotation { phi: f64 },
}

/// `[π/2]_{φ+π/2} Z(θ) [π/2]_{φ−π/2}` (operator order): `[θ]_φ` at zero error,
/// built from three physical pulses.
pub fn zc_xy_slot(theta: f64, phi: f64, err: ErrorParams) -> Su2 {
    global_pulse(FRAC_PI_2, phi + FRAC_PI_2, err) * z_pulse(theta, err) * global_pulse(FRAC_PI_2, phi - FRAC_PI_2, err)
}

impl Slot {
    pub fn unitary(&self, theta: f64, err: ErrorParams) -> Su2 {
        match *self {
            Slot::Global { phi } => global_pulse(theta, phi, err),
            Slot::Z => z_pulse(theta, err),
            Slot::XyRotation { phi } => zc_xy_slot(theta, phi, err),
        }
    }

    /// `∂/∂θ` of [`Slot::unitary`], from the shift identity
    /// `∂_θ R(θ) = (π/2α)·R(θ+α)` where `α` is the area that makes the
    /// erroneous rotation angle exactly π.
    pub fn derivative(&self, theta: f64, err: ErrorParams) -> [f64; 4] {
        let alpha = match self {
            Slot::Global { .. } => PI / ((1.0 + err.epsilon) * (1.0 + err.delta * err.delta).sqrt()),
            Slot::Z | Slot::XyRotation { .. } => PI / (1.0 + err.epsilon_s),
        };
        let k = PI / (2.0 * alpha);
        self.unitary(theta + alpha, err).components().map(|c| k * c)
    }

    pub fn physical_pulses(&self) -> usize {
        match self {
            Slot::XyRotation { .. } => 3,
            _ => 1,
        }
    }
}

/// Half-widths `(ε₀, δ₀, ε_s₀)` of the error box.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hypercube {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_s: f64,
}

impl Hypercube {
    pub fn new(epsilon: f64, delta: f64, epsilon_s: f64) -> Result<Self> {
        let h = Hypercube { epsilon, delta, epsilon_s };
        if [epsilon, delta, epsilon_s].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "hypercube half-widths must be finite and non-negative: {h:?}"
            )));
        }
        Ok(h)
    }

    /// All `2^m` corners over the `m` axes with non-zero half-width.
    pub fn corners(&self) -> Vec<ErrorParams> {
        let widths = [self.epsilon, self.delta, self.epsilon_s];
        let active: Vec<usize> = (0..3).filter(|&i| widths[i] > 0.0).collect();
        (0..1usize << active.len())
            .map(|mask| {
                let mut v = [0.0; 3];
                for (bit, &axis) in active.iter().enumerate() {
                    v[axis] = if mask >> bit & 1 == 1 { widths[axis] } else { -widths[axis] };
                }
                ErrorParams::new(v[0], v[1], v[2])
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchProblem {
    pub label: String,
    pub scheme: ControlScheme,
    pub target: Su2,
    pub slots: Vec<Slot>,
    pub hypercube: Hypercube,
    pub seeds: usize,
    pub rng_seed: u64,
    /// Extra starting points tried before the random ones.
    pub initial: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub thetas: Vec<f64>,
    /// `F(0) + mean_i F(ζ_i)` at `thetas`.
    pub objective: f64,
    pub fidelity_at_zero: f64,
    pub corner_fidelities: Vec<f64>,
    /// Max-norm of the projected gradient of `F(0)`.
    pub gradient_norm: f64,
    /// Index of the starting point (initial points first, then random seeds).
    pub seed_index: usize,
}

impl SearchProblem {
    pub fn validate(&self) -> Result<()> {
        if self.slots.is_empty() {
            return Err(Error::InvalidArgument("search problem has no slots".into()));
        }
        match self.scheme {
            ControlScheme::AC => {
                if self.slots.iter().any(|s| !matches!(s, Slot::Global { .. })) {
                    return Err(Error::InvalidArgument("AC problems use global slots only".into()));
                }
            }
            ControlScheme::ZC => {
                if self.slots.iter().any(|s| matches!(s, Slot::Global { .. })) {
                    return Err(Error::InvalidArgument("ZC problems use Z and x-y slots only".into()));
                }
            }
            ControlScheme::PC => return Err(Error::InvalidArgument("numerical search supports AC and ZC".into())),
        }
        Hypercube::new(self.hypercube.epsilon, self.hypercube.delta, self.hypercube.epsilon_s)?;
        for s in &self.initial {
            self.check_thetas(s)?;
        }
        Ok(())
    }

    fn check_thetas(&self, thetas: &[f64]) -> Result<()> {
        if thetas.len() != self.slots.len() {
            return Err(Error::InvalidArgument(format!("expected {} areas, got {}", self.slots.len(), thetas.len())));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("non-finite area".into()));
        }
        Ok(())
    }

    pub fn unitary(&self, thetas: &[f64], err: ErrorParams) -> Su2 {
        self.slots.iter().zip(thetas).fold(Su2::IDENTITY, |acc, (s, &t)| acc * s.unitary(t, err))
    }

    pub fn fidelity(&self, thetas: &[f64], err: ErrorParams) -> f64 {
        self.unitary(thetas, err).dot(&self.target).abs()
    }

    /// `F(0) + mean_i F(ζ_i)`; just `F(0)` for an empty hypercube.
    pub fn objective(&self, thetas: &[f64]) -> f64 {
        let corners = self.hypercube.corners();
        let f0 = self.fidelity(thetas, ErrorParams::ZERO);
        if corners.len() <= 1 && corners.first().is_none_or(|c| *c == ErrorParams::ZERO) {
            return f0;
        }
        f0 + corners.iter().map(|&c| self.fidelity(thetas, c)).sum::<f64>() / corners.len() as f64
    }

    /// `∂U/∂θ_i` (as raw quaternions) and `∂F/∂θ_i` at the error point `err`.
    pub fn jacobian(&self, thetas: &[f64], err: ErrorParams) -> (Vec<[f64; 4]>, Vec<f64>) {
        let m = self.slots.len();
        let units: Vec<Su2> = self.slots.iter().zip(thetas).map(|(s, &t)| s.unitary(t, err)).collect();
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(Su2::IDENTITY);
        for u in &units {
            let last = *prefix.last().expect("non-empty");
            prefix.push(last * *u);
        }
        let mut suffix = vec![Su2::IDENTITY; m + 1];
        for i in (0..m).rev() {
            suffix[i] = units[i] * suffix[i + 1];
        }
        let total = prefix[m];
        let sign = if total.dot(&self.target) < 0.0 { -1.0 } else { 1.0 };
        let t = self.target.components();
        let mut du = Vec::with_capacity(m);
        let mut df = Vec::with_capacity(m);
        for i in 0..m {
            let d = self.slots[i].derivative(thetas[i], err);
            let q = hamilton(hamilton(prefix[i].components(), d), suffix[i + 1].components());
            df.push(sign * q.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>());
            du.push(q);
        }
        (du, df)
    }

    fn value_and_gradient(&self, thetas: &[f64], points: &[ErrorParams], corner_weight: f64) -> (f64, Vec<f64>) {
        let mut value = 0.0;
        let mut grad = vec![0.0; thetas.len()];
        for (k, &p) in points.iter().enumerate() {
            let w = if k == 0 { 1.0 } else { corner_weight };
            value += w * self.fidelity(thetas, p);
            let (_, g) = self.jacobian(thetas, p);
            for (a, b) in grad.iter_mut().zip(g) {
                *a += w * b;
            }
        }
        (value, grad)
    }

    /// Objective and its gradient in one pass.
    pub fn objective_gradient(&self, thetas: &[f64]) -> (f64, Vec<f64>) {
        let mut points = vec![ErrorParams::ZERO];
        let corners = self.hypercube.corners();
        let weight = if corners.len() <= 1 && corners.first().is_none_or(|c| *c == ErrorParams::ZERO) {
            0.0
        } else {
            points.extend_from_slice(&corners);
            1.0 / corners.len() as f64
        };
        self.value_and_gradient(thetas, &points, weight)
    }

    /// Physical pulse sequence for `thetas` (x-y slots expand to three pulses).
    pub fn to_sequence(&self, thetas: &[f64]) -> Result<PulseSequence> {
        self.check_thetas(thetas)?;
        let mut el = Vec::new();
        for (s, &t) in self.slots.iter().zip(thetas) {
            match *s {
                Slot::Global { phi } => el.push(PulseElement::global(t, phi)),
                Slot::Z => el.push(PulseElement::z(t)),
                Slot::XyRotation { phi } => {
                    el.push(PulseElement::global(FRAC_PI_2, phi + FRAC_PI_2));
                    el.push(PulseElement::z(t));
                    el.push(PulseElement::global(FRAC_PI_2, phi - FRAC_PI_2));
                }
            }
        }
        PulseSequence::try_new(self.scheme, el, self.label.clone())
    }

    /// Evaluates a given set of areas as if it were a search result.
    pub fn assess(&self, thetas: &[f64], seed_index: usize) -> SearchResult {
        let (f0, g0) = self.value_and_gradient(thetas, &[ErrorParams::ZERO], 0.0);
        let lower = vec![0.0; thetas.len()];
        let upper = vec![THETA_MAX; thetas.len()];
        let pg = projected_gradient(thetas, &g0, &lower, &upper);
        SearchResult {
            thetas: thetas.to_vec(),
            objective: self.objective(thetas),
            fidelity_at_zero: f0,
            corner_fidelities: self.hypercube.corners().iter().map(|&c| self.fidelity(thetas, c)).collect(),
            gradient_norm: pg.iter().fold(0.0, |m, v| m.max(v.abs())),
            seed_index,
        }
    }
}

/// Runs both stages from one starting point.
pub fn search_from(problem: &SearchProblem, start: &[f64], seed_index: usize) -> SearchResult {
    let m = start.len();
    let lower = vec![0.0; m];
    let upper = vec![THETA_MAX; m];
    let opts = LbfgsOptions::default();
    let stage1 = minimize(
        |x| {
            let (v, g) = problem.objective_gradient(x);
            (-v, g.into_iter().map(|v| -v).collect())
        },
        start,
        &lower,
        &upper,
        &opts,
    );
    let stage2 = minimize(
        |x| {
            let (v, g) = problem.value_and_gradient(x, &[ErrorParams::ZERO], 0.0);
            (-v, g.into_iter().map(|v| -v).collect())
        },
        &stage1.x,
        &lower,
        &upper,
        &opts,
    );
    problem.assess(&stage2.x, seed_index)
}

/// Multi-start two-stage search. Seeds run in parallel; the accepted result
/// with the highest objective wins, ties going to the lower seed index.
pub fn two_stage_search(problem: &SearchProblem) -> Result<SearchResult> {
    problem.validate()?;
    let m = problem.slots.len();
    let mut starts = problem.initial.clone();
    starts.extend(random_seeds(&vec![0.0; m], &vec![THETA_MAX; m], problem.seeds, problem.rng_seed));
    let results: Vec<SearchResult> =
        with_thread_cap(|| starts.par_iter().enumerate().map(|(i, s)| search_from(problem, s, i)).collect());
    let best_f0 = results.iter().map(|r| r.fidelity_at_zero).fold(0.0, f64::max);
    results
        .into_iter()
        .filter(|r| r.fidelity_at_zero >= ACCEPT_FIDELITY)
        .reduce(|a, b| if b.objective > a.objective { b } else { a })
        .ok_or_else(|| Error::NoConvergence { what: format!("search '{}'", problem.label), residual: 1.0 - best_f0 })
}
