//! Building robust ZC sequences from any robust time-reversal symmetric pair.
//!
//! If a global sequence `H` satisfies `H · mirror(H) = [θ]_φ + O(ε^{n+1})`,
//! then `Z(α) · H · Z(β) · mirror(H) · Z(γ)` equals
//! `Z(α) [θ/2]_φ Z(β) [θ/2]_φ Z(γ) + O(ε^{n+1})` for every α, β, γ: the
//! middle Z rotation splits into `cos(β/2)·1 − i sin(β/2)·σz`, and σz passes
//! through `H` by negating every area, which turns `H` into `mirror(H)⁻¹`.

use std::f64::consts::{PI, TAU};

use super::{norm4, SOLVE_JET};
use crate::error::{Error, Result};
use crate::jet::ErrorDirection;
use crate::sequences::{product_jet, ControlScheme, PulseElement, PulseSequence};
use crate::solve::{multistart, random_seeds, LmOptions, RootProblem};

/// Tolerance of the zero-error and Taylor-coefficient checks.
const VERIFY_TOL: f64 = 1e-8;

/// A global pulse sequence whose mirrored product is a verified robust rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrsHalfSequence {
    half: Vec<PulseElement>,
    theta: f64,
    phi: f64,
    order: usize,
}

impl TrsHalfSequence {
    /// Checks `half · mirror(half) = [θ]_φ + O(ε^{order+1})` and records the
    /// rotation. `θ ∈ [0, 2π]` is read off with its sign, so the product is
    /// exactly `[θ]_φ`, not merely equal up to a global phase.
    pub fn new(half: &[(f64, f64)], order: usize) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::InvalidArgument("empty half sequence".into()));
        }
        if order + 1 >= SOLVE_JET {
            return Err(Error::InvalidArgument(format!("order {order} too high to verify")));
        }
        let half: Vec<PulseElement> = half.iter().map(|&(t, p)| PulseElement::global(t, p)).collect();
        PulseSequence::try_new(ControlScheme::PC, half.clone(), "half")?;
        let full = symmetric(&half);
        let j = product_jet::<SOLVE_JET>(&full, ErrorDirection::AMPLITUDE);
        let [w, x, y, z] = j.coeff(0);
        if z.abs() > VERIFY_TOL {
            return Err(Error::Verification(format!("mirrored product is not an equatorial rotation (z = {z:.3e})")));
        }
        let s = x.hypot(y);
        let theta = 2.0 * s.atan2(w);
        let phi = if s < VERIFY_TOL { 0.0 } else { y.atan2(x).rem_euclid(TAU) };
        for k in 1..=order {
            let c = norm4(j.coeff(k));
            if c > VERIFY_TOL {
                return Err(Error::Verification(format!("order-{k} amplitude coefficient {c:.3e} does not vanish")));
            }
        }
        Ok(TrsHalfSequence { half, theta, phi, order })
    }

    /// `(θ, φ)` with `half · mirror(half) = [θ]_φ` at zero error.
    pub fn rotation(&self) -> (f64, f64) {
        (self.theta, self.phi)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> &[PulseElement] {
        &self.half
    }

    /// Finds a half `[2π]_{ψ₁}…[2π]_{ψₘ} [θ/2]_φ` whose mirrored product is
    /// `[θ]_φ` robust to amplitude error at `order`. Uses `m = 2·order`
    /// phases; fewer only suffice for special θ such as π.
    pub fn solve(theta: f64, phi: f64, order: usize, rng_seed: u64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0 && theta < TAU) {
            return Err(Error::Domain { what: "TRS half", value: theta });
        }
        let m = 2 * order;
        let build = move |psi: &[f64]| -> Vec<PulseElement> {
            let mut h: Vec<PulseElement> = psi.iter().map(|&p| PulseElement::global(TAU, p)).collect();
            h.push(PulseElement::global(theta / 2.0, phi));
            symmetric(&h)
        };
        let residual = move |psi: &[f64]| {
            let j = product_jet::<SOLVE_JET>(&build(psi), ErrorDirection::AMPLITUDE);
            (1..=order).flat_map(|k| j.coeff(k)).collect::<Vec<f64>>()
        };
        let lower = vec![-4.0 * PI; m];
        let upper = vec![4.0 * PI; m];
        let problem = RootProblem { residual: &residual, lower, upper, periodic: vec![true; m], accept: 1e-11 };
        let seeds = random_seeds(&vec![0.0; m], &vec![TAU; m], 32, rng_seed);
        let root = multistart(&problem, &seeds, &LmOptions::default())
            .into_iter()
            .next()
            .ok_or_else(|| Error::NoConvergence { what: format!("TRS half of order {order}"), residual: f64::NAN })?;
        let mut half: Vec<(f64, f64)> = root.x.iter().map(|&p| (TAU, p)).collect();
        half.push((theta / 2.0, phi));
        Self::new(&half, order)
    }
}

fn symmetric(half: &[PulseElement]) -> Vec<PulseElement> {
    let mut v = half.to_vec();
    v.extend(half.iter().rev().copied());
    v
}

/// `Z(α) · H · Z(β) · mirror(H) · Z(γ)`.
pub fn theorem1_construct(half: &TrsHalfSequence, alpha: f64, beta: f64, gamma: f64) -> PulseSequence {
    let mut el = Vec::with_capacity(2 * half.half.len() + 3);
    el.push(PulseElement::z(alpha));
    el.extend_from_slice(&half.half);
    el.push(PulseElement::z(beta));
    el.extend(half.half.iter().rev().copied());
    el.push(PulseElement::z(gamma));
    PulseSequence::new(ControlScheme::ZC, el, "TRS")
}
