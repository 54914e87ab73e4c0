//! Robust error propagation (REP): whether a replacement sequence for
//! `[θ]_φ` reproduces the pulse's first-order error response, so it can be
//! substituted into a robust outer sequence without spoiling that robustness.

use crate::error::{Error, Result};
use crate::sequences::{evaluate, PulseSequence};
use crate::su2::{global_pulse, ErrorParams, Su2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepKind {
    /// Amplitude error ε.
    Epsilon,
    /// Detuning δ.
    Delta,
}

impl RepKind {
    fn params(self, zeta: f64) -> ErrorParams {
        match self {
            RepKind::Epsilon => ErrorParams::amplitude(zeta),
            RepKind::Delta => ErrorParams::detuning(zeta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepReport {
    pub pass: bool,
    /// Largest component of the difference between the two first derivatives.
    pub deviation: f64,
}

const STEP: f64 = 1e-3;
pub const REP_TOL: f64 = 1e-7;

/// Richardson-extrapolated central difference of `f` at zero.
fn derivative(f: impl Fn(f64) -> Su2) -> [f64; 4] {
    let d = |h: f64| {
        let (p, m) = (f(h).components(), f(-h).components());
        [0, 1, 2, 3].map(|i| (p[i] - m[i]) / (2.0 * h))
    };
    let (a, b) = (d(STEP), d(STEP / 2.0));
    [0, 1, 2, 3].map(|i| (4.0 * b[i] - a[i]) / 3.0)
}

/// Compares `d/dζ` of the replacement built by `builder(θ, φ)` with that of
/// the bare pulse `[θ]_φ` under the chosen error.
///
/// The replacement must equal the pulse at zero error (up to a global sign,
/// which is aligned before comparing).
pub fn rep_check<F>(builder: F, theta: f64, phi: f64, kind: RepKind) -> Result<RepReport>
where
    F: Fn(f64, f64) -> Result<PulseSequence>,
{
    let seq = builder(theta, phi)?;
    let target = global_pulse(theta, phi, ErrorParams::ZERO);
    let u0 = evaluate(&seq, ErrorParams::ZERO);
    let overlap = u0.dot(&target);
    if (overlap.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::Verification(format!(
            "replacement for [{theta:.6}]_{phi:.6} is not the same rotation (overlap {overlap:.3e})"
        )));
    }
    let s = overlap.signum();
    let ds = derivative(|z| evaluate(&seq, kind.params(z)));
    let dp = derivative(|z| global_pulse(theta, phi, kind.params(z)));
    let deviation = ds.iter().zip(&dp).map(|(a, b)| (s * a - b).abs()).fold(0.0, f64::max);
    Ok(RepReport { pass: deviation < REP_TOL, deviation })
}
