//! Concatenated sequences: every pulse of a robust outer sequence replaced by
//! an inner sequence that keeps the pulse's response to the outer error
//! while cancelling a second error.

use std::f64::consts::TAU;

use super::rep::{rep_check, RepKind};
use super::{ra1, score1, up1, uz_n};
use crate::error::{Error, Result};
use crate::sequences::{ControlScheme, PulseElement, PulseSequence};

/// Area treated as a full 2π rotation (left in place by [`concatenate`]).
const FULL_TURN_TOL: f64 = 1e-9;

/// Replaces every global pulse of `outer` other than 2π pulses by
/// `inner(θ, φ)`. Each replacement is checked with [`rep_check`] for the
/// error the outer sequence compensates; a failing replacement is an error.
pub fn concatenate<F>(outer: &PulseSequence, inner: F, preserved: RepKind) -> Result<PulseSequence>
where
    F: Fn(f64, f64) -> Result<PulseSequence>,
{
    let label = outer.label().to_string();
    outer
        .replace_globals(|_, theta, phi| {
            if (theta - TAU).abs() < FULL_TURN_TOL || theta == 0.0 {
                return Ok(None);
            }
            let rep = rep_check(&inner, theta, phi, preserved)?;
            if !rep.pass {
                return Err(Error::Verification(format!(
                    "inner sequence for [{theta:.6}]_{phi:.6} does not preserve the {preserved:?} response (deviation {:.3e})",
                    rep.deviation
                )));
            }
            inner(theta, phi).map(Some)
        })
        .map(|s| s.with_label(label))
}

/// UP1 with each π/2 and π pulse replaced by SCORE1.
pub fn sr1_in_up1(alpha: f64, beta: f64, gamma: f64) -> Result<PulseSequence> {
    Ok(concatenate(&up1(alpha, beta, gamma).sequence, score1, RepKind::Epsilon)?.with_label("SR1inUP1"))
}

/// UZ1 with both π/2 pulses replaced by SCORE1.
pub fn sr1_in_uz1(alpha: f64, beta: f64, gamma: f64) -> Result<PulseSequence> {
    Ok(concatenate(&uz_n(alpha, beta, gamma, 1)?.sequence, score1, RepKind::Epsilon)?.with_label("SR1inUZ1"))
}

/// RA1 with its final `[θ]_φ` replaced by SCORE1; the compensating prefix is
/// kept as is because it is already first-order insensitive to detuning.
pub fn sr1_in_ra1(theta: f64, phi: f64) -> Result<PulseSequence> {
    let outer = ra1(theta, phi)?;
    let (last, prefix) = outer.elements().split_last().expect("RA1 is non-empty");
    let mut el: Vec<PulseElement> = prefix.to_vec();
    if let PulseElement::Global { theta, phi } = *last {
        el.extend_from_slice(score1(theta, phi)?.elements());
    }
    PulseSequence::try_new(ControlScheme::AC, el, "SR1inRA1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robust::pc_benchmark_angles;
    use crate::sequences::{basic_pc, basic_zc, evaluate, stats};
    use crate::su2::{global_pulse, infidelity, ErrorParams, Su2};
    use std::f64::consts::PI;

    fn slopes(seq: &PulseSequence, target: Su2) -> [f64; 3] {
        let f = |e: ErrorParams| infidelity(evaluate(seq, e), target);
        let s = |g: &dyn Fn(f64) -> ErrorParams| (f(g(2e-3)) / f(g(1e-3))).log2();
        [s(&ErrorParams::amplitude), s(&ErrorParams::detuning), s(&|z| ErrorParams::new(z, z, 0.0))]
    }

    #[test]
    fn doubly_robust_concatenations() {
        let [a, b, g] = pc_benchmark_angles()[0].1;
        let up = sr1_in_up1(a, b, g).unwrap();
        let st = stats(&up);
        assert_eq!(st.k, 11);
        assert!((st.t - 12.4).abs() < 0.05, "{}", st.t);
        let target = evaluate(&basic_pc(a, b, g), ErrorParams::ZERO);
        assert!(slopes(&up, target).iter().all(|s| *s > 3.9), "{:?}", slopes(&up, target));

        let uz = sr1_in_uz1(0.0, PI / 2.0, PI).unwrap();
        assert_eq!(stats(&uz).k, 11);
        let target = evaluate(&basic_zc(0.0, PI / 2.0, PI), ErrorParams::ZERO);
        assert!(slopes(&uz, target).iter().all(|s| *s > 3.9), "{:?}", slopes(&uz, target));

        let ra = sr1_in_ra1(PI / 2.0, 0.0).unwrap();
        let target = global_pulse(PI / 2.0, 0.0, ErrorParams::ZERO);
        assert!(slopes(&ra, target).iter().all(|s| *s > 3.9), "{:?}", slopes(&ra, target));
    }

    #[test]
    fn concatenation_rejects_non_rep_inner() {
        let outer = up1(0.0, PI / 2.0, PI).sequence;
        assert!(matches!(concatenate(&outer, crate::sequences::bb1, RepKind::Epsilon), Err(Error::Verification(_))));
    }
}
