//! Average gate fidelity under coherent error plus depolarization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sequences::{evaluate, stats_with_slowdown, PulseSequence, DEFAULT_Z_SLOWDOWN};
use crate::su2::{ErrorParams, Su2};

/// Decoherence rate `γ` (units of Ω) and the Z-rotation slowdown used to turn
/// a sequence into a duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityParams {
    pub gamma: f64,
    pub z_slowdown: f64,
}

impl FidelityParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("decoherence rate must be finite and ≥ 0, got {gamma}")));
        }
        Ok(FidelityParams { gamma, z_slowdown: DEFAULT_Z_SLOWDOWN })
    }

    pub fn with_z_slowdown(mut self, z_slowdown: f64) -> Self {
        self.z_slowdown = z_slowdown;
        self
    }
}

impl Default for FidelityParams {
    fn default() -> Self {
        FidelityParams { gamma: 0.0, z_slowdown: DEFAULT_Z_SLOWDOWN }
    }
}

/// Haar-averaged fidelity of a qubit gate whose coherent part has overlap
/// `overlap = ½|Tr(U†V)|` with the target, followed by depolarization for a
/// time `t`: `e^{−γt}(|Tr|² + 2)/6 + (1 − e^{−γt})/2`.
pub fn fidelity_from_overlap(overlap: f64, t: f64, gamma: f64) -> f64 {
    let keep = (-gamma * t).exp();
    let tr2 = 4.0 * overlap * overlap;
    keep * (tr2 + 2.0) / 6.0 + (1.0 - keep) / 2.0
}

/// Average gate fidelity of `seq` against `target` under `err`, with the
/// sequence's own duration.
pub fn avg_gate_fidelity(seq: &PulseSequence, target: Su2, err: ErrorParams, fp: FidelityParams) -> f64 {
    let t = stats_with_slowdown(seq, fp.z_slowdown).duration;
    avg_gate_fidelity_for(seq, target, err, fp.gamma, t)
}

/// As [`avg_gate_fidelity`] but with an explicit duration (e.g. the longest
/// sequence of a parallel ensemble).
pub fn avg_gate_fidelity_for(seq: &PulseSequence, target: Su2, err: ErrorParams, gamma: f64, duration: f64) -> f64 {
    fidelity_from_overlap(evaluate(seq, err).dot(&target).abs(), duration, gamma)
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Fidelity averaged over `samples` random pure states drawn uniformly from
/// the Bloch sphere: each state contributes
/// `e^{−γt}|⟨ψ|U†V|ψ⟩|² + (1 − e^{−γt})/2`.
pub fn haar_mc_fidelity(
    seq: &PulseSequence,
    target: Su2,
    err: ErrorParams,
    fp: FidelityParams,
    samples: usize,
    rng_seed: u64,
) -> Result<McEstimate> {
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 samples, got {samples}")));
    }
    let t = stats_with_slowdown(seq, fp.z_slowdown).duration;
    let keep = (-fp.gamma * t).exp();
    // ⟨ψ|W|ψ⟩ = w − i(v·n) for W = w − i v·σ and Bloch vector n.
    let [w, x, y, z] = (target.inverse() * evaluate(seq, err)).components();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let cos_t: f64 = rng.gen_range(-1.0..=1.0);
        let az: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let vn = x * sin_t * az.cos() + y * sin_t * az.sin() + z * cos_t;
        let f = keep * (w * w + vn * vn) + (1.0 - keep) / 2.0;
        sum += f;
        sum_sq += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(McEstimate { mean, stderr: (var / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{basic_pc, ControlScheme, PulseElement};
    use crate::su2::{global_pulse, hadamard};
    use std::f64::consts::PI;

    #[test]
    fn closed_form_limits() {
        assert_eq!(fidelity_from_overlap(1.0, 10.0, 0.0), 1.0);
        assert!((fidelity_from_overlap(0.0, 0.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((fidelity_from_overlap(0.7, 1e9, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decay_pulls_towards_one_half() {
        // Above overlap ½ the coherent fidelity exceeds ½ and decay lowers it;
        // below, decay raises it.
        for (o, sign) in [(0.3, 1.0), (0.6, -1.0), (0.9, -1.0), (1.0, -1.0)] {
            let mut last = fidelity_from_overlap(o, 20.0, 0.0);
            for g in [1e-5, 1e-3, 0.1, 1.0] {
                let f = fidelity_from_overlap(o, 20.0, g);
                assert!(sign * (f - last) > 0.0, "overlap {o}, γ {g}");
                last = f;
            }
        }
    }

    #[test]
    fn perfect_sequence_samples_are_exact() {
        let seq = basic_pc(0.0, PI / 2.0, PI);
        let mc = haar_mc_fidelity(&seq, hadamard(), ErrorParams::ZERO, FidelityParams::default(), 1000, 3).unwrap();
        assert!((mc.mean - 1.0).abs() < 1e-14 && mc.stderr < 1e-7);
    }

    #[test]
    fn identity_under_decay() {
        let seq = PulseSequence::new(ControlScheme::PC, vec![PulseElement::global(2.0 * PI, 0.3)], "2pi");
        let fp = FidelityParams::new(0.01).unwrap();
        let mc = haar_mc_fidelity(&seq, global_pulse(2.0 * PI, 0.0, ErrorParams::ZERO), ErrorParams::ZERO, fp, 1000, 1)
            .unwrap();
        let keep = (-0.01 * 2.0 * PI).exp();
        assert!((mc.mean - (keep + (1.0 - keep) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        let seq = basic_pc(0.3, 1.1, 2.0);
        let target = hadamard();
        let err = ErrorParams::new(0.2, -0.15, 0.0);
        let fp = FidelityParams::new(0.002).unwrap();
        let closed = avg_gate_fidelity(&seq, target, err, fp);
        let mc = haar_mc_fidelity(&seq, target, err, fp, 100_000, 11).unwrap();
        assert!((closed - mc.mean).abs() < 3.0 * mc.stderr, "{closed} vs {mc:?}");
        assert!(haar_mc_fidelity(&seq, target, err, fp, 10, 1).is_err());
    }
}
