//! Literature composite pulses used as benchmarks.
//!
//! Each function returns a PC-tagged sequence implementing `[θ]_φ` at zero
//! error. Sequences are listed in operator order (leftmost pulse acts last).

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Mutex, OnceLock};

use super::{series_residual, ControlScheme, PulseElement, PulseSequence};
use crate::error::{Error, Result};
use crate::jet::ErrorDirection;
use crate::solve::{multistart, random_seeds, LmOptions, RootProblem};
use crate::su2::{global_pulse, ErrorParams};

fn check_open_range(what: &'static str, theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < TAU {
        Ok(())
    } else {
        Err(Error::Domain { what, value: theta })
    }
}

fn build(label: &str, pulses: &[(f64, f64)]) -> PulseSequence {
    let elements = pulses.iter().map(|&(t, p)| PulseElement::global(t, p)).collect();
    PulseSequence::new(ControlScheme::PC, elements, label)
}

/// BB1: `[θ]_φ [π]_{φ+χ} [2π]_{φ+3χ} [π]_{φ+χ}` with `χ = acos(−θ/4π)`.
///
/// Amplitude errors cancel through second order.
pub fn bb1(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_open_range("BB1", theta)?;
    let chi = (-theta / (4.0 * PI)).acos();
    Ok(build("BB1", &[(theta, phi), (PI, phi + chi), (TAU, phi + 3.0 * chi), (PI, phi + chi)]))
}

fn corpse_kappa(theta: f64) -> f64 {
    ((theta / 2.0).sin() / 2.0).asin()
}

/// CORPSE: `[θ/2−κ]_φ [2π−2κ]_{φ+π} [2π+θ/2−κ]_φ`, `κ = asin(sin(θ/2)/2)`.
///
/// First-order detuning compensation.
pub fn corpse(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_open_range("CORPSE", theta)?;
    let k = corpse_kappa(theta);
    Ok(build("CORPSE", &[(theta / 2.0 - k, phi), (TAU - 2.0 * k, phi + PI), (TAU + theta / 2.0 - k, phi)]))
}

/// Short CORPSE: `[θ/2−κ]_φ [2π−2κ]_{φ+π} [θ/2−κ]_φ`.
pub fn short_corpse(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_open_range("short CORPSE", theta)?;
    let k = corpse_kappa(theta);
    Ok(build("sCORPSE", &[(theta / 2.0 - k, phi), (TAU - 2.0 * k, phi + PI), (theta / 2.0 - k, phi)]))
}

/// First positive zero of d/dx sinc, where sinc attains its minimum.
const SINC_MIN_X: f64 = 4.493_409_457_909_064;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Inverse of sinc on its decreasing branch `[0, 4.4934]`.
fn arcsinc(v: f64) -> Option<f64> {
    if !(sinc(SINC_MIN_X)..=1.0).contains(&v) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, SINC_MIN_X);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sinc(mid) > v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// SCROFULOUS: `[θ₁]_{φ+φ₁} [π]_{φ+φ₂} [θ₁]_{φ+φ₁}`, first-order amplitude
/// compensation. Real solutions exist for `θ ≲ 1.2217π`.
pub fn scrofulous(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_open_range("SCROFULOUS", theta)?;
    let domain = Error::Domain { what: "SCROFULOUS", value: theta };
    let t1 = arcsinc(2.0 * (theta / 2.0).cos() / PI).ok_or(domain)?;
    let c1 = -PI * t1.cos() / (2.0 * t1 * (theta / 2.0).sin());
    let c2 = -PI / (2.0 * t1);
    if c1.abs() > 1.0 || c2.abs() > 1.0 {
        return Err(Error::Domain { what: "SCROFULOUS", value: theta });
    }
    let p1 = c1.acos();
    let p2 = p1 - c2.acos();
    Ok(build("SCROFULOUS", &[(t1, phi + p1), (PI, phi + p2), (t1, phi + p1)]))
}

/// Previously found minimum-area SCORBUTUS roots `(θ, [areas…, phases…])`,
/// used as extra seeds.
/// Values in units of π.
const SCORBUTUS_SEEDS: &[(f64, [f64; 9])] = &[
    (0.5, [1.53277, 0.41131, 0.41621, 1.44854, 0.5065, 1.42973, 1.16039, 0.27782, 0.50654]),
    (1.0, [0.8649, 1.92251, 0.8923, 0.88818, 0.15171, 0.31719, 1.662, 0.6771, 0.3752]),
];

const SCORBUTUS_RANDOM_SEEDS: usize = 64;
const SCORBUTUS_RNG: u64 = 0x5c0b_b075;

fn scorbutus_elements(x: &[f64]) -> [PulseElement; 5] {
    [
        PulseElement::global(x[0], x[5]),
        PulseElement::global(x[1], x[6]),
        PulseElement::global(x[2], x[7]),
        PulseElement::global(x[3], x[8]),
        PulseElement::global(x[4], 0.0),
    ]
}

fn solve_scorbutus(theta: f64) -> Result<Vec<f64>> {
    let target = global_pulse(theta, 0.0, ErrorParams::ZERO);
    let dirs = [ErrorDirection::AMPLITUDE, ErrorDirection::DETUNING];
    let residual = move |x: &[f64]| {
        let mut out = Vec::with_capacity(12);
        series_residual::<2>(&scorbutus_elements(x), target, &dirs, 1, &mut out);
        out
    };
    let mut lower = vec![0.0; 5];
    let mut upper = vec![3.0 * PI; 5];
    lower.extend([-4.0 * PI; 4]);
    upper.extend([4.0 * PI; 4]);
    let problem = RootProblem {
        residual: &residual,
        lower: lower.clone(),
        upper,
        periodic: [vec![false; 5], vec![true; 4]].concat(),
        accept: 1e-11,
    };
    let mut seeds: Vec<Vec<f64>> = SCORBUTUS_SEEDS
        .iter()
        .filter(|(t, _)| (t * PI - theta).abs() < 1e-12)
        .map(|(_, x)| x.iter().map(|v| v * PI).collect())
        .collect();
    let mut box_hi = vec![TAU; 9];
    box_hi[..5].iter_mut().for_each(|v| *v = 3.0 * PI);
    seeds.extend(random_seeds(&vec![0.0; 9], &box_hi, SCORBUTUS_RANDOM_SEEDS, SCORBUTUS_RNG));
    let roots = multistart(&problem, &seeds, &LmOptions::default());
    roots
        .into_iter()
        .map(|r| r.x)
        .min_by(|a, b| a[..5].iter().sum::<f64>().total_cmp(&b[..5].iter().sum::<f64>()))
        .ok_or(Error::NoConvergence { what: format!("SCORBUTUS root for θ = {theta}"), residual: f64::NAN })
}

/// SCORBUTUS: five pulses compensating amplitude and detuning error to first
/// order simultaneously.
///
/// The parameters have no closed form; they are the minimum-total-area root
/// of the nine first-order conditions, found by multi-start least squares
/// and cached per `θ`.
pub fn scorbutus(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_open_range("SCORBUTUS", theta)?;
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<f64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = theta.to_bits();
    let cached = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key).cloned();
    let x = match cached {
        Some(x) => x,
        None => {
            let x = solve_scorbutus(theta)?;
            cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, x.clone());
            x
        }
    };
    let pulses: Vec<(f64, f64)> = scorbutus_elements(&x)
        .iter()
        .map(|e| match *e {
            PulseElement::Global { theta, phi: p } => (theta, p + phi),
            PulseElement::LocalZ { .. } => unreachable!(),
        })
        .collect();
    Ok(build("SCORBUTUS", &pulses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{evaluate, stats};
    use crate::su2::{infidelity, trace_overlap};
    use std::f64::consts::FRAC_PI_2;

    fn zero_error_ok(seq: &PulseSequence, theta: f64, phi: f64) {
        let u = evaluate(seq, ErrorParams::ZERO);
        let o = trace_overlap(u, global_pulse(theta, phi, ErrorParams::ZERO));
        assert!(o > 1.0 - 1e-12, "{} θ={theta}: overlap {o}", seq.label());
    }

    /// Infidelity ratio between two error sizes, i.e. 2^(slope).
    fn slope(seq: &PulseSequence, theta: f64, phi: f64, err: fn(f64) -> ErrorParams) -> f64 {
        let t = global_pulse(theta, phi, ErrorParams::ZERO);
        let a = infidelity(evaluate(seq, err(2e-4)), t);
        let b = infidelity(evaluate(seq, err(1e-4)), t);
        (a / b).log2()
    }

    #[test]
    fn zero_error_identities() {
        for &theta in &[0.3, FRAC_PI_2, PI, 2.0, 3.5] {
            for &phi in &[0.0, 0.7] {
                zero_error_ok(&bb1(theta, phi).unwrap(), theta, phi);
                zero_error_ok(&corpse(theta, phi).unwrap(), theta, phi);
                zero_error_ok(&short_corpse(theta, phi).unwrap(), theta, phi);
                zero_error_ok(&scrofulous(theta, phi).unwrap(), theta, phi);
            }
        }
    }

    #[test]
    fn suppression_orders() {
        for &theta in &[FRAC_PI_2, PI] {
            assert!((slope(&bb1(theta, 0.3).unwrap(), theta, 0.3, ErrorParams::amplitude) - 6.0).abs() < 0.1);
            assert!((slope(&corpse(theta, 0.3).unwrap(), theta, 0.3, ErrorParams::detuning) - 4.0).abs() < 0.1);
            assert!((slope(&short_corpse(theta, 0.3).unwrap(), theta, 0.3, ErrorParams::detuning) - 4.0).abs() < 0.1);
            assert!((slope(&scrofulous(theta, 0.3).unwrap(), theta, 0.3, ErrorParams::amplitude) - 4.0).abs() < 0.1);
        }
    }

    #[test]
    fn scrofulous_domain() {
        assert!(scrofulous(1.2 * PI, 0.0).is_ok());
        assert!(matches!(scrofulous(1.3 * PI, 0.0), Err(Error::Domain { .. })));
        assert!(bb1(0.0, 0.0).is_err());
        assert!(corpse(TAU, 0.0).is_err());
    }

    #[test]
    fn scorbutus_is_doubly_robust() {
        for &theta in &[FRAC_PI_2, PI] {
            let s = scorbutus(theta, 0.4).unwrap();
            assert_eq!(s.len(), 5);
            zero_error_ok(&s, theta, 0.4);
            assert!((slope(&s, theta, 0.4, ErrorParams::amplitude) - 4.0).abs() < 0.1);
            assert!((slope(&s, theta, 0.4, ErrorParams::detuning) - 4.0).abs() < 0.1);
            assert!((slope(&s, theta, 0.4, |z| ErrorParams::new(z, z, 0.0)) - 4.0).abs() < 0.1);
        }
        // Minimum-area roots.
        assert!((stats(&scorbutus(FRAC_PI_2, 0.0).unwrap()).t - 4.31534).abs() < 1e-4);
        assert!((stats(&scorbutus(PI, 0.0).unwrap()).t - 4.71959).abs() < 1e-4);
        {}
    }
}
