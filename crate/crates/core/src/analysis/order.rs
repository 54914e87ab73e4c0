//! Suppression-order certification from log-log infidelity slopes, and the
//! generic pulse-count lower bound.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sequences::{evaluate, PulseSequence};
use crate::su2::{infidelity, ErrorParams, Su2};

/// Points with infidelity below this are dropped from the fit.
pub const INFIDELITY_FLOOR: f64 = 1e-13;
/// Half-width of the slope window around `2(n+1)`.
pub const SLOPE_WINDOW: f64 = 0.3;
const ZETA_MIN: f64 = 1e-3;
const ZETA_MAX: f64 = 3e-2;
const POINTS: usize = 8;
/// The window slides upward until at least this many points survive.
const MIN_POINTS: usize = 4;
/// Largest upper end of the window.
const ZETA_LIMIT: f64 = 0.5;

/// Direction in error space along which the order is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorAxis {
    Epsilon,
    Delta,
    EpsilonS,
    /// `ε = δ`.
    Diagonal,
}

impl ErrorAxis {
    pub const ALL: [ErrorAxis; 4] = [ErrorAxis::Epsilon, ErrorAxis::Delta, ErrorAxis::EpsilonS, ErrorAxis::Diagonal];

    pub fn at(self, zeta: f64) -> ErrorParams {
        match self {
            ErrorAxis::Epsilon => ErrorParams::amplitude(zeta),
            ErrorAxis::Delta => ErrorParams::detuning(zeta),
            ErrorAxis::EpsilonS => ErrorParams::stark(zeta),
            ErrorAxis::Diagonal => ErrorParams::new(zeta, zeta, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorAxis::Epsilon => "eps",
            ErrorAxis::Delta => "delta",
            ErrorAxis::EpsilonS => "eps_s",
            ErrorAxis::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for ErrorAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eps" | "epsilon" | "amplitude" => Ok(ErrorAxis::Epsilon),
            "delta" | "detuning" => Ok(ErrorAxis::Delta),
            "eps_s" | "epsilon_s" | "eps-s" | "stark" => Ok(ErrorAxis::EpsilonS),
            "diag" | "diagonal" => Ok(ErrorAxis::Diagonal),
            _ => Err(Error::InvalidArgument(format!("unknown error axis '{s}' (eps, delta, eps_s, diagonal)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    /// Least-squares slope of `log(1 − F²)` against `log ζ`.
    pub slope: f64,
    /// `n` with `|slope − 2(n+1)| ≤ 0.3`, if any.
    pub order: Option<usize>,
    /// `(ζ, infidelity)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(move |i| lo * (r * i as f64).exp())
}

/// Fits the slope of `infid(ζ)` on 8 log-spaced points in `[1e-3, 3e-2]`.
/// While fewer than 4 points clear the floor (very high orders), the window
/// keeps its 30:1 span and slides upward.
pub fn fit_order<F: Fn(f64) -> f64>(infid: F) -> Result<OrderFit> {
    let mut lo = ZETA_MIN;
    let mut hi = ZETA_MAX;
    loop {
        let points: Vec<(f64, f64)> =
            log_spaced(lo, hi, POINTS).map(|z| (z, infid(z))).filter(|&(_, f)| f >= INFIDELITY_FLOOR).collect();
        if points.len() >= MIN_POINTS {
            let n = points.len() as f64;
            let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(z, f)| (z.ln(), f.ln())).unzip();
            let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let slope = sxy / sxx;
            let k = ((slope / 2.0).round() as i64 - 1).max(0) as usize;
            let order = ((slope - 2.0 * (k + 1) as f64).abs() <= SLOPE_WINDOW).then_some(k);
            return Ok(OrderFit { slope, order, points });
        }
        if hi >= ZETA_LIMIT {
            return Err(Error::Verification(format!(
                "infidelity stays below {INFIDELITY_FLOOR:e} up to ζ = {ZETA_LIMIT}; order not measurable"
            )));
        }
        let step = (ZETA_LIMIT / hi).min(1.1);
        lo *= step;
        hi *= step;
    }
}

/// Certifies the error-suppression order of `seq` against `target` along `axis`.
pub fn suppression_order(seq: &PulseSequence, target: Su2, axis: ErrorAxis) -> Result<OrderFit> {
    let f0 = infidelity(evaluate(seq, ErrorParams::ZERO), target);
    if f0 > 1e-10 {
        return Err(Error::Verification(format!("order undefined: zero-error infidelity is {f0:.3e}")));
    }
    fit_order(|z| infidelity(evaluate(seq, axis.at(z)), target))
}

/// Fewest pulses that can cancel an error through order `n` for a generic
/// target: `⌈3(n+1)/2⌉`.
pub fn min_pulse_bound(n: usize) -> usize {
    (3 * (n + 1)).div_ceil(2)
}
