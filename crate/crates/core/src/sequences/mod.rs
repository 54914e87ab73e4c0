//! Pulse-sequence data model, evaluation, and bookkeeping.
//!
//! Element lists are written in operator order, exactly like a product of
//! unitaries on paper: the leftmost element acts last. [`evaluate`] multiplies
//! the elements left to right, which realizes that product.

mod basic;
mod benchmark;
mod euler;
pub mod io;
mod reference;

pub use basic::{basic_ac, basic_pc, basic_zc, pc_mid_phase};
pub use benchmark::{benchmark_target, benchmark_targets, BenchmarkTarget};
pub use euler::{euler_xyx, euler_zyz, EulerConvention, EulerTarget};
pub use reference::{bb1, corpse, scorbutus, scrofulous, short_corpse};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jet::{global_pulse_jet, z_pulse_jet, ErrorDirection, QJet};
use crate::su2::{global_pulse, wrap_2pi, z_pulse, ErrorParams, Su2};

/// Largest global pulse area accepted in a sequence.
pub const MAX_GLOBAL_AREA: f64 = 8.0 * PI;

/// Default ratio between local Z rotation time and global pulse time.
pub const DEFAULT_Z_SLOWDOWN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControlScheme {
    /// Per-site phase control.
    PC,
    /// Per-site amplitude control.
    AC,
    /// Per-site Z rotations.
    ZC,
}

impl ControlScheme {
    pub const ALL: [ControlScheme; 3] = [ControlScheme::PC, ControlScheme::AC, ControlScheme::ZC];

    pub fn name(&self) -> &'static str {
        match self {
            ControlScheme::PC => "PC",
            ControlScheme::AC => "AC",
            ControlScheme::ZC => "ZC",
        }
    }
}

impl fmt::Display for ControlScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControlScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PC" => Ok(ControlScheme::PC),
            "AC" => Ok(ControlScheme::AC),
            "ZC" => Ok(ControlScheme::ZC),
            other => Err(Error::InvalidArgument(format!("unknown control scheme '{other}' (expected PC, AC or ZC)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseElement {
    /// Global pulse `[θ]_φ` with `θ ≥ 0` and `φ ∈ [0, 2π)`.
    Global { theta: f64, phi: f64 },
    /// Local rotation `Z(angle)`.
    LocalZ { angle: f64 },
}

impl PulseElement {
    /// Global pulse; a negative area is realized as the positive area with
    /// the opposite phase, and the phase is wrapped into `[0, 2π)`.
    pub fn global(theta: f64, phi: f64) -> Self {
        if theta < 0.0 {
            PulseElement::Global { theta: -theta, phi: wrap_2pi(phi + PI) }
        } else {
            PulseElement::Global { theta, phi: wrap_2pi(phi) }
        }
    }

    pub fn z(angle: f64) -> Self {
        PulseElement::LocalZ { angle }
    }

    pub fn unitary(&self, err: ErrorParams) -> Su2 {
        match *self {
            PulseElement::Global { theta, phi } => global_pulse(theta, phi, err),
            PulseElement::LocalZ { angle } => z_pulse(angle, err),
        }
    }

    pub fn jet<const N: usize>(&self, dir: ErrorDirection) -> QJet<N> {
        match *self {
            PulseElement::Global { theta, phi } => global_pulse_jet(theta, phi, dir),
            PulseElement::LocalZ { angle } => z_pulse_jet(angle, dir),
        }
    }

    pub fn is_global(&self) -> bool {
        matches!(self, PulseElement::Global { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PulseElement::Global { theta, phi } => {
                if !(theta.is_finite() && phi.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite global pulse".into()));
                }
                if !(0.0..=MAX_GLOBAL_AREA).contains(&theta) {
                    return Err(Error::InvalidArgument(format!(
                        "global pulse area {:.6}π outside [0, {}π]",
                        theta / PI,
                        MAX_GLOBAL_AREA / PI
                    )));
                }
                Ok(())
            }
            PulseElement::LocalZ { angle } => {
                if angle.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("non-finite Z rotation".into()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    scheme: ControlScheme,
    elements: Vec<PulseElement>,
    label: String,
}

impl PulseSequence {
    /// Builds a sequence from trusted parts; panics if an invariant fails.
    pub fn new(scheme: ControlScheme, elements: Vec<PulseElement>, label: impl Into<String>) -> Self {
        match Self::try_new(scheme, elements, label) {
            Ok(s) => s,
            Err(e) => panic!("invalid pulse sequence: {e}"),
        }
    }

    pub fn try_new(scheme: ControlScheme, elements: Vec<PulseElement>, label: impl Into<String>) -> Result<Self> {
        for e in &elements {
            e.validate()?;
            if scheme != ControlScheme::ZC && !e.is_global() {
                return Err(Error::InvalidArgument(format!("{scheme} sequences cannot contain local Z rotations")));
            }
        }
        Ok(PulseSequence { scheme, elements, label: label.into() })
    }

    pub fn empty(scheme: ControlScheme) -> Self {
        PulseSequence { scheme, elements: Vec::new(), label: String::new() }
    }

    pub fn scheme(&self) -> ControlScheme {
        self.scheme
    }

    pub fn elements(&self) -> &[PulseElement] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Re-tags the sequence, checking the new scheme's element restrictions.
    pub fn with_scheme(self, scheme: ControlScheme) -> Result<Self> {
        Self::try_new(scheme, self.elements, self.label)
    }

    /// Same elements in reverse order.
    pub fn mirrored(&self) -> Self {
        let mut elements = self.elements.clone();
        elements.reverse();
        PulseSequence { scheme: self.scheme, elements, label: format!("mirror({})", self.label) }
    }

    /// Operator product `self · other`.
    pub fn then(&self, other: &PulseSequence) -> Self {
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&other.elements);
        let scheme = if self.scheme == ControlScheme::ZC || other.scheme == ControlScheme::ZC {
            ControlScheme::ZC
        } else {
            self.scheme
        };
        PulseSequence { scheme, elements, label: self.label.clone() }
    }

    /// Sum of global pulse areas in radians.
    pub fn global_area(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                PulseElement::Global { theta, .. } => *theta,
                PulseElement::LocalZ { .. } => 0.0,
            })
            .sum()
    }

    /// Sum of |Z angles| in radians.
    pub fn z_area(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                PulseElement::LocalZ { angle } => angle.abs(),
                PulseElement::Global { .. } => 0.0,
            })
            .sum()
    }

    /// Replaces global pulses by sub-sequences; `f` returns `None` to keep a pulse.
    pub fn replace_globals<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, f64, f64) -> Result<Option<PulseSequence>>,
    {
        let mut out = Vec::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            match *e {
                PulseElement::Global { theta, phi } => match f(i, theta, phi)? {
                    Some(sub) => out.extend_from_slice(&sub.elements),
                    None => out.push(*e),
                },
                PulseElement::LocalZ { .. } => out.push(*e),
            }
        }
        Self::try_new(self.scheme, out, self.label.clone())
    }

    /// Drops global pulses and Z rotations with zero angle.
    pub fn without_zero_pulses(&self) -> Self {
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(|e| match e {
                PulseElement::Global { theta, .. } => *theta != 0.0,
                PulseElement::LocalZ { angle } => *angle != 0.0,
            })
            .collect();
        PulseSequence { scheme: self.scheme, elements, label: self.label.clone() }
    }

    /// Merges neighbouring elements that combine into one.
    ///
    /// Adjacent Z rotations always add and adjacent global pulses with the
    /// same phase add their areas; both merges are exact under every error.
    /// With `cancel_opposite`, adjacent global pulses with opposite phases are
    /// combined into their area difference, which is exact under amplitude and
    /// Stark error but not under detuning. Elements with zero angle are dropped.
    pub fn merged(&self, cancel_opposite: bool) -> Self {
        const TOL: f64 = 1e-12;
        let mut out: Vec<PulseElement> = Vec::with_capacity(self.elements.len());
        for &e in &self.elements {
            let merged = match (out.last().copied(), e) {
                (Some(PulseElement::LocalZ { angle: a }), PulseElement::LocalZ { angle: b }) => {
                    Some(PulseElement::z(a + b))
                }
                (Some(PulseElement::Global { theta: a, phi: p }), PulseElement::Global { theta: b, phi: q }) => {
                    let d = wrap_2pi(q - p);
                    if d.min(2.0 * PI - d) < TOL {
                        Some(PulseElement::global(a + b, p))
                    } else if cancel_opposite && (d - PI).abs() < TOL {
                        Some(PulseElement::global(a - b, p))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            match merged {
                Some(m) => {
                    out.pop();
                    let zero = match m {
                        PulseElement::Global { theta, .. } => theta.abs() < TOL,
                        PulseElement::LocalZ { angle } => angle.abs() < TOL,
                    };
                    if !zero {
                        out.push(m);
                    }
                }
                None => out.push(e),
            }
        }
        PulseSequence { scheme: self.scheme, elements: out, label: self.label.clone() }
    }
}

/// Unitary implemented by `seq` under the quasistatic error `err`.
pub fn evaluate(seq: &PulseSequence, err: ErrorParams) -> Su2 {
    seq.elements.iter().fold(Su2::IDENTITY, |acc, e| acc * e.unitary(err))
}

/// Taylor expansion of the sequence unitary along an error direction.
pub fn evaluate_jet<const N: usize>(seq: &PulseSequence, dir: ErrorDirection) -> QJet<N> {
    product_jet(&seq.elements, dir)
}

/// Taylor expansion of an unvalidated element product along `dir`.
pub fn product_jet<const N: usize>(elements: &[PulseElement], dir: ErrorDirection) -> QJet<N> {
    elements.iter().fold(QJet::identity(), |acc, e| acc * e.jet::<N>(dir))
}

/// Residual vector of the robustness conditions for an element product.
///
/// Appends the zero-error mismatch `q₀ − s·target` (with `s = ±1` picked to
/// match the sign of the overlap) followed, for each direction, by the
/// Taylor coefficients of orders `1..=order`. All entries vanish exactly
/// when the product equals `target + O(ζ^{order+1})` along every direction.
pub fn series_residual<const N: usize>(
    elements: &[PulseElement],
    target: Su2,
    dirs: &[ErrorDirection],
    order: usize,
    out: &mut Vec<f64>,
) {
    assert!(order < N, "jet length {N} cannot hold order {order}");
    let t = target.components();
    for (i, dir) in dirs.iter().enumerate() {
        let j = product_jet::<N>(elements, *dir);
        if i == 0 {
            let q0 = j.coeff(0);
            let dot: f64 = q0.iter().zip(&t).map(|(a, b)| a * b).sum();
            let s = if dot < 0.0 { -1.0 } else { 1.0 };
            out.extend(q0.iter().zip(&t).map(|(a, b)| a - s * b));
        }
        for k in 1..=order {
            out.extend_from_slice(&j.coeff(k));
        }
    }
    if dirs.is_empty() {
        let q0 = product_jet::<N>(elements, ErrorDirection::AMPLITUDE).coeff(0);
        let dot: f64 = q0.iter().zip(&t).map(|(a, b)| a * b).sum();
        let s = if dot < 0.0 { -1.0 } else { 1.0 };
        out.extend(q0.iter().zip(&t).map(|(a, b)| a - s * b));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceStats {
    /// Number of physical pulses.
    pub k: usize,
    /// Total global pulse area in units of π.
    pub t: f64,
    /// Wall-clock duration in units of 1/Ω.
    pub duration: f64,
}

pub fn stats(seq: &PulseSequence) -> SequenceStats {
    stats_with_slowdown(seq, DEFAULT_Z_SLOWDOWN)
}

pub fn stats_with_slowdown(seq: &PulseSequence, z_slowdown: f64) -> SequenceStats {
    let global = seq.global_area();
    SequenceStats { k: seq.len(), t: global / PI, duration: global + z_slowdown * seq.z_area() }
}

/// Duration of sequences run in parallel on different sites: the longest one.
pub fn parallel_duration(seqs: &[PulseSequence], z_slowdown: f64) -> f64 {
    seqs.iter().map(|s| stats_with_slowdown(s, z_slowdown).duration).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{trace_overlap, ErrorParams};

    #[test]
    fn empty_sequence_is_identity() {
        let s = PulseSequence::empty(ControlScheme::PC);
        assert_eq!(evaluate(&s, ErrorParams::new(0.1, 0.2, 0.3)), Su2::IDENTITY);
    }

    #[test]
    fn single_pulse_amplitude_error_rescales_area() {
        let s = PulseSequence::new(ControlScheme::PC, vec![PulseElement::global(PI, 0.0)], "x");
        let u = evaluate(&s, ErrorParams::amplitude(0.1));
        assert!(trace_overlap(u, global_pulse(1.1 * PI, 0.0, ErrorParams::ZERO)) > 1.0 - 1e-15);
    }

    #[test]
    fn operator_order_matches_conjugation_identity() {
        let phi = 0.8;
        let s = PulseSequence::new(
            ControlScheme::ZC,
            vec![PulseElement::z(phi), PulseElement::global(1.1, 0.0), PulseElement::z(-phi)],
            "",
        );
        let err = ErrorParams::new(0.02, 0.0, 0.0);
        assert!(trace_overlap(evaluate(&s, err), global_pulse(1.1, phi, err)) > 1.0 - 1e-15);
    }

    #[test]
    fn negative_area_flips_phase() {
        assert_eq!(PulseElement::global(-1.0, 0.5), PulseElement::Global { theta: 1.0, phi: 0.5 + PI });
    }

    #[test]
    fn local_z_rejected_outside_zc() {
        assert!(PulseSequence::try_new(ControlScheme::PC, vec![PulseElement::z(1.0)], "").is_err());
        assert!(PulseSequence::try_new(ControlScheme::AC, vec![PulseElement::global(10.0 * PI, 0.0)], "").is_err());
    }

    #[test]
    fn merging_rules() {
        let s = PulseSequence::new(
            ControlScheme::ZC,
            vec![
                PulseElement::global(PI / 2.0, PI),
                PulseElement::global(PI / 2.0, PI),
                PulseElement::z(0.3),
                PulseElement::global(PI / 2.0, 0.0),
                PulseElement::global(PI / 2.0, PI),
                PulseElement::z(0.2),
            ],
            "",
        );
        let m = s.merged(true);
        assert_eq!(m.len(), 2);
        assert!(trace_overlap(evaluate(&m, ErrorParams::ZERO), evaluate(&s, ErrorParams::ZERO)) > 1.0 - 1e-14);
        let err = ErrorParams::new(0.03, 0.0, 0.02);
        assert!(trace_overlap(evaluate(&m, err), evaluate(&s, err)) > 1.0 - 1e-14);
        assert_eq!(s.merged(false).len(), 5);
    }

    #[test]
    fn stats_counts_and_duration() {
        let s = basic_zc(0.0, PI / 2.0, PI);
        let st = stats(&s);
        assert_eq!(st.k, 5);
        assert!((st.t - 1.0).abs() < 1e-15);
        assert!((st.duration - (PI + 5.0 * 1.5 * PI)).abs() < 1e-12);
    }
}
