//! The three-pulse (PC, AC) and five-element (ZC) sequences that realize an
//! arbitrary single-qubit unitary with the fewest locally tunable parameters.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{ControlScheme, PulseElement, PulseSequence};

/// `[α]_0 [β]_{π/2} [γ]_0`, equal to `X(α)Y(β)X(γ)`.
pub fn basic_ac(alpha: f64, beta: f64, gamma: f64) -> PulseSequence {
    PulseSequence::new(
        ControlScheme::AC,
        vec![PulseElement::global(alpha, 0.0), PulseElement::global(beta, FRAC_PI_2), PulseElement::global(gamma, 0.0)],
        "basic",
    )
}

/// `[π/2]_α [π]_{(γ+α−β)/2} [π/2]_γ`, equal to `Z(α)Y(β)Z(2π−γ)` up to phase.
pub fn basic_pc(alpha: f64, beta: f64, gamma: f64) -> PulseSequence {
    PulseSequence::new(
        ControlScheme::PC,
        vec![
            PulseElement::global(FRAC_PI_2, alpha),
            PulseElement::global(PI, pc_mid_phase(alpha, beta, gamma)),
            PulseElement::global(FRAC_PI_2, gamma),
        ],
        "basic",
    )
}

/// Phase of the central π pulse of the PC sequence.
///
/// Computed from the unwrapped angles: shifting α or γ by 2π moves this
/// phase by π, which flips the sign of the implemented SU(2) element.
pub fn pc_mid_phase(alpha: f64, beta: f64, gamma: f64) -> f64 {
    (gamma + alpha - beta) / 2.0
}

/// `Z(α) [π/2]_π Z(β) [π/2]_0 Z(γ)`, equal to `Z(α)Y(β)Z(γ)` up to phase.
pub fn basic_zc(alpha: f64, beta: f64, gamma: f64) -> PulseSequence {
    PulseSequence::new(
        ControlScheme::ZC,
        vec![
            PulseElement::z(alpha),
            PulseElement::global(FRAC_PI_2, PI),
            PulseElement::z(beta),
            PulseElement::global(FRAC_PI_2, 0.0),
            PulseElement::z(gamma),
        ],
        "basic",
    )
}
