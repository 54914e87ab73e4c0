//! The four-target ensemble used to benchmark parallel sequences: each site
//! of the register gets a different one of H, Z(π/4), X(π/2), Y(π/2).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{basic_ac, basic_pc, basic_zc, ControlScheme, PulseSequence};
use crate::su2::{hadamard, rot_x, rot_y, rot_z, Su2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkTarget {
    pub name: &'static str,
    pub unitary: Su2,
    /// `(α, β, γ)` for the basic PC sequence.
    pub pc: [f64; 3],
    /// ZYZ angles for the basic ZC sequence.
    pub zc: [f64; 3],
    /// XYX angles for the basic AC sequence (all non-negative).
    pub ac: [f64; 3],
}

impl BenchmarkTarget {
    pub fn angles(&self, scheme: ControlScheme) -> [f64; 3] {
        match scheme {
            ControlScheme::PC => self.pc,
            ControlScheme::AC => self.ac,
            ControlScheme::ZC => self.zc,
        }
    }

    pub fn basic(&self, scheme: ControlScheme) -> PulseSequence {
        let [a, b, g] = self.angles(scheme);
        match scheme {
            ControlScheme::PC => basic_pc(a, b, g),
            ControlScheme::AC => basic_ac(a, b, g),
            ControlScheme::ZC => basic_zc(a, b, g),
        }
    }
}

/// H, Z(π/4), X(π/2), Y(π/2) with the angle representatives used by the
/// published tables.
///
/// For PC the last three targets use γ shifted by 2π relative to the
/// smallest representative; the shift flips the sign of the implemented
/// SU(2) element, and the published UP phases belong to these signs.
pub fn benchmark_targets() -> [BenchmarkTarget; 4] {
    [
        BenchmarkTarget {
            name: "H",
            unitary: hadamard(),
            pc: [0.0, FRAC_PI_2, PI],
            zc: [0.0, FRAC_PI_2, PI],
            ac: [PI, FRAC_PI_2, 0.0],
        },
        BenchmarkTarget {
            name: "Z(pi/4)",
            unitary: rot_z(FRAC_PI_4),
            pc: [FRAC_PI_4, 0.0, 2.0 * PI],
            zc: [PI / 8.0, 0.0, PI / 8.0],
            ac: [FRAC_PI_2, FRAC_PI_4, 1.5 * PI],
        },
        BenchmarkTarget {
            name: "X(pi/2)",
            unitary: rot_x(FRAC_PI_2),
            pc: [1.5 * PI, FRAC_PI_2, 3.5 * PI],
            zc: [1.5 * PI, FRAC_PI_2, FRAC_PI_2],
            ac: [FRAC_PI_4, 0.0, FRAC_PI_4],
        },
        BenchmarkTarget {
            name: "Y(pi/2)",
            unitary: rot_y(FRAC_PI_2),
            pc: [0.0, FRAC_PI_2, 2.0 * PI],
            zc: [0.0, FRAC_PI_2, 0.0],
            ac: [0.0, FRAC_PI_2, 0.0],
        },
    ]
}

pub fn benchmark_target(name: &str) -> Option<BenchmarkTarget> {
    benchmark_targets().into_iter().find(|t| t.name.eq_ignore_ascii_case(name))
}
