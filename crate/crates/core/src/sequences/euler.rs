//! Euler-angle decompositions used to prepare targets for the basic sequences.

use std::f64::consts::FRAC_PI_2;

use crate::su2::{rot_x, rot_y, rot_z, wrap_2pi, Su2};

/// Distance of β from 0 or π below which the decomposition is degenerate.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerConvention {
    /// `Z(α)Y(β)Z(γ)`
    ZYZ,
    /// `X(α)Y(β)X(γ)`
    XYX,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerTarget {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub convention: EulerConvention,
}

impl EulerTarget {
    pub fn zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerTarget { alpha, beta, gamma, convention: EulerConvention::ZYZ }
    }

    pub fn xyx(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerTarget { alpha, beta, gamma, convention: EulerConvention::XYX }
    }

    /// The SU(2) element described by the angles.
    pub fn unitary(&self) -> Su2 {
        match self.convention {
            EulerConvention::ZYZ => rot_z(self.alpha) * rot_y(self.beta) * rot_z(self.gamma),
            EulerConvention::XYX => rot_x(self.alpha) * rot_y(self.beta) * rot_x(self.gamma),
        }
    }
}

/// ZYZ angles with `β ∈ [0, π]` and `α, γ ∈ [0, 2π)`; `γ = 0` when degenerate.
pub fn euler_zyz(u: Su2) -> EulerTarget {
    let cb = u.w.hypot(u.z);
    let sb = u.x.hypot(u.y);
    let beta = 2.0 * sb.atan2(cb);
    let (alpha, gamma) = if beta < DEGENERATE_TOL {
        (2.0 * u.z.atan2(u.w), 0.0)
    } else if beta > std::f64::consts::PI - DEGENERATE_TOL {
        (2.0 * (-u.x).atan2(u.y), 0.0)
    } else {
        let sigma = u.z.atan2(u.w);
        let diff = (-u.x).atan2(u.y);
        (sigma + diff, sigma - diff)
    };
    EulerTarget::zyz(wrap_2pi(alpha), beta, wrap_2pi(gamma))
}

/// XYX angles, obtained by rotating the frame so that x becomes z.
pub fn euler_xyx(u: Su2) -> EulerTarget {
    let r = rot_y(FRAC_PI_2);
    let e = euler_zyz(r.inverse() * u * r);
    EulerTarget::xyx(e.alpha, e.beta, e.gamma)
}
