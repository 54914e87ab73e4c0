//! SU(2) elements stored as unit quaternions.
//!
//! The quaternion `(w, x, y, z)` stands for `U = w·1 − i(x·σx + y·σy + z·σz)`,
//! so a rotation by `Θ` about the unit axis `n` is `(cos Θ/2, sin Θ/2 · n)`.
//! Products follow operator order: `a * b` applies `b` first.

use std::f64::consts::PI;
use std::ops::{Mul, Neg};

/// Norm drift above which a product is renormalized.
const RENORM_DRIFT: f64 = 1e-14;
/// Norm drift that can only come from a logic error, never from roundoff.
const HARD_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Quasistatic error triple applied to every pulse of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorParams {
    /// Fractional Rabi amplitude error.
    pub epsilon: f64,
    /// Detuning in units of the Rabi frequency.
    pub delta: f64,
    /// Fractional error on local Z rotation angles.
    pub epsilon_s: f64,
}

impl ErrorParams {
    pub const ZERO: ErrorParams = ErrorParams { epsilon: 0.0, delta: 0.0, epsilon_s: 0.0 };

    pub fn new(epsilon: f64, delta: f64, epsilon_s: f64) -> Self {
        Self { epsilon, delta, epsilon_s }
    }

    pub fn amplitude(epsilon: f64) -> Self {
        Self { epsilon, ..Self::ZERO }
    }

    pub fn detuning(delta: f64) -> Self {
        Self { delta, ..Self::ZERO }
    }

    pub fn stark(epsilon_s: f64) -> Self {
        Self { epsilon_s, ..Self::ZERO }
    }

    pub fn is_finite(&self) -> bool {
        self.epsilon.is_finite() && self.delta.is_finite() && self.epsilon_s.is_finite()
    }
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds an element from components, normalizing them.
    ///
    /// Panics if the components are far from unit norm; callers holding
    /// arbitrary 4-vectors should normalize them first.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Su2 { w, x, y, z }.renormalized()
    }

    /// Normalizes an arbitrary non-zero 4-vector.
    pub fn from_vector(v: [f64; 4]) -> Option<Self> {
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        Some(Su2 { w: v[0] / n, x: v[1] / n, y: v[2] / n, z: v[3] / n })
    }

    /// Rotation by `angle` about the (not necessarily normalized) axis `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Su2 { w: c, x: s * axis[0] / n, y: s * axis[1] / n, z: s * axis[2] / n }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn norm_sq(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    fn renormalized(self) -> Self {
        let n2 = self.norm_sq();
        let drift = (n2 - 1.0).abs();
        assert!(
            drift <= HARD_DRIFT,
            "quaternion norm drifted by {drift:e}; an operation produced a non-unitary element"
        );
        if drift > RENORM_DRIFT {
            let n = n2.sqrt();
            Su2 { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
        } else {
            self
        }
    }

    /// Inverse element (quaternion conjugate).
    pub fn inverse(&self) -> Self {
        Su2 { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn dot(&self, other: &Su2) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Total rotation angle in `[0, 2π]`.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * self.w.clamp(-1.0, 1.0).acos()
    }
}

/// Raw Hamilton product of two 4-vectors, without normalization.
pub(crate) fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [w1, x1, y1, z1] = a;
    let [w2, x2, y2, z2] = b;
    [
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
        w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
    ]
}

impl Mul for Su2 {
    type Output = Su2;

    fn mul(self, rhs: Su2) -> Su2 {
        compose(self, rhs)
    }
}

impl Neg for Su2 {
    type Output = Su2;

    fn neg(self) -> Su2 {
        Su2 { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Product `a·b` in operator order (`b` acts first), renormalized.
pub fn compose(a: Su2, b: Su2) -> Su2 {
    let [w, x, y, z] = hamilton(a.components(), b.components());
    Su2 { w, x, y, z }.renormalized()
}

/// Erroneous global pulse `[θ]_φ` under amplitude error ε and detuning δ.
///
/// Rotation by `θ(1+ε)√(1+δ²)` about `(cos φ, sin φ, δ)/√(1+δ²)`. The Stark
/// error field is ignored.
pub fn global_pulse(theta: f64, phi: f64, err: ErrorParams) -> Su2 {
    let m = (1.0 + err.delta * err.delta).sqrt();
    let big = theta * (1.0 + err.epsilon) * m;
    let (s, c) = (big / 2.0).sin_cos();
    let (sp, cp) = phi.sin_cos();
    Su2 { w: c, x: s * cp / m, y: s * sp / m, z: s * err.delta / m }
}

/// Local Z rotation under Stark error: `Z(angle·(1+ε_s))`.
pub fn z_pulse(angle: f64, err: ErrorParams) -> Su2 {
    let a = angle * (1.0 + err.epsilon_s);
    let (s, c) = (a / 2.0).sin_cos();
    Su2 { w: c, x: 0.0, y: 0.0, z: s }
}

/// `½|Tr(U†V)|`, the phase-insensitive overlap of two elements.
pub fn trace_overlap(u: Su2, v: Su2) -> f64 {
    u.dot(&v).abs().min(1.0)
}

/// `1 − trace_overlap²`, computed without cancellation.
///
/// For unit quaternions `1 − (u·v)² = Σ_{i<j} (u_i v_j − u_j v_i)²`, which keeps
/// full relative precision even when the overlap is within 1e-16 of one.
pub fn infidelity(u: Su2, v: Su2) -> f64 {
    let a = u.components();
    let b = v.components();
    let mut s = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let t = a[i] * b[j] - a[j] * b[i];
            s += t * t;
        }
    }
    s
}

pub fn rot_x(angle: f64) -> Su2 {
    let (s, c) = (angle / 2.0).sin_cos();
    Su2 { w: c, x: s, y: 0.0, z: 0.0 }
}

pub fn rot_y(angle: f64) -> Su2 {
    let (s, c) = (angle / 2.0).sin_cos();
    Su2 { w: c, x: 0.0, y: s, z: 0.0 }
}

pub fn rot_z(angle: f64) -> Su2 {
    z_pulse(angle, ErrorParams::ZERO)
}

/// Hadamard gate as an SU(2) element (`−iH`).
pub fn hadamard() -> Su2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Su2 { w: 0.0, x: r, y: 0.0, z: r }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_2pi(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Su2, b: Su2, tol: f64) -> bool {
        a.components().iter().zip(b.components()).all(|(p, q)| (p - q).abs() < tol)
    }

    #[test]
    fn identity_and_double_cover() {
        let u = global_pulse(0.7, 1.3, ErrorParams::ZERO);
        assert!(close(compose(Su2::IDENTITY, u), u, 1e-15));
        let xx = rot_x(PI) * rot_x(PI);
        assert!(close(xx, -Su2::IDENTITY, 1e-15));
        assert!(close(rot_x(2.0 * PI), -Su2::IDENTITY, 1e-15));
    }

    #[test]
    fn conjugation_moves_phase() {
        let (theta, phi) = (1.234, 0.567);
        let lhs = rot_z(phi) * global_pulse(theta, 0.0, ErrorParams::ZERO) * rot_z(-phi);
        assert!(close(lhs, global_pulse(theta, phi, ErrorParams::ZERO), 1e-14));
    }

    #[test]
    fn pulse_primitives() {
        assert!(close(global_pulse(PI, 0.0, ErrorParams::ZERO), Su2::new(0.0, 1.0, 0.0, 0.0), 1e-15));
        let tilted = global_pulse(PI, 0.0, ErrorParams::detuning(1.0));
        let expect = Su2::from_axis_angle([1.0, 0.0, 1.0], PI * 2f64.sqrt());
        assert!(close(tilted, expect, 1e-14));
        assert!(close(z_pulse(PI, ErrorParams::ZERO), Su2::new(0.0, 0.0, 0.0, 1.0), 1e-15));
        assert!(close(z_pulse(PI, ErrorParams::stark(0.1)), rot_z(1.1 * PI), 1e-15));
        assert!(close(z_pulse(0.0, ErrorParams::new(0.3, 0.2, 0.1)), Su2::IDENTITY, 1e-15));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(rot_y(PI / 2.0), Su2::new(r, 0.0, r, 0.0), 1e-15));
    }

    #[test]
    fn two_pi_pulse_is_detuning_robust() {
        let d = 0.05;
        let u = global_pulse(2.0 * PI, 0.4, ErrorParams::detuning(d));
        assert!(trace_overlap(u, -Su2::IDENTITY) >= 1.0 - 10.0 * d * d);
    }

    #[test]
    fn overlap_basics() {
        let u = global_pulse(0.9, 0.2, ErrorParams::ZERO);
        assert_eq!(trace_overlap(u, u), 1.0);
        assert_eq!(trace_overlap(u, -u), 1.0);
        let a = global_pulse(PI, 0.0, ErrorParams::ZERO);
        let b = global_pulse(PI, PI / 2.0, ErrorParams::ZERO);
        assert!(trace_overlap(a, b) < 1e-15);
    }

    #[test]
    fn infidelity_matches_overlap() {
        let u = global_pulse(0.9, 0.2, ErrorParams::new(0.01, 0.02, 0.0));
        let v = global_pulse(0.9, 0.2, ErrorParams::ZERO);
        let o = trace_overlap(u, v);
        assert!((infidelity(u, v) - (1.0 - o * o)).abs() < 1e-14);
    }

    #[test]
    #[should_panic(expected = "norm drifted")]
    fn gross_norm_error_is_fatal() {
        let _ = Su2::new(1.0, 1.0, 0.0, 0.0);
    }
}
