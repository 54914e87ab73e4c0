//! Truncated Taylor series in one small parameter ζ.
//!
//! A [`Jet`] stores the first [`JET_LEN`] Taylor coefficients of a scalar
//! function of ζ; arithmetic and the elementary functions used by pulse
//! unitaries propagate the coefficients exactly (up to roundoff). Evaluating a
//! pulse sequence on jets therefore yields every error derivative of the
//! sequence unitary at once, which is what the robustness conditions are
//! written in.

use std::ops::{Add, Mul, Neg, Sub};

/// Default number of stored coefficients (orders 0 through 9).
pub const JET_LEN: usize = 10;

/// Series truncated after `N` coefficients (orders 0 through `N − 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize = JET_LEN> {
    pub c: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub const ZERO: Jet<N> = Jet { c: [0.0; N] };

    pub fn constant(a: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = a;
        Jet { c }
    }

    /// The affine series `a + b·ζ`.
    pub fn linear(a: f64, b: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = a;
        c[1] = b;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    /// Evaluates the truncated series at `zeta`.
    pub fn eval(&self, zeta: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &v| acc * zeta + v)
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(&self) -> (Jet<N>, Jet<N>) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        let (s0, c0) = self.c[0].sin_cos();
        s[0] = s0;
        c[0] = c0;
        for k in 1..N {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let jx = j as f64 * self.c[j];
                ds += jx * c[k - j];
                dc -= jx * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    /// Square root; the constant term must be positive.
    pub fn sqrt(&self) -> Jet<N> {
        let mut r = [0.0; N];
        r[0] = self.c[0].sqrt();
        for k in 1..N {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        Jet { c: r }
    }

    /// Multiplicative inverse; the constant term must be non-zero.
    pub fn recip(&self) -> Jet<N> {
        let mut y = [0.0; N];
        y[0] = 1.0 / self.c[0];
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * y[k - j];
            }
            y[k] = -acc * y[0];
        }
        Jet { c: y }
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Jet<N>;

    fn add(self, rhs: Jet<N>) -> Jet<N> {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a += b);
        Jet { c }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Jet<N>;

    fn sub(self, rhs: Jet<N>) -> Jet<N> {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a -= b);
        Jet { c }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Jet<N>;

    fn neg(self) -> Jet<N> {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Jet<N>;

    fn mul(self, rhs: Jet<N>) -> Jet<N> {
        let mut c = [0.0; N];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.c[..N - i].iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}

/// Quaternion whose components are jets; same `(w, x, y, z)` layout as `Su2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QJet<const N: usize = JET_LEN> {
    pub q: [Jet<N>; 4],
}

impl<const N: usize> QJet<N> {
    pub fn identity() -> Self {
        QJet { q: [Jet::constant(1.0), Jet::ZERO, Jet::ZERO, Jet::ZERO] }
    }

    pub fn from_constant(v: [f64; 4]) -> Self {
        QJet { q: v.map(Jet::constant) }
    }

    /// Coefficient of ζ^k as a 4-vector.
    pub fn coeff(&self, k: usize) -> [f64; 4] {
        [self.q[0].c[k], self.q[1].c[k], self.q[2].c[k], self.q[3].c[k]]
    }

    /// Components of the truncated series evaluated at `zeta`.
    pub fn eval(&self, zeta: f64) -> [f64; 4] {
        [self.q[0].eval(zeta), self.q[1].eval(zeta), self.q[2].eval(zeta), self.q[3].eval(zeta)]
    }
}

impl<const N: usize> Mul for QJet<N> {
    type Output = QJet<N>;

    fn mul(self, rhs: QJet<N>) -> QJet<N> {
        let [w1, x1, y1, z1] = self.q;
        let [w2, x2, y2, z2] = rhs.q;
        QJet {
            q: [
                w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
                w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
            ],
        }
    }
}

/// Direction in error space along which a sequence is expanded:
/// `(ε, δ, ε_s) = ζ·(epsilon, delta, epsilon_s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDirection {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_s: f64,
}

impl ErrorDirection {
    pub const AMPLITUDE: ErrorDirection = ErrorDirection { epsilon: 1.0, delta: 0.0, epsilon_s: 0.0 };
    pub const DETUNING: ErrorDirection = ErrorDirection { epsilon: 0.0, delta: 1.0, epsilon_s: 0.0 };
    pub const STARK: ErrorDirection = ErrorDirection { epsilon: 0.0, delta: 0.0, epsilon_s: 1.0 };
    pub const DIAGONAL: ErrorDirection = ErrorDirection { epsilon: 1.0, delta: 1.0, epsilon_s: 0.0 };

    pub fn at(&self, zeta: f64) -> crate::su2::ErrorParams {
        crate::su2::ErrorParams::new(self.epsilon * zeta, self.delta * zeta, self.epsilon_s * zeta)
    }
}

/// Jet of the global pulse `[θ]_φ` along `dir`.
pub fn global_pulse_jet<const N: usize>(theta: f64, phi: f64, dir: ErrorDirection) -> QJet<N> {
    let (sp, cp) = phi.sin_cos();
    if dir.delta == 0.0 {
        let half = Jet::linear(theta / 2.0, theta * dir.epsilon / 2.0);
        let (s, c) = half.sin_cos();
        return QJet { q: [c, s.scale(cp), s.scale(sp), Jet::ZERO] };
    }
    let delta = Jet::linear(0.0, dir.delta);
    let m = (Jet::constant(1.0) + delta * delta).sqrt();
    let amp = Jet::linear(1.0, dir.epsilon);
    let half = (amp * m).scale(theta / 2.0);
    let (s, c) = half.sin_cos();
    let s_over_m = s * m.recip();
    QJet { q: [c, s_over_m.scale(cp), s_over_m.scale(sp), s_over_m * delta] }
}

/// Jet of the local rotation `Z(angle)` along `dir`.
pub fn z_pulse_jet<const N: usize>(angle: f64, dir: ErrorDirection) -> QJet<N> {
    let half = Jet::linear(angle / 2.0, angle * dir.epsilon_s / 2.0);
    let (s, c) = half.sin_cos();
    QJet { q: [c, Jet::ZERO, Jet::ZERO, s] }
}
