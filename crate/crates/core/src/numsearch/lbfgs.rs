//! Box-constrained limited-memory BFGS (projected-gradient variant).
//!
//! Variables sitting on a bound with the gradient pushing outward are frozen
//! for the step; the quasi-Newton direction is built on the remaining ones
//! and the trial point is projected back into the box, with an Armijo
//! backtracking search along the projected path.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub max_iter: usize,
    /// Stop when the projected gradient's max-norm falls below this.
    pub gtol: f64,
    /// Stop when a step moves no coordinate by more than this.
    pub xtol: f64,
    pub memory: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions { max_iter: 1000, gtol: 1e-10, xtol: 1e-12, memory: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    /// Max-norm of the projected gradient at `x`.
    pub pg_norm: f64,
    pub iterations: usize,
}

/// Gradient with components that point out of the box at an active bound zeroed.
pub fn projected_gradient(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(lower.iter().zip(upper))
        .map(|((&xi, &gi), (&lo, &hi))| if (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0) { 0.0 } else { gi })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Minimizes `f` over the box `[lower, upper]`; `fg` returns value and gradient.
pub fn minimize<F>(fg: F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let project = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut x = x0.to_vec();
    project(&mut x);
    let (mut f, mut g) = fg(&x);
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let pg = projected_gradient(&x, &g, lower, upper);
        if max_abs(&pg) < opts.gtol {
            break;
        }
        iterations += 1;
        let free: Vec<bool> = pg.iter().map(|v| *v != 0.0).collect();
        let masked = |v: &[f64]| -> Vec<f64> { v.iter().zip(&free).map(|(a, &m)| if m { *a } else { 0.0 }).collect() };

        // Two-loop recursion on the free subspace.
        let mut q = pg.clone();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(&masked(s), &q);
            for i in 0..n {
                q[i] -= a * if free[i] { y[i] } else { 0.0 };
            }
            alphas.push(a);
        }
        let scale = match mem.back() {
            Some((s, y, _)) => {
                let (sm, ym) = (masked(s), masked(y));
                let yy = dot(&ym, &ym);
                if yy > 0.0 {
                    dot(&sm, &ym) / yy
                } else {
                    1.0
                }
            }
            None => 1.0 / max_abs(&pg).max(1.0),
        };
        let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
        for v in q.iter_mut() {
            *v *= scale;
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(&masked(y), &q);
            for i in 0..n {
                q[i] += (a - b) * if free[i] { s[i] } else { 0.0 };
            }
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        if dot(&d, &pg) >= 0.0 {
            mem.clear();
            d = pg.iter().map(|v| -v * scale).collect();
        }

        // Armijo backtracking along the projected path.
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            project(&mut xt);
            let step: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &step);
            if decrease >= 0.0 {
                t *= 0.5;
                continue;
            }
            let (ft, gt) = fg(&xt);
            if ft <= f + 1e-4 * decrease {
                accepted = Some((xt, ft, gt, step));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gnew, s)) = accepted else {
            if mem.is_empty() {
                break;
            }
            mem.clear();
            continue;
        };
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if mem.len() == opts.memory {
                mem.pop_front();
            }
            mem.push_back((s.clone(), y, 1.0 / sy));
        }
        x = xn;
        f = fnew;
        g = gnew;
        if max_abs(&s) < opts.xtol {
            break;
        }
    }
    let pg_norm = max_abs(&projected_gradient(&x, &g, lower, upper));
    LbfgsOutcome { x, f, pg_norm, iterations }
}
