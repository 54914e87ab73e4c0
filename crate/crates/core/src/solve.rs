//! Damped least-squares root finding with multi-start.
//!
//! Robust-family parameters are roots of a vector of derivative residuals.
//! [`levenberg_marquardt`] polishes one starting point; [`multistart`] runs
//! many starting points (concurrently) and returns the distinct converged
//! roots in seed order, so results do not depend on thread scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once the largest residual component falls below this.
    pub tol: f64,
    /// Relative central-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iter: 500, tol: 1e-14, fd_step: 1e-7 }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    /// Largest residual component at `x`.
    pub residual: f64,
    pub iterations: usize,
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Minimizes `|f(x)|²` from `x0` inside the box `[lower, upper]`.
pub fn levenberg_marquardt<F>(f: &F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &LmOptions) -> LmOutcome
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    clamp_into(&mut x, lower, upper);
    let mut r = f(&x);
    let m = r.len();
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    let mut iterations = 0;

    while iterations < opts.max_iter && max_abs(&r) > opts.tol {
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = opts.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let rp = f(&xp);
            let rm = f(&xm);
            for i in 0..m {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        let scale = (0..n).map(|i| a[(i, i)]).fold(0.0, f64::max).max(1e-300);

        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for i in 0..n {
                damped[(i, i)] += lambda * (a[(i, i)] + 1e-12 * scale);
            }
            let step = match damped.clone().cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => match damped.lu().solve(&(-&g)) {
                    Some(s) => s,
                    None => {
                        lambda *= 4.0;
                        continue;
                    }
                },
            };
            let mut xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            clamp_into(&mut xn, lower, upper);
            let rn = f(&xn);
            let cn: f64 = rn.iter().map(|v| v * v).sum();
            if cn.is_finite() && cn < cost {
                let moved = xn.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                x = xn;
                r = rn;
                cost = cn;
                lambda = (lambda / 3.0).max(1e-15);
                improved = moved > 0.0;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    LmOutcome { residual: max_abs(&r), x, iterations }
}

/// A least-squares root-finding problem with box bounds.
pub struct RootProblem<'a> {
    pub residual: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Coordinates that are angles modulo 2π (used for deduplication).
    pub periodic: Vec<bool>,
    /// Largest residual accepted as a root.
    pub accept: f64,
}

#[derive(Debug, Clone)]
pub struct Root {
    pub x: Vec<f64>,
    pub residual: f64,
    /// Index of the seed that produced the root.
    pub seed_index: usize,
}

/// Draws `count` uniform points in the box; unbounded coordinates use `[0, 2π)`.
pub fn random_seeds(lower: &[f64], upper: &[f64], count: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| {
            lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| {
                    if lo.is_finite() && hi.is_finite() {
                        rng.gen_range(lo..=hi)
                    } else {
                        rng.gen_range(0.0..std::f64::consts::TAU)
                    }
                })
                .collect()
        })
        .collect()
}

/// Distance between two parameter vectors, modulo 2π on periodic coordinates.
pub fn param_distance(a: &[f64], b: &[f64], periodic: &[bool]) -> f64 {
    a.iter()
        .zip(b)
        .zip(periodic)
        .map(|((x, y), &p)| {
            let d = (x - y).abs();
            if p {
                let d = d.rem_euclid(std::f64::consts::TAU);
                d.min(std::f64::consts::TAU - d)
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

/// Polishes every seed and returns the distinct accepted roots in seed order.
pub fn multistart(problem: &RootProblem<'_>, seeds: &[Vec<f64>], opts: &LmOptions) -> Vec<Root> {
    let outcomes: Vec<LmOutcome> = seeds
        .par_iter()
        .map(|s| levenberg_marquardt(problem.residual, s, &problem.lower, &problem.upper, opts))
        .collect();
    let mut roots: Vec<Root> = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        if !(o.residual <= problem.accept) {
            continue;
        }
        let mut x = o.x;
        for (v, &p) in x.iter_mut().zip(&problem.periodic) {
            if p {
                *v = crate::su2::wrap_2pi(*v);
            }
        }
        if roots.iter().any(|r| param_distance(&r.x, &x, &problem.periodic) < 1e-6) {
            continue;
        }
        roots.push(Root { x, residual: o.residual, seed_index: i });
    }
    roots
}
