//! Independent reference computations shared by the integration tests.
//!
//! The KL projection here is a damped Newton method on the primal problem,
//! restricted to the null space of the constraint matrix. It shares no code
//! with the library's scaling algorithms.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bit `b` of cell index `i`: 2 = E1, 1 = E2, 0 = C.
pub fn bit(i: usize, b: usize) -> bool {
    (i >> b) & 1 == 1
}

pub const E1: usize = 2;
pub const E2: usize = 1;
pub const C: usize = 0;

pub fn mass(q: &[f64; 8], b: usize) -> f64 {
    (0..8).filter(|&i| bit(i, b)).map(|i| q[i]).sum()
}

/// Row of the constraint "P(variable b is true) = ...".
pub fn indicator_row(b: usize) -> [f64; 8] {
    let mut row = [0.0; 8];
    for (i, r) in row.iter_mut().enumerate() {
        *r = if bit(i, b) { 1.0 } else { 0.0 };
    }
    row
}

pub fn kl(q: &[f64; 8], p: &[f64; 8]) -> f64 {
    q.iter()
        .zip(p)
        .map(|(&a, &b)| if a > 0.0 { a * (a / b).ln() } else { 0.0 })
        .sum()
}

/// Orthonormal basis of `{x : A x = 0}` as the columns of an 8 x k matrix.
pub fn null_space(rows: &[[f64; 8]]) -> DMatrix<f64> {
    let a = DMatrix::from_fn(rows.len(), 8, |r, c| rows[r][c]);
    let gram = &a * a.transpose();
    let inv = gram.try_inverse().expect("independent constraints");
    let projector = DMatrix::identity(8, 8) - a.transpose() * inv * &a;
    let svd = projector.svd(true, false);
    let u = svd.u.expect("left vectors");
    let keep: Vec<usize> = (0..8).filter(|&j| svd.singular_values[j] > 0.5).collect();
    DMatrix::from_fn(8, keep.len(), |r, c| u[(r, keep[c])])
}

/// `argmin KL(q || p)` subject to `rows · q = rhs`, starting from the
/// strictly positive feasible point `start`.
pub fn kl_projection(p: &[f64; 8], rows: &[[f64; 8]], start: [f64; 8]) -> [f64; 8] {
    let z = null_space(rows);
    let mut q = start;
    for _ in 0..200 {
        let g = DVector::from_fn(8, |i, _| (q[i] / p[i]).ln() + 1.0);
        let reduced_g = z.transpose() * &g;
        if reduced_g.amax() < 1e-15 {
            break;
        }
        let h = DMatrix::from_diagonal(&DVector::from_fn(8, |i, _| 1.0 / q[i]));
        let reduced_h = z.transpose() * h * &z;
        let d = reduced_h.cholesky().expect("positive definite").solve(&(-&reduced_g));
        let dq = &z * d;
        let f0 = kl(&q, p);
        let slope = reduced_g.dot(&(z.transpose() * &dq));
        let mut alpha = 1.0;
        loop {
            let trial: [f64; 8] = std::array::from_fn(|i| q[i] + alpha * dq[i]);
            if trial.iter().all(|&x| x > 0.0) && kl(&trial, p) <= f0 + 1e-4 * alpha * slope {
                q = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-20 {
                return q;
            }
        }
    }
    q
}

/// Projection onto new evidence marginals (C unconstrained).
pub fn project_evidence(p: &[f64; 8], t1: f64, t2: f64) -> [f64; 8] {
    let rows = [[1.0; 8], indicator_row(E1), indicator_row(E2)];
    let start = std::array::from_fn(|i| {
        let w1 = if bit(i, E1) { t1 } else { 1.0 - t1 };
        let w2 = if bit(i, E2) { t2 } else { 1.0 - t2 };
        w1 * w2 / 2.0
    });
    kl_projection(p, &rows, start)
}

/// Projection onto three one-dimensional margins.
pub fn project_margins(p: &[f64; 8], t: [f64; 3]) -> [f64; 8] {
    let rows = [[1.0; 8], indicator_row(E1), indicator_row(E2), indicator_row(C)];
    let start = std::array::from_fn(|i| {
        [E1, E2, C]
            .iter()
            .zip(t)
            .map(|(&b, tb)| if bit(i, b) { tb } else { 1.0 - tb })
            .product()
    });
    kl_projection(p, &rows, start)
}

/// Odds ratio of the variables at bits `a` and `b` within the slice where
/// the remaining variable equals `v`.
pub fn conditional_odds_ratio(q: &[f64; 8], a: usize, b: usize, v: bool) -> f64 {
    let other = 3 - a - b;
    let cell = |x: bool, y: bool| {
        let i = (0..8)
            .find(|&i| bit(i, a) == x && bit(i, b) == y && bit(i, other) == v)
            .unwrap();
        q[i]
    };
    cell(true, true) * cell(false, false) / (cell(true, false) * cell(false, true))
}

pub fn random_positive_cells(rng: &mut impl Rng, floor: f64) -> [f64; 8] {
    let mut cells: [f64; 8] = std::array::from_fn(|_| rng.random_range(floor..1.0));
    let s: f64 = cells.iter().sum();
    cells.iter_mut().for_each(|c| *c /= s);
    cells
}

/// Closed-form correct answer for independent evidence, from the cells.
pub fn mixture_answer(q: &[f64; 8], t1: f64, t2: f64) -> f64 {
    let mut total = 0.0;
    for e1 in [false, true] {
        for e2 in [false, true] {
            let base = 4 * e1 as usize + 2 * e2 as usize;
            let cond = q[base + 1] / (q[base] + q[base + 1]);
            let w1 = if e1 { t1 } else { 1.0 - t1 };
            let w2 = if e2 { t2 } else { 1.0 - t2 };
            total += cond * w1 * w2;
        }
    }
    total
}

/// Piecewise-linear anchor curve written out independently.
pub fn anchor_curve(p_cne: f64, p_e: f64, p_c: f64, p_ce: f64, x: f64) -> f64 {
    if x < p_e {
        p_cne + (p_c - p_cne) * (x / p_e)
    } else {
        p_c + (p_ce - p_c) * ((x - p_e) / (1.0 - p_e))
    }
}
