//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's LP, null-space or normal-distribution code.
#![allow(dead_code)]

use arbitrage_lab::market::Market;
use arbitrage_lab::rational::Rational;
use arbitrage_lab::NodeId;
use num_traits::{Signed, Zero};

// ---- Fourier-Motzkin feasibility ----------------------------------------

/// `coefs · x >= rhs` or `coefs · x = rhs`.
#[derive(Clone, Debug)]
pub struct Row {
    pub coefs: Vec<Rational>,
    pub rhs: Rational,
    pub eq: bool,
}

fn ge(coefs: Vec<Rational>, rhs: Rational) -> Row {
    Row { coefs, rhs, eq: false }
}

fn eq(coefs: Vec<Rational>, rhs: Rational) -> Row {
    Row { coefs, rhs, eq: true }
}

/// Exact feasibility of a small linear system by substitution of the
/// equalities followed by Fourier-Motzkin elimination.
pub fn fm_feasible(mut rows: Vec<Row>, n: usize) -> bool {
    // Substitute equalities away.
    while let Some(pos) = rows.iter().position(|r| r.eq) {
        let e = rows.swap_remove(pos);
        let Some(j) = e.coefs.iter().position(|c| !c.is_zero()) else {
            if !e.rhs.is_zero() {
                return false;
            }
            continue;
        };
        for r in rows.iter_mut() {
            if r.coefs[j].is_zero() {
                continue;
            }
            let f = &r.coefs[j] / &e.coefs[j];
            for k in 0..n {
                r.coefs[k] = &r.coefs[k] - &f * &e.coefs[k];
            }
            r.rhs = &r.rhs - &f * &e.rhs;
        }
    }
    for j in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coefs[j].is_positive() {
                pos.push(r);
            } else if r.coefs[j].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for q in &neg {
                let a = -q.coefs[j].clone();
                let b = p.coefs[j].clone();
                let coefs: Vec<Rational> = (0..n).map(|k| &a * &p.coefs[k] + &b * &q.coefs[k]).collect();
                let rhs = &a * &p.rhs + &b * &q.rhs;
                rest.push(normalize(ge(coefs, rhs)));
            }
        }
        dedup(&mut rest);
        rows = rest;
    }
    rows.iter().all(|r| !r.rhs.is_positive())
}

fn normalize(mut r: Row) -> Row {
    if let Some(s) = r.coefs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
        r.coefs.iter_mut().for_each(|c| *c = &*c / &s);
        r.rhs = &r.rhs / &s;
    }
    r
}

fn dedup(rows: &mut Vec<Row>) {
    let mut out: Vec<Row> = Vec::new();
    for r in rows.drain(..) {
        match out.iter_mut().find(|o| o.coefs == r.coefs) {
            // Same left side: keep the stronger bound.
            Some(o) => {
                if r.rhs > o.rhs {
                    o.rhs = r.rhs;
                }
            }
            None => out.push(r),
        }
    }
    *rows = out;
}

/// Whether the whole tree admits an arbitrage, decided on the joint system
/// over every decision node's holdings: self-financing, zero initial value,
/// nonnegative leaf values summing to at least 1.
pub fn whole_tree_arbitrage(m: &Market) -> bool {
    let tree = m.tree();
    let d = m.assets();
    let decision: Vec<NodeId> = tree.internal_nodes().collect();
    let slot = |n: NodeId| decision.iter().position(|&x| x == n).expect("decision node");
    let nv = decision.len() * d;
    let value_row = |owner: NodeId, at: NodeId| {
        let mut row = vec![Rational::zero(); nv];
        for i in 0..d {
            row[slot(owner) * d + i] = m.price(at)[i].clone();
        }
        row
    };
    let mut rows = vec![eq(value_row(tree.root(), tree.root()), Rational::zero())];
    for &n in &decision {
        if let Some(p) = tree.parent(n) {
            let mut row = value_row(p, n);
            for (x, y) in row.iter_mut().zip(value_row(n, n)) {
                *x -= y;
            }
            rows.push(eq(row, Rational::zero()));
        }
    }
    let mut total = vec![Rational::zero(); nv];
    for &leaf in tree.leaves() {
        let row = value_row(tree.parent(leaf).expect("leaf below root"), leaf);
        for (x, y) in total.iter_mut().zip(&row) {
            *x += y;
        }
        rows.push(ge(row, Rational::zero()));
    }
    rows.push(ge(total, Rational::from_integer(1.into())));
    fm_feasible(rows, nv)
}

// ---- normal distribution and Bessel quadratures --------------------------

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// `Φ(x)` by Simpson quadrature of the density from 0.
pub fn phi_quadrature(x: f64) -> f64 {
    let density = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    0.5 + simpson(density, 0.0, x, 20_000)
}

/// `E[1 / |x + B_t|]` for three-dimensional Brownian motion with `|x| = a`,
/// by quadrature of the radial density.
pub fn inverse_bessel3_mean(a: f64, t: f64) -> f64 {
    let s = t.sqrt();
    let g = |r: f64| (-(r - a).powi(2) / (2.0 * t)).exp() - (-(r + a).powi(2) / (2.0 * t)).exp();
    simpson(g, 0.0, a + 14.0 * s, 200_000) / (a * (2.0 * std::f64::consts::PI * t).sqrt())
}

/// Reference values, 30 digits, from an arbitrary-precision evaluation.
pub const INV_PHI1_MINUS_1: f64 = 0.188_573_417_345_060_2;
pub const INVERSE_BESSEL3_MEAN: [(f64, f64); 3] = [
    (0.25, 0.954_499_736_103_641_6),
    (0.5, 0.842_700_792_949_714_9),
    (1.0, 0.682_689_492_137_085_9),
];
