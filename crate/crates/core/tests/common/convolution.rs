//! Numerical convolution of mixed (atoms + density) distributions.
//!
//! Independent of the closed-form pieces: densities are closures, and the
//! continuous-continuous term is integrated with 5-point Gauss-Legendre on
//! every sub-interval between kinks. Kinks are tracked through the
//! convolution so every integrand is smooth on each sub-interval.

#![allow(dead_code)]

use std::rc::Rc;

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

#[derive(Clone)]
pub struct NumericMixed {
    pub atoms: Vec<(f64, f64)>,
    /// Density on `(lo, hi)`; zero outside.
    pub density: Rc<dyn Fn(f64) -> f64>,
    pub lo: f64,
    pub hi: f64,
    /// Sorted points where the density may be non-smooth, ends included.
    pub kinks: Vec<f64>,
}

impl NumericMixed {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else {
            (self.density)(x)
        }
    }
}

/// Single-pair DoF law written from its CDF `-3a^2 - 2a rho + 4a + rho^2`.
pub fn alpha_law(rho: f64) -> NumericMixed {
    NumericMixed {
        atoms: vec![(0.0, rho * rho), (rho, 1.0 - 4.0 * rho + 4.0 * rho * rho)],
        density: Rc::new(move |a| 4.0 - 2.0 * rho - 6.0 * a),
        lo: 0.0,
        hi: rho,
        kinks: vec![0.0, rho],
    }
}

fn dedup_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

fn gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES.iter().zip(GL_WEIGHTS).map(|(&x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

pub fn convolve(a: &NumericMixed, b: &NumericMixed) -> NumericMixed {
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for &(la, wa) in &a.atoms {
        for &(lb, wb) in &b.atoms {
            let loc = la + lb;
            match atoms.iter_mut().find(|(l, _)| (*l - loc).abs() < 1e-12) {
                Some(slot) => slot.1 += wa * wb,
                None => atoms.push((loc, wa * wb)),
            }
        }
    }

    let mut kinks = Vec::new();
    for &ka in &a.kinks {
        kinks.extend(b.kinks.iter().map(|kb| ka + kb));
        kinks.extend(b.atoms.iter().map(|(lb, _)| ka + lb));
    }
    for &kb in &b.kinks {
        kinks.extend(a.atoms.iter().map(|(la, _)| la + kb));
    }
    let kinks = dedup_sorted(kinks);

    let (a2, b2) = (a.clone(), b.clone());
    let density = move |x: f64| {
        let mut total = 0.0;
        for &(la, wa) in &a2.atoms {
            total += wa * b2.eval(x - la);
        }
        for &(lb, wb) in &b2.atoms {
            total += wb * a2.eval(x - lb);
        }
        let t_lo = a2.lo.max(x - b2.hi);
        let t_hi = a2.hi.min(x - b2.lo);
        if t_hi > t_lo {
            let mut cuts: Vec<f64> = vec![t_lo, t_hi];
            cuts.extend(a2.kinks.iter().copied().filter(|&k| k > t_lo && k < t_hi));
            cuts.extend(b2.kinks.iter().map(|k| x - k).filter(|&k| k > t_lo && k < t_hi));
            let cuts = dedup_sorted(cuts);
            let integrand = |t: f64| a2.eval(t) * b2.eval(x - t);
            for w in cuts.windows(2) {
                total += gauss(&integrand, w[0], w[1]);
            }
        }
        total
    };

    NumericMixed { atoms, density: Rc::new(density), lo: a.lo + b.lo, hi: a.hi + b.hi, kinks }
}

/// Law of the sum of three independent pair DoF.
pub fn phi_law(rho: f64) -> NumericMixed {
    let alpha = alpha_law(rho);
    convolve(&convolve(&alpha, &alpha), &alpha)
}
