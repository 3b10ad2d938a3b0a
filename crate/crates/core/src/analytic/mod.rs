//! Closed-form DoF distributions for three uncoordinated transmitters.
//!
//! With all normalized delays i.i.d. uniform, each pair DoF `alpha` has a
//! point mass `rho^2` at 0, a point mass `(1 - 2 rho)^2` at `rho` and the
//! linear density `4 - 2 rho - 6 alpha` in between. The sum `phi` of three
//! independent copies has four atoms (at 0, rho, 2 rho, 3 rho) and a
//! quintic density on each of `(0, rho]`, `(rho, 2 rho]`, `(2 rho, 3 rho]`.

mod poly;

pub use poly::Polynomial;

use crate::dof::DutyCycle;
use crate::error::{Error, Result};

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// A polynomial density on the half-open interval `(lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Polynomial,
}

/// Atoms plus a piecewise-polynomial continuous part.
///
/// Pieces are contiguous and sorted; a point shared by two pieces belongs to
/// the left one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDistribution {
    atoms: Vec<Atom>,
    pieces: Vec<Piece>,
}

impl MixedDistribution {
    pub fn new(atoms: Vec<Atom>, pieces: Vec<Piece>) -> Self {
        Self { atoms, pieces }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.continuous_mass()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn continuous_mass(&self) -> f64 {
        self.pieces.iter().map(|p| p.poly.integral(p.lo, p.hi)).sum()
    }

    /// Continuous density at `x` (atoms excluded).
    pub fn density(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| x > p.lo && x <= p.hi)
            .map_or(0.0, |p| p.poly.eval(x))
    }

    /// Continuous mass on `(x, +inf)`.
    fn continuous_above(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.hi > x)
            .map(|p| p.poly.integral(p.lo.max(x), p.hi))
            .sum()
    }

    /// Continuous mass on `(-inf, x]`.
    fn continuous_below(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.lo < x)
            .map(|p| p.poly.integral(p.lo, p.hi.min(x)))
            .sum()
    }

    /// `P(X > x)`, atoms counted only when strictly above `x`.
    pub fn ccdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.location > x).map(|a| a.weight).sum();
        atoms + self.continuous_above(x)
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.location <= x).map(|a| a.weight).sum();
        atoms + self.continuous_below(x)
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.location < x).map(|a| a.weight).sum();
        atoms + self.continuous_below(x)
    }

    pub fn mean(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.location * a.weight).sum();
        let cont: f64 = self.pieces.iter().map(|p| p.poly.shift_up().integral(p.lo, p.hi)).sum();
        atoms + cont
    }

    /// Upper end of the support.
    pub fn support_end(&self) -> f64 {
        let a = self.atoms.iter().map(|a| a.location).fold(f64::NEG_INFINITY, f64::max);
        let p = self.pieces.iter().map(|p| p.hi).fold(f64::NEG_INFINITY, f64::max);
        a.max(p)
    }
}

/// CDF of the single-pair DoF on `[0, rho]`.
pub fn cdf_alpha(alpha: f64, rho: DutyCycle) -> Result<f64> {
    let r = rho.value();
    if !(0.0..=r).contains(&alpha) {
        return Err(Error::OutOfDomain { what: "alpha", value: alpha });
    }
    if alpha == r {
        return Ok(1.0);
    }
    Ok(-3.0 * alpha * alpha - 2.0 * alpha * r + 4.0 * alpha + r * r)
}

pub fn pdf_alpha(rho: DutyCycle) -> MixedDistribution {
    let r = rho.value();
    MixedDistribution::new(
        vec![
            Atom { location: 0.0, weight: r * r },
            Atom { location: r, weight: (1.0 - 2.0 * r).powi(2) },
        ],
        vec![Piece { lo: 0.0, hi: r, poly: Polynomial::new(vec![4.0 - 2.0 * r, -6.0]) }],
    )
}

// Terms (coefficient, power of rho, power of phi) of the three density
// pieces of the sum DoF.
const P1: &[(f64, i32, usize)] = &[
    (-6.0, 5, 0),
    (-6.0, 4, 1),
    (12.0, 4, 0),
    (32.0, 3, 2),
    (-48.0, 3, 1),
    (6.0, 2, 3),
    (-48.0, 2, 2),
    (48.0, 2, 1),
    (-9.0, 1, 4),
    (48.0, 1, 3),
    (-48.0, 1, 2),
    (-9.0 / 5.0, 0, 5),
    (18.0, 0, 4),
    (-48.0, 0, 3),
    (32.0, 0, 2),
];

const P2: &[(f64, i32, usize)] = &[
    (303.0 / 5.0, 5, 0),
    (39.0, 4, 1),
    (-198.0, 4, 0),
    (-118.0, 3, 2),
    (240.0, 3, 1),
    (78.0, 3, 0),
    (-12.0, 2, 3),
    (204.0, 2, 2),
    (-426.0, 2, 1),
    (96.0, 2, 0),
    (18.0, 1, 4),
    (-96.0, 1, 3),
    (78.0, 1, 2),
    (96.0, 1, 1),
    (-48.0, 1, 0),
    (18.0 / 5.0, 0, 5),
    (-36.0, 0, 4),
    (114.0, 0, 3),
    (-136.0, 0, 2),
    (48.0, 0, 1),
];

const P3: &[(f64, i32, usize)] = &[
    (-273.0 / 5.0, 5, 0),
    (-33.0, 4, 1),
    (186.0, 4, 0),
    (86.0, 3, 2),
    (-192.0, 3, 1),
    (-42.0, 3, 0),
    (6.0, 2, 3),
    (-156.0, 2, 2),
    (378.0, 2, 1),
    (-168.0, 2, 0),
    (-9.0, 1, 4),
    (48.0, 1, 3),
    (-30.0, 1, 2),
    (-96.0, 1, 1),
    (78.0, 1, 0),
    (-9.0 / 5.0, 0, 5),
    (18.0, 0, 4),
    (-66.0, 0, 3),
    (104.0, 0, 2),
    (-66.0, 0, 1),
    (12.0, 0, 0),
];

/// Distribution of the sum DoF of three uncoordinated pairs.
pub fn pdf_phi(rho: DutyCycle) -> MixedDistribution {
    let r = rho.value();
    let a = r * r;
    let b = 1.0 - 4.0 * r + 4.0 * r * r;
    MixedDistribution::new(
        vec![
            Atom { location: 0.0, weight: a * a * a },
            Atom { location: r, weight: 3.0 * a * a * b },
            Atom { location: 2.0 * r, weight: 3.0 * a * b * b },
            Atom { location: 3.0 * r, weight: b * b * b },
        ],
        vec![
            Piece { lo: 0.0, hi: r, poly: poly::collapse(P1, r) },
            Piece { lo: r, hi: 2.0 * r, poly: poly::collapse(P2, r) },
            Piece { lo: 2.0 * r, hi: 3.0 * r, poly: poly::collapse(P3, r) },
        ],
    )
}

/// `P(phi > x)`; zero from `3 rho` on.
pub fn ccdf_phi(x: f64, rho: DutyCycle) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::OutOfDomain { what: "phi", value: x });
    }
    Ok(pdf_phi(rho).ccdf(x))
}

/// Probability that the three uncoordinated pairs beat orthogonal access.
pub fn prob_exceeds_one(rho: DutyCycle) -> f64 {
    pdf_phi(rho).ccdf(1.0)
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Duty cycle maximizing [`prob_exceeds_one`] over `(1/3, 1/2]`.
///
/// A coarse scan at 1e-3 brackets the maximum, then golden-section search
/// narrows it to 1e-5.
pub fn find_rho_opt() -> DutyCycle {
    let objective = |r: f64| prob_exceeds_one(DutyCycle::permissive(r, 3).expect("bracket inside range"));
    let lo: f64 = 1.0 / 3.0;
    let steps = ((0.5 - lo) / 1e-3).floor() as usize;
    let grid = |k: usize| (lo + k as f64 * 1e-3).min(0.5);
    let best = (1..=steps + 1)
        .map(|k| (k, objective(grid(k))))
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });

    let mut a = grid(best.0 - 1);
    let mut b = grid(best.0 + 1);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while (b - a).abs() > 1e-5 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = objective(d);
        }
    }
    DutyCycle::new(0.5 * (a + b), 3).expect("optimum is interior")
}
