/// Dense polynomial, coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(Vec<f64>);

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        out.extend(self.0.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Self(out)
    }

    /// `x * p(x)`.
    pub fn shift_up(&self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        out.extend_from_slice(&self.0);
        Self(out)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(hi) - anti.eval(lo)
    }
}

/// A polynomial in two variables given as `(coefficient, power of rho,
/// power of x)` terms; collapsing rho yields a [`Polynomial`] in x.
pub(crate) fn collapse(terms: &[(f64, i32, usize)], rho: f64) -> Polynomial {
    let degree = terms.iter().map(|t| t.2).max().unwrap_or(0);
    let mut coeffs = vec![0.0; degree + 1];
    for &(c, rp, xp) in terms {
        coeffs[xp] += c * rho.powi(rp);
    }
    Polynomial(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_integrate() {
        // 1 + 2x + 3x^2
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert!((p.integral(0.0, 1.0) - 3.0).abs() < 1e-15);
        assert_eq!(p.antiderivative().coeffs(), &[0.0, 1.0, 1.0, 1.0]);
        assert_eq!(p.shift_up().eval(2.0), 34.0);
    }

    #[test]
    fn collapse_terms() {
        // 2 rho x^2 - rho^2 at rho = 3
        let p = collapse(&[(2.0, 1, 2), (-1.0, 2, 0)], 3.0);
        assert_eq!(p.coeffs(), &[-9.0, 0.0, 6.0]);
    }
}
