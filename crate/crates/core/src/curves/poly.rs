use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::ExactScalar;

/// Exponent triple of a monomial x^a y^b z^c. Univariate polynomials in x use `[a, 0, 0]`.
pub type Monomial = [u32; 3];

/// Sparse polynomial in up to three variables with exact coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly {
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn monomial(exp: Monomial, coeff: ExactScalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(exp, coeff);
        p
    }

    /// x^d
    pub fn x_pow(d: u32) -> Self {
        Poly::monomial([d, 0, 0], ExactScalar::one())
    }

    /// Univariate polynomial in x from coefficients in ascending degree.
    pub fn from_x_coeffs(coeffs: &[ExactScalar]) -> Self {
        let mut p = Poly::zero();
        for (d, c) in coeffs.iter().enumerate() {
            p.add_term([d as u32, 0, 0], c.clone());
        }
        p
    }

    pub fn add_term(&mut self, exp: Monomial, coeff: ExactScalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(ExactScalar::zero);
        *entry += &coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Monomial) -> ExactScalar {
        self.terms.get(exp).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &ExactScalar) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    pub fn eval(&self, x: Complex64, y: Complex64, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_complex() * x.powu(e[0]) * y.powu(e[1]) * z.powu(e[2]))
            .sum()
    }

    pub fn eval_x(&self, x: Complex64) -> Complex64 {
        self.eval(x, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }
}
