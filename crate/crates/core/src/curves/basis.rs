use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::Curve;
use super::poly::{Monomial, Poly};
use crate::error::{Error, Result};
use crate::field::{ExactMatrix, ExactScalar};

/// What a numerator is divided by.
///
/// Hyperelliptic: `Y` means `p(x) dx^w / y`, `YSquared` means `p(x) dx^2 / y^2`.
/// Quartic: `Canonical` means `q(x, y, z) * Omega^w` with `Omega` the canonical
/// generator, so numerators are forms of degree `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorClass {
    YSquared,
    Y,
    Canonical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub weight: u8,
    pub class: DenominatorClass,
    pub numerator: Poly,
}

impl Differential {
    /// Product of two holomorphic 1-forms, a quadratic differential.
    pub fn product(&self, other: &Differential) -> Result<Differential> {
        if self.weight != 1 || other.weight != 1 {
            return Err(Error::Unsupported("products of weight-1 differentials".into()));
        }
        let class = match (self.class, other.class) {
            (DenominatorClass::Y, DenominatorClass::Y) => DenominatorClass::YSquared,
            (DenominatorClass::Canonical, DenominatorClass::Canonical) => DenominatorClass::Canonical,
            (a, b) => return Err(Error::Unsupported(format!("product of {a:?} and {b:?} differentials"))),
        };
        Ok(Differential {
            weight: 2,
            class,
            numerator: self.numerator.mul(&other.numerator),
        })
    }

    /// Linear combination `sum c_k * d_k` of differentials sharing weight and class.
    pub fn combination(coeffs: &[ExactScalar], parts: &[Differential]) -> Result<Differential> {
        let first = parts.first().ok_or(Error::ZeroCount("combination terms"))?;
        if coeffs.len() != parts.len() {
            return Err(Error::LengthMismatch {
                expected: parts.len(),
                got: coeffs.len(),
            });
        }
        let mut numerator = Poly::zero();
        for (c, d) in coeffs.iter().zip(parts) {
            if d.weight != first.weight || d.class != first.class {
                return Err(Error::Unsupported("combination across denominator classes".into()));
            }
            numerator = numerator.add(&d.numerator.scale(c));
        }
        Ok(Differential {
            weight: first.weight,
            class: first.class,
            numerator,
        })
    }
}

/// Ordered basis of H^0(K) (weight 1) or H^0(K^2) (weight 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialBasis {
    pub curve: Curve,
    pub weight: u8,
    pub elements: Vec<Differential>,
}

/// Basis of holomorphic 1-forms.
///
/// Hyperelliptic: `x^i dx / y` for `0 <= i < g`. Quartic: the forms induced by
/// the linear forms `x, y, z`, in that order.
pub fn canonical_basis(curve: &Curve) -> DifferentialBasis {
    let elements = match curve {
        Curve::Hyperelliptic(h) => (0..h.genus() as u32)
            .map(|i| Differential {
                weight: 1,
                class: DenominatorClass::Y,
                numerator: Poly::x_pow(i),
            })
            .collect(),
        Curve::Quartic(_) => [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .into_iter()
            .map(|m| Differential {
                weight: 1,
                class: DenominatorClass::Canonical,
                numerator: Poly::monomial(m, ExactScalar::one()),
            })
            .collect(),
    };
    DifferentialBasis {
        curve: curve.clone(),
        weight: 1,
        elements,
    }
}

/// Monomials of the quadratic-differential basis of a plane quartic, in order.
pub const QUARTIC_QUADRATIC_MONOMIALS: [Monomial; 6] =
    [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]];

/// Basis of holomorphic quadratic differentials, `3g - 3` elements.
///
/// Hyperelliptic: `x^i dx^2 / y^2` for `0 <= i <= 2g - 2`, then `x^j dx^2 / y`
/// for `0 <= j <= g - 3`. Quartic: the six quadratic monomials
/// `x^2, y^2, z^2, xy, xz, yz`.
pub fn quadratic_basis(curve: &Curve) -> DifferentialBasis {
    let elements = match curve {
        Curve::Hyperelliptic(h) => {
            let g = h.genus() as u32;
            let y2 = (0..=2 * g - 2).map(|i| Differential {
                weight: 2,
                class: DenominatorClass::YSquared,
                numerator: Poly::x_pow(i),
            });
            let y1 = (0..g.saturating_sub(2)).map(|j| Differential {
                weight: 2,
                class: DenominatorClass::Y,
                numerator: Poly::x_pow(j),
            });
            y2.chain(y1).collect()
        }
        Curve::Quartic(_) => QUARTIC_QUADRATIC_MONOMIALS
            .into_iter()
            .map(|m| Differential {
                weight: 2,
                class: DenominatorClass::Canonical,
                numerator: Poly::monomial(m, ExactScalar::one()),
            })
            .collect(),
    };
    DifferentialBasis {
        curve: curve.clone(),
        weight: 2,
        elements,
    }
}

type Key = (DenominatorClass, Monomial);

impl DifferentialBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn support(&self) -> BTreeMap<Key, usize> {
        let mut keys = BTreeMap::new();
        for e in &self.elements {
            for (m, _) in e.numerator.terms() {
                let next = keys.len();
                keys.entry((e.class, *m)).or_insert(next);
            }
        }
        keys
    }

    /// Rows = elements, columns = (class, monomial) pairs of the joint support.
    pub fn coefficient_matrix(&self) -> ExactMatrix {
        let keys = self.support();
        let mut m = ExactMatrix::zeros(self.elements.len(), keys.len());
        for (i, e) in self.elements.iter().enumerate() {
            for (mono, c) in e.numerator.terms() {
                m.set(i, keys[&(e.class, *mono)], c.clone());
            }
        }
        m
    }

    /// Exact coordinates of `numerator / class` in this basis.
    pub fn express(&self, numerator: &Poly, class: DenominatorClass) -> Result<Vec<ExactScalar>> {
        express_in_basis(numerator, class, self)
    }
}

/// Exact coordinates of the differential `numerator / class` with respect to
/// `basis`. Fails with the unexplained part if the differential is outside
/// the span.
///
/// Plane-quartic inputs are quadratic forms, below the degree of F, so no
/// reduction modulo F arises.
pub fn express_in_basis(
    numerator: &Poly,
    class: DenominatorClass,
    basis: &DifferentialBasis,
) -> Result<Vec<ExactScalar>> {
    let keys = basis.support();
    let outside: Vec<String> = numerator
        .terms()
        .filter(|(m, _)| !keys.contains_key(&(class, **m)))
        .map(|(m, c)| format!("({c}) x^{} y^{} z^{} / {class:?}", m[0], m[1], m[2]))
        .collect();
    if !outside.is_empty() {
        return Err(Error::NotInSpan {
            residual: outside.join(" + "),
        });
    }
    let mut target = vec![ExactScalar::zero(); keys.len()];
    for (m, c) in numerator.terms() {
        target[keys[&(class, *m)]] = c.clone();
    }
    // Solve coefficient_matrix^T * coords = target.
    let system = basis.coefficient_matrix().transpose();
    system.solve(&target)?.ok_or_else(|| Error::NotInSpan {
        residual: "inconsistent coordinates".into(),
    })
}
