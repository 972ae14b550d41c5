use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{Monomial, Poly};
use crate::error::{Error, Result};
use crate::field::ExactScalar;

/// y^2 = prod (x - lambda_k), stored by its branch points.
///
/// With `2g + 1` finite branch points the point at infinity is a branch point
/// too; with `2g + 2` it is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    branch_points: Vec<ExactScalar>,
    genus: usize,
}

impl HyperellipticCurve {
    pub fn new(branch_points: Vec<ExactScalar>) -> Result<Self> {
        let n = branch_points.len();
        if n < 5 {
            return Err(Error::TooFewBranchPoints(n));
        }
        for i in 0..n {
            for j in i + 1..n {
                if branch_points[i] == branch_points[j] {
                    return Err(Error::CoincidentBranchPoints(i, j));
                }
            }
        }
        Ok(HyperellipticCurve {
            branch_points,
            genus: (n - 1) / 2,
        })
    }

    /// Curve with integer branch points.
    pub fn from_integers(points: &[i64]) -> Result<Self> {
        HyperellipticCurve::new(points.iter().map(|&p| ExactScalar::from_int(p)).collect())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[ExactScalar] {
        &self.branch_points
    }

    pub fn branch_points_f64(&self) -> Vec<Complex64> {
        self.branch_points.iter().map(ExactScalar::to_complex).collect()
    }

    /// Degree of f.
    pub fn degree(&self) -> usize {
        self.branch_points.len()
    }

    pub fn is_odd_degree(&self) -> bool {
        self.degree() % 2 == 1
    }

    /// Coefficients of f, ascending degree (monic).
    pub fn f_coefficients(&self) -> Vec<ExactScalar> {
        let mut coeffs = vec![ExactScalar::one()];
        for lambda in &self.branch_points {
            let mut next = vec![ExactScalar::zero(); coeffs.len() + 1];
            for (d, c) in coeffs.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= &(c * lambda);
            }
            coeffs = next;
        }
        coeffs
    }

    pub fn f_poly(&self) -> Poly {
        Poly::from_x_coeffs(&self.f_coefficients())
    }

    /// Smallest pairwise distance between branch points.
    pub fn min_separation(&self) -> f64 {
        let pts = self.branch_points_f64();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min((pts[i] - pts[j]).norm());
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuarticFamily {
    /// x^4 + y^4 + z^4
    Fermat,
    /// x^3 y + y^3 z + z^3 x
    Klein,
    /// Supplied by the user together with an explicit smoothness assertion.
    UserAsserted,
}

/// Exponents of the 15 quartic monomials in coefficient order: descending in
/// the x exponent, then in the y exponent.
pub fn quartic_monomials() -> Vec<Monomial> {
    let mut out = Vec::with_capacity(15);
    for a in (0..=4u32).rev() {
        for b in (0..=4 - a).rev() {
            out.push([a, b, 4 - a - b]);
        }
    }
    out
}

/// Smooth plane quartic F(x, y, z) = 0, hence a non-hyperelliptic curve of genus 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneQuartic {
    coefficients: Vec<ExactScalar>,
    family: QuarticFamily,
}

impl PlaneQuartic {
    fn from_terms(terms: &[(Monomial, i64)], family: QuarticFamily) -> Self {
        let coefficients = quartic_monomials()
            .iter()
            .map(|m| {
                terms
                    .iter()
                    .find(|(e, _)| e == m)
                    .map_or_else(ExactScalar::zero, |(_, c)| ExactScalar::from_int(*c))
            })
            .collect();
        PlaneQuartic { coefficients, family }
    }

    pub fn fermat() -> Self {
        PlaneQuartic::from_terms(&[([4, 0, 0], 1), ([0, 4, 0], 1), ([0, 0, 4], 1)], QuarticFamily::Fermat)
    }

    pub fn klein() -> Self {
        PlaneQuartic::from_terms(&[([3, 1, 0], 1), ([0, 3, 1], 1), ([1, 0, 3], 1)], QuarticFamily::Klein)
    }

    /// User quartic. Coefficients matching a verified family are accepted as
    /// that family; anything else needs `smooth_asserted`.
    pub fn from_coefficients(coefficients: Vec<ExactScalar>, smooth_asserted: bool) -> Result<Self> {
        if coefficients.len() != 15 {
            return Err(Error::QuarticCoefficientCount(coefficients.len()));
        }
        for known in [PlaneQuartic::fermat(), PlaneQuartic::klein()] {
            if known.coefficients == coefficients {
                return Ok(known);
            }
        }
        if !smooth_asserted {
            return Err(Error::SmoothnessNotAsserted);
        }
        if coefficients.iter().all(ExactScalar::is_zero) {
            return Err(Error::Parameter {
                name: "coefficients",
                reason: "zero quartic".into(),
            });
        }
        Ok(PlaneQuartic {
            coefficients,
            family: QuarticFamily::UserAsserted,
        })
    }

    pub fn coefficients(&self) -> &[ExactScalar] {
        &self.coefficients
    }

    pub fn family(&self) -> QuarticFamily {
        self.family
    }

    pub fn smoothness_asserted_by_user(&self) -> bool {
        self.family == QuarticFamily::UserAsserted
    }

    pub fn form(&self) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in quartic_monomials().into_iter().zip(&self.coefficients) {
            p.add_term(m, c.clone());
        }
        p
    }
}

/// An explicit curve model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub enum Curve {
    Hyperelliptic(HyperellipticCurve),
    Quartic(PlaneQuartic),
}

impl Curve {
    pub fn genus(&self) -> usize {
        match self {
            Curve::Hyperelliptic(h) => h.genus(),
            Curve::Quartic(_) => 3,
        }
    }

    pub fn is_hyperelliptic(&self) -> bool {
        matches!(self, Curve::Hyperelliptic(_))
    }

    pub fn as_hyperelliptic(&self) -> Option<&HyperellipticCurve> {
        match self {
            Curve::Hyperelliptic(h) => Some(h),
            Curve::Quartic(_) => None,
        }
    }

    pub fn hyperelliptic(points: &[i64]) -> Result<Self> {
        Ok(Curve::Hyperelliptic(HyperellipticCurve::from_integers(points)?))
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            Curve::Hyperelliptic(h) => {
                let pts: Vec<String> = h.branch_points().iter().map(|p| p.to_string()).collect();
                format!("hyperelliptic g={} [{}]", h.genus(), pts.join(", "))
            }
            Curve::Quartic(q) => format!("quartic {:?}", q.family()),
        }
    }
}

impl From<HyperellipticCurve> for Curve {
    fn from(h: HyperellipticCurve) -> Self {
        Curve::Hyperelliptic(h)
    }
}

impl From<PlaneQuartic> for Curve {
    fn from(q: PlaneQuartic) -> Self {
        Curve::Quartic(q)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelTag {
    Hyperelliptic,
    Quartic,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    model: ModelTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branch_points: Option<Vec<ExactScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<ExactScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<QuarticFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    smooth_asserted: Option<bool>,
}

impl TryFrom<CurveJson> for Curve {
    type Error = Error;
    fn try_from(j: CurveJson) -> Result<Self> {
        match j.model {
            ModelTag::Hyperelliptic => {
                let pts = j.branch_points.ok_or(Error::Parameter {
                    name: "branch_points",
                    reason: "required for a hyperelliptic curve".into(),
                })?;
                Ok(Curve::Hyperelliptic(HyperellipticCurve::new(pts)?))
            }
            ModelTag::Quartic => match (j.coefficients, j.family) {
                (Some(c), _) => Ok(Curve::Quartic(PlaneQuartic::from_coefficients(
                    c,
                    j.smooth_asserted.unwrap_or(false),
                )?)),
                (None, Some(QuarticFamily::Fermat)) => Ok(Curve::Quartic(PlaneQuartic::fermat())),
                (None, Some(QuarticFamily::Klein)) => Ok(Curve::Quartic(PlaneQuartic::klein())),
                _ => Err(Error::Parameter {
                    name: "coefficients",
                    reason: "required unless family is fermat or klein".into(),
                }),
            },
        }
    }
}

impl From<Curve> for CurveJson {
    fn from(c: Curve) -> Self {
        match c {
            Curve::Hyperelliptic(h) => CurveJson {
                model: ModelTag::Hyperelliptic,
                branch_points: Some(h.branch_points),
                coefficients: None,
                family: None,
                smooth_asserted: None,
            },
            Curve::Quartic(q) => CurveJson {
                model: ModelTag::Quartic,
                branch_points: None,
                smooth_asserted: Some(q.smoothness_asserted_by_user()),
                family: Some(q.family),
                coefficients: Some(q.coefficients),
            },
        }
    }
}
