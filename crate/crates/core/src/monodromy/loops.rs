use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ode::nearest_root;
use crate::curves::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::field::complex_pairs;

/// Vertices of the polygon that replaces each small circle around a branch point.
pub const CIRCLE_VERTICES: usize = 24;

/// A closed polyline based at the base point, with the value of `y` tracked
/// continuously along it recorded at each vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub label: String,
    /// Lassos traversed, as 1-based positions in the angular order of the branch points.
    pub lassos: Vec<usize>,
    #[serde(with = "complex_pairs")]
    pub vertices: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub sheets: Vec<Complex64>,
}

/// Closed loops `a_1, b_1, ..., a_g, b_g` generating the fundamental group.
///
/// Finite branch points are sorted by the argument of `lambda - base_point`
/// (base point below every branch point), so lasso `s_1` goes around the
/// rightmost one. Each lasso runs straight to a circle of radius `radius`
/// about its branch point, once around counterclockwise, and straight back.
/// With `k` counting from 1,
///
/// `a_i = s_{2i-1} s_{2i}` and `b_i = s_{2i+1} s_{2i+2} ... s_{2g+1} s_{2i}`
///
/// as paths, first factor first. These satisfy `prod [a_i, b_i] = 1` in the
/// fundamental group of the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSystem {
    #[serde(with = "complex_pair")]
    pub base_point: Complex64,
    /// `y` at the base point on the starting sheet.
    #[serde(with = "complex_pair")]
    pub base_sheet: Complex64,
    pub clearance: f64,
    pub radius: f64,
    /// Branch point indices (into the curve's list) in angular order.
    pub order: Vec<usize>,
    pub loops: Vec<Loop>,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Base point below all branch points, centred under their real range.
pub fn default_base_point(points: &[Complex64]) -> Complex64 {
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| {
        (a.min(z.re), b.max(z.re))
    });
    let im_min = points.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
    let drop = (0.75 * (hi - lo)).max(1.0);
    Complex64::new(0.5 * (lo + hi), im_min - drop)
}

pub fn build_loops(curve: &HyperellipticCurve, clearance: f64) -> Result<LoopSystem> {
    if !curve.is_odd_degree() {
        return Err(Error::Unsupported(
            "an odd-degree model (a branch point at infinity) to build loops".into(),
        ));
    }
    build_loops_for_points(&curve.branch_points_f64(), clearance)
}

/// Loops for `y^2 = prod (x - points[k])` with an odd number of points.
pub fn build_loops_for_points(points: &[Complex64], clearance: f64) -> Result<LoopSystem> {
    if !(clearance > 0.0 && clearance.is_finite()) {
        return Err(Error::Parameter {
            name: "clearance",
            reason: format!("{clearance} is not positive"),
        });
    }
    let n = points.len();
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "an odd number (at least 5) of finite branch points, got {n}"
        )));
    }
    let g = (n - 1) / 2;
    for i in 0..n {
        for j in i + 1..n {
            let d = (points[i] - points[j]).norm();
            if d < 2.0 * clearance {
                return Err(Error::InfeasibleClearance(format!(
                    "branch points {i} and {j} are {d:.3e} apart, below twice the clearance {clearance}"
                )));
            }
        }
    }
    let base = default_base_point(points);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let ai = (points[i] - base).arg();
        let aj = (points[j] - base).arg();
        ai.total_cmp(&aj)
    });
    // Polygon edges stay at least `clearance` from the centre.
    let radius = clearance / (std::f64::consts::PI / CIRCLE_VERTICES as f64).cos();
    let lasso = |k: usize| -> Vec<Complex64> {
        let center = points[order[k - 1]];
        let towards = (center - base) / (center - base).norm();
        let entry = center - towards * radius;
        let phase0 = (entry - center).arg();
        let mut v = vec![base, entry];
        for s in 1..=CIRCLE_VERTICES {
            let phase = phase0 + 2.0 * std::f64::consts::PI * s as f64 / CIRCLE_VERTICES as f64;
            v.push(if s == CIRCLE_VERTICES {
                entry
            } else {
                center + Complex64::from_polar(radius, phase)
            });
        }
        v.push(base);
        v
    };
    let base_sheet = points.iter().map(|l| base - l).product::<Complex64>().sqrt();
    let mut loops = Vec::with_capacity(2 * g);
    for i in 1..=g {
        let a: Vec<usize> = vec![2 * i - 1, 2 * i];
        let mut b: Vec<usize> = (2 * i + 1..=2 * g + 1).collect();
        b.push(2 * i);
        for (label, word) in [(format!("a{i}"), a), (format!("b{i}"), b)] {
            let mut vertices = vec![base];
            for &k in &word {
                vertices.extend(lasso(k).into_iter().skip(1));
            }
            let sheets = track_sheets(points, &vertices, base_sheet);
            let end = *sheets.last().expect("nonempty");
            if (end - base_sheet).norm() > 1e-8 * base_sheet.norm() {
                return Err(Error::InfeasibleClearance(format!(
                    "loop {label} does not close on its sheet"
                )));
            }
            loops.push(Loop {
                label,
                lassos: word,
                vertices,
                sheets,
            });
        }
    }
    let system = LoopSystem {
        base_point: base,
        base_sheet,
        clearance,
        radius,
        order,
        loops,
    };
    system.check_clearance(points)?;
    Ok(system)
}

/// `y` continued along the polyline from `start`, recorded at each vertex.
pub fn track_sheets(points: &[Complex64], vertices: &[Complex64], start: Complex64) -> Vec<Complex64> {
    let f = |x: Complex64| points.iter().map(|l| x - l).product::<Complex64>();
    let dist = |x: Complex64| points.iter().map(|l| (x - l).norm()).fold(f64::INFINITY, f64::min);
    let mut y = nearest_root(f(vertices[0]), start);
    let mut out = vec![y];
    for w in vertices.windows(2) {
        let len = (w[1] - w[0]).norm();
        let mut t = 0.0;
        while t < 1.0 {
            let x = w[0] + (w[1] - w[0]) * t;
            let dt = (0.05 * dist(x) / len.max(1e-300)).max(1e-9);
            t = (t + dt).min(1.0);
            y = nearest_root(f(w[0] + (w[1] - w[0]) * t), y);
        }
        out.push(y);
    }
    out
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

impl LoopSystem {
    pub fn genus(&self) -> usize {
        self.loops.len() / 2
    }

    /// Every vertex and segment keeps at least `clearance` from every branch point.
    pub fn check_clearance(&self, points: &[Complex64]) -> Result<()> {
        let slack = self.clearance * (1.0 - 1e-9);
        for lp in &self.loops {
            for w in lp.vertices.windows(2) {
                for (k, p) in points.iter().enumerate() {
                    let d = segment_distance(*p, w[0], w[1]);
                    if d < slack {
                        return Err(Error::InfeasibleClearance(format!(
                            "loop {} passes within {d:.3e} of branch point {k} (clearance {})",
                            lp.label, self.clearance
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest distance from any loop to any of `points`.
    pub fn min_distance(&self, points: &[Complex64]) -> f64 {
        self.loops
            .iter()
            .flat_map(|lp| lp.vertices.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>())
            .flat_map(|(a, b)| points.iter().map(move |p| segment_distance(*p, a, b)))
            .fold(f64::INFINITY, f64::min)
    }
}
