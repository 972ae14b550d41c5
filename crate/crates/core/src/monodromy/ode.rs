use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::systems::{sl2_matrices, DifferentialSystem};

pub type Mat2 = Matrix2<Complex64>;

/// An sl2 system on an odd-degree hyperelliptic curve in floating point:
/// the connection form is `sum_i b[i] x^i dx / y` with `y^2 = prod (x - lambda_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSystem {
    branch_points: Vec<Complex64>,
    b: Vec<Mat2>,
}

impl NumericSystem {
    pub fn new(branch_points: Vec<Complex64>, b: Vec<Mat2>) -> Result<Self> {
        let n = branch_points.len();
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::Unsupported(format!(
                "an odd number (at least 5) of finite branch points, got {n}"
            )));
        }
        let g = (n - 1) / 2;
        if b.len() != g {
            return Err(Error::LengthMismatch {
                expected: g,
                got: b.len(),
            });
        }
        let finite = branch_points.iter().all(|z| z.is_finite()) && b.iter().all(|m| m.iter().all(|z| z.is_finite()));
        if !finite {
            return Err(Error::NonFinite {
                x: "system data".into(),
            });
        }
        Ok(NumericSystem { branch_points, b })
    }

    /// Float image of an exact sl2 system on an odd-degree hyperelliptic curve.
    pub fn from_exact(system: &DifferentialSystem) -> Result<Self> {
        let h = match system.curve() {
            Curve::Hyperelliptic(h) if h.is_odd_degree() => h,
            Curve::Hyperelliptic(_) => {
                return Err(Error::Unsupported(
                    "an odd-degree hyperelliptic model for monodromy".into(),
                ))
            }
            Curve::Quartic(_) => return Err(Error::Unsupported("a hyperelliptic curve for monodromy".into())),
        };
        if !system.lie().is_sl2() {
            return Err(Error::Unsupported("the sl2 algebra for monodromy".into()));
        }
        let basis = sl2_matrices().map(|m| m.to_float());
        let coeffs = system.coefficients();
        let b = (0..coeffs.cols())
            .map(|i| {
                let mut m = Mat2::zeros();
                for (j, e) in basis.iter().enumerate() {
                    let c = coeffs.get(j, i).to_complex();
                    m += Mat2::from_fn(|r, s| e.get(r, s)) * c;
                }
                m
            })
            .collect();
        NumericSystem::new(h.branch_points_f64(), b)
    }

    /// Coefficients given as (H, E, F) components of each `b[i]`.
    pub fn from_sl2_components(branch_points: Vec<Complex64>, components: &[[Complex64; 3]]) -> Result<Self> {
        let b = components.iter().map(|&[h, e, f]| Mat2::new(h, e, f, -h)).collect();
        NumericSystem::new(branch_points, b)
    }

    pub fn genus(&self) -> usize {
        self.b.len()
    }

    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    pub fn coefficient_matrices(&self) -> &[Mat2] {
        &self.b
    }

    /// (H, E, F) components of each coefficient matrix.
    pub fn sl2_components(&self) -> Vec<[Complex64; 3]> {
        self.b.iter().map(|m| [m[(0, 0)], m[(0, 1)], m[(1, 0)]]).collect()
    }

    pub fn f(&self, x: Complex64) -> Complex64 {
        self.branch_points.iter().map(|l| x - l).product()
    }

    /// `sum_i b[i] x^i / y`
    pub fn connection(&self, x: Complex64, y: Complex64) -> Mat2 {
        let mut acc = Mat2::zeros();
        let mut p = Complex64::new(1.0, 0.0);
        for m in &self.b {
            acc += m * p;
            p *= x;
        }
        acc / y
    }

    /// Every `b[i]` replaced by `s b[i] s^-1`.
    pub fn conjugated(&self, s: &Mat2) -> Result<Self> {
        let inv = s.try_inverse().ok_or_else(|| Error::Parameter {
            name: "conjugator",
            reason: "singular".into(),
        })?;
        Ok(NumericSystem {
            branch_points: self.branch_points.clone(),
            b: self.b.iter().map(|m| s * m * inv).collect(),
        })
    }
}

/// Root of `f(x)` nearest to `y_ref`.
pub fn nearest_root(f: Complex64, y_ref: Complex64) -> Complex64 {
    let s = f.sqrt();
    if (s - y_ref).norm() <= (s + y_ref).norm() {
        s
    } else {
        -s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Target local error, absolute and relative.
    pub ode_tol: f64,
    /// Smallest step in the per-segment parameter `t in [0, 1]`.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            ode_tol: 1e-12,
            min_step: 1e-13,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(ode_tol: f64) -> Self {
        IntegratorOptions {
            ode_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ode_tol > 0.0 && self.ode_tol < 1.0) {
            return Err(Error::Parameter {
                name: "ode_tol",
                reason: format!("{} is not in (0, 1)", self.ode_tol),
            });
        }
        if self.min_step.is_nan() || self.min_step <= 0.0 {
            return Err(Error::Parameter {
                name: "min_step",
                reason: format!("{} is not positive", self.min_step),
            });
        }
        Ok(())
    }
}

/// Accepted step endpoints per segment, in the segment parameter `t`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub segments: Vec<Vec<f64>>,
}

impl Mesh {
    pub fn steps(&self) -> usize {
        self.segments.iter().map(|s| s.len().saturating_sub(1)).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathTransport {
    /// Fundamental solution at the end of the path, identity at the start.
    pub transport: Mat2,
    pub end_sheet: Complex64,
    pub mesh: Mesh,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;

struct Segment {
    start: Complex64,
    delta: Complex64,
}

enum Step {
    Done { y: Mat2, sheet: Complex64, diff: Mat2 },
    SheetGuard,
}

fn dp_step(sys: &NumericSystem, seg: &Segment, t: f64, h: f64, y: &Mat2, sheet: Complex64) -> Result<Step> {
    let mut k = [Mat2::zeros(); 7];
    let mut end_sheet = sheet;
    for s in 0..7 {
        let mut ys = *y;
        for (j, a) in A[s].iter().enumerate().take(s) {
            if *a != 0.0 {
                ys += k[j] * Complex64::new(a * h, 0.0);
            }
        }
        let x = seg.start + seg.delta * (t + C[s] * h);
        let ysheet = nearest_root(sys.f(x), sheet);
        if (ysheet - sheet).norm() >= sheet.norm() {
            return Ok(Step::SheetGuard);
        }
        if s == 6 {
            end_sheet = ysheet;
        }
        k[s] = sys.connection(x, ysheet) * ys * seg.delta;
    }
    let mut y5 = *y;
    let mut diff = Mat2::zeros();
    for s in 0..7 {
        y5 += k[s] * Complex64::new(B5[s] * h, 0.0);
        diff += k[s] * Complex64::new((B5[s] - B4[s]) * h, 0.0);
    }
    if !y5.iter().all(|z| z.is_finite()) {
        let x = seg.start + seg.delta * (t + h);
        return Err(Error::NonFinite { x: format!("{x}") });
    }
    Ok(Step::Done {
        y: y5,
        sheet: end_sheet,
        diff,
    })
}

fn scaled_error(y_old: &Mat2, y_new: &Mat2, tol: f64, raw: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        let scale = tol * (1.0 + y_old[i].norm().max(y_new[i].norm()));
        worst = worst.max(raw[i].norm() / scale);
    }
    worst
}

/// Transport along a polyline starting on the sheet nearest `start_sheet`.
///
/// With `replay = Some(mesh)` the steps of `mesh` are taken verbatim with no
/// error control; otherwise steps adapt to `opts.ode_tol` and the mesh used is returned.
pub fn transport_along(
    sys: &NumericSystem,
    path: &[Complex64],
    start_sheet: Complex64,
    opts: &IntegratorOptions,
    replay: Option<&Mesh>,
) -> Result<PathTransport> {
    opts.validate()?;
    let mut y = Mat2::identity();
    let mut sheet = nearest_root(sys.f(path[0]), start_sheet);
    let mut mesh = Mesh::default();
    let mut h_prev = 0.05;
    let mut len_prev = 0.0;
    let mut total_steps = 0usize;
    let mut seg_index = 0;
    for w in path.windows(2) {
        let seg = Segment {
            start: w[0],
            delta: w[1] - w[0],
        };
        let len = seg.delta.norm();
        if len == 0.0 {
            continue;
        }
        match replay {
            Some(m) => {
                let ts = m.segments.get(seg_index).ok_or_else(|| Error::LengthMismatch {
                    expected: seg_index + 1,
                    got: m.segments.len(),
                })?;
                for pair in ts.windows(2) {
                    match dp_step(sys, &seg, pair[0], pair[1] - pair[0], &y, sheet)? {
                        Step::Done { y: yn, sheet: sn, .. } => {
                            y = yn;
                            sheet = sn;
                        }
                        Step::SheetGuard => {
                            let x = seg.start + seg.delta * pair[1];
                            return Err(Error::SheetJump { x: format!("{x}") });
                        }
                    }
                }
            }
            None => {
                let mut ts = vec![0.0];
                let mut t = 0.0;
                let mut h = if len_prev > 0.0 {
                    (h_prev * len_prev / len).min(1.0)
                } else {
                    0.05
                };
                let mut err_prev: f64 = 1e-4;
                let mut rejected = false;
                while t < 1.0 {
                    if total_steps >= opts.max_steps {
                        let x = seg.start + seg.delta * t;
                        return Err(Error::StepUnderflow {
                            x: format!("{x} (step budget exhausted)"),
                        });
                    }
                    if h < opts.min_step {
                        let x = seg.start + seg.delta * t;
                        return Err(Error::StepUnderflow { x: format!("{x}") });
                    }
                    let last = t + h >= 1.0 - 1e-14;
                    let step = if last { 1.0 - t } else { h };
                    total_steps += 1;
                    match dp_step(sys, &seg, t, step, &y, sheet)? {
                        Step::SheetGuard => {
                            h *= 0.25;
                            rejected = true;
                        }
                        Step::Done { y: yn, sheet: sn, diff } => {
                            let err = scaled_error(&y, &yn, opts.ode_tol, &diff);
                            if err <= 1.0 {
                                t = if last { 1.0 } else { t + step };
                                ts.push(t);
                                y = yn;
                                sheet = sn;
                                let mut fac = SAFETY * err.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
                                fac = fac.clamp(FAC_MIN, FAC_MAX);
                                if rejected {
                                    fac = fac.min(1.0);
                                }
                                h = step.max(h) * fac;
                                err_prev = err.max(1e-4);
                                rejected = false;
                            } else {
                                h = step * (SAFETY * err.powf(-PI_ALPHA)).max(FAC_MIN);
                                rejected = true;
                            }
                        }
                    }
                }
                h_prev = h;
                len_prev = len;
                mesh.segments.push(ts);
            }
        }
        seg_index += 1;
    }
    if let Some(m) = replay {
        mesh = m.clone();
    }
    Ok(PathTransport {
        transport: y,
        end_sheet: sheet,
        mesh,
    })
}
