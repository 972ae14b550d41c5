//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's elimination, product, basis-expression or
//! integration code; curves and loops are only read for their raw data.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhlab::curves::{Curve, HyperellipticCurve, Poly};
use rhlab::field::{numeric_rank, ExactMatrix, ExactScalar, FloatMatrix};
use rhlab::monodromy::Loop;

/// Plain Gauss-Jordan elimination over Q(i) with division.
pub fn naive_rank(m: &ExactMatrix) -> usize {
    let mut a: Vec<Vec<ExactScalar>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][col].inv().unwrap();
        let pivot: Vec<ExactScalar> = a[rank].iter().map(|v| v * &inv).collect();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &(&factor * y);
                }
            }
        }
        a[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Coefficients of a univariate polynomial in x, lowest degree first.
pub fn x_coefficients(p: &Poly) -> Vec<ExactScalar> {
    let deg = p.degree().unwrap_or(0) as usize;
    let mut c = vec![ExactScalar::zero(); deg + 1];
    for (m, v) in p.terms() {
        assert_eq!((m[1], m[2]), (0, 0), "univariate numerator expected");
        c[m[0] as usize] = v.clone();
    }
    c
}

/// Multiplicity of `root` as a zero of the polynomial, by repeated synthetic division.
pub fn root_multiplicity(coeffs: &[ExactScalar], root: &ExactScalar) -> usize {
    let mut c: Vec<ExactScalar> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    if c.iter().all(ExactScalar::is_zero) {
        return usize::MAX;
    }
    let mut mult = 0;
    loop {
        let n = c.len();
        if n < 2 {
            return mult;
        }
        let mut q = vec![ExactScalar::zero(); n - 1];
        let mut acc = ExactScalar::zero();
        for k in (0..n).rev() {
            acc = &(&acc * root) + &c[k];
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        if !acc.is_zero() {
            return mult;
        }
        mult += 1;
        c = q;
    }
}

/// Orders of vanishing of `p(x) dx / y` at every branch point and at the
/// point(s) over infinity, from local parameters: at a finite branch point
/// `t^2 = x - lambda`, so `ord x-lambda = 2`, `ord y = 1`, `ord dx = 1`; over
/// infinity `x = t^-2`, `y ~ t^-deg` for odd degree, and `x = 1/t`,
/// `y ~ t^-(deg/2)` on each of the two points for even degree.
pub fn holomorphy_orders(curve: &HyperellipticCurve, numerator: &Poly) -> Vec<i64> {
    let c = x_coefficients(numerator);
    let deg_p = numerator.degree().map(|d| d as i64).unwrap_or(0);
    let mut orders: Vec<i64> = curve
        .branch_points()
        .iter()
        .map(|l| {
            let m = root_multiplicity(&c, l) as i64;
            2 * m + 1 - 1
        })
        .collect();
    let n = curve.branch_points().len() as i64;
    if n % 2 == 1 {
        let (ord_x, ord_y, ord_dx) = (-2, -n, -3);
        orders.push(ord_x * deg_p + ord_dx - ord_y);
    } else {
        let (ord_x, ord_y, ord_dx) = (-1, -n / 2, -2);
        orders.extend([ord_x * deg_p + ord_dx - ord_y; 2]);
    }
    orders
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.6..1.4), rng.random_range(0.0..std::f64::consts::TAU))
}

/// Roots of `c[0] + c[1] y + ... ` by Durand-Kerner iteration.
pub fn polynomial_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|v| v.norm() < 1e-300) {
        c.pop();
    }
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + k);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powi(k as i32)).collect();
    for _ in 0..500 {
        let prev = roots.clone();
        for i in 0..n {
            let denom: Complex64 = (0..n).filter(|&j| j != i).map(|j| roots[i] - roots[j]).product();
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        if roots
            .iter()
            .zip(&prev)
            .all(|(a, b)| (a - b).norm() < 1e-15 * (1.0 + a.norm()))
        {
            break;
        }
    }
    roots
}

/// Numeric rank of the multiplication map restricted to the span of `w`
/// (coordinates in the weight-1 basis), by evaluating every product at
/// `3g - 3` random points of the curve and interpolating onto the
/// quadratic-differential basis there.
pub fn theta_rank_by_evaluation(curve: &Curve, w: &[Vec<ExactScalar>], rel_tol: f64, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = curve.genus();
    let n = 3 * g - 3;
    // values of the weight-1 numerators, the quadratic basis and the common factor at each point
    let mut omega_vals: Vec<Vec<Complex64>> = Vec::new();
    let mut basis_vals: Vec<Vec<Complex64>> = Vec::new();
    let mut scale: Vec<Complex64> = Vec::new();
    match curve {
        Curve::Hyperelliptic(h) => {
            let pts = h.branch_points_f64();
            for _ in 0..n {
                let x = random_point(&mut rng);
                let y = pts.iter().map(|l| x - l).product::<Complex64>().sqrt();
                omega_vals.push((0..g).map(|i| x.powu(i as u32)).collect());
                let mut b: Vec<Complex64> = (0..=2 * g - 2).map(|i| x.powu(i as u32) / (y * y)).collect();
                b.extend((0..g.saturating_sub(2)).map(|j| x.powu(j as u32) / y));
                basis_vals.push(b);
                scale.push(1.0 / (y * y));
            }
        }
        Curve::Quartic(q) => {
            let form = q.form();
            for _ in 0..n {
                let x = random_point(&mut rng);
                let mut c = vec![Complex64::new(0.0, 0.0); 5];
                for (m, v) in form.terms() {
                    c[m[1] as usize] += v.to_complex() * x.powu(m[0]);
                }
                let y = polynomial_roots(&c)[0];
                omega_vals.push(vec![x, y, Complex64::new(1.0, 0.0)]);
                basis_vals.push(vec![x * x, y * y, 1.0.into(), x * y, x, y]);
                scale.push(1.0.into());
            }
        }
    }
    let wf: Vec<Vec<Complex64>> = w
        .iter()
        .map(|v| v.iter().map(ExactScalar::to_complex).collect())
        .collect();
    let cols = g * w.len();
    let e = DMatrix::from_fn(n, cols, |k, c| {
        let (i, j) = (c / w.len(), c % w.len());
        let wj: Complex64 = wf[j].iter().zip(&omega_vals[k]).map(|(a, b)| a * b).sum();
        omega_vals[k][i] * wj * scale[k]
    });
    let b = DMatrix::from_fn(n, n, |k, m| basis_vals[k][m]);
    let coords = b.lu().solve(&e).expect("sample points in general position");
    let m = FloatMatrix::from_fn(n, cols, |i, j| coords[(i, j)]).unwrap();
    numeric_rank(&m, rel_tol).unwrap().rank
}

fn nearest(f: Complex64, near: Complex64) -> Complex64 {
    let r = f.sqrt();
    if (r - near).norm() <= (r + near).norm() {
        r
    } else {
        -r
    }
}

/// Integral of `q(x) dx / y` along a loop, `y` continued from the loop's
/// recorded start value, by adaptive Simpson quadrature on short pieces.
pub fn loop_period(points: &[Complex64], lp: &Loop, q: &[Complex64], tol: f64) -> Complex64 {
    let f = |x: Complex64| points.iter().map(|l| x - l).product::<Complex64>();
    let qx = |x: Complex64| q.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
    let dist = |x: Complex64| points.iter().map(|l| (x - l).norm()).fold(f64::INFINITY, f64::min);
    let mut y = lp.sheets[0];
    let mut total = Complex64::new(0.0, 0.0);
    for w in lp.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let mut t = 0.0;
        while t < 1.0 {
            let x0 = a + (b - a) * t;
            let t1 = (t + 0.02 * dist(x0) / len).min(1.0);
            let x1 = a + (b - a) * t1;
            let d = x1 - x0;
            let integrand = |s: f64, yref: Complex64| -> (Complex64, Complex64) {
                let x = x0 + d * s;
                let yy = nearest(f(x), yref);
                (qx(x) / yy * d, yy)
            };
            let (fa, ya) = integrand(0.0, y);
            let (fm, ym) = integrand(0.5, ya);
            let (fb, yb) = integrand(1.0, ym);
            total += simpson(&integrand, 0.0, 1.0, fa, fm, fb, ya, ym, tol, 40);
            y = yb;
            t = t1;
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64, Complex64) -> (Complex64, Complex64),
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    ya: Complex64,
    ym: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (fl, yl) = f(0.5 * (a + m), ya);
    let (fr, yr) = f(0.5 * (m + b), ym);
    let whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    let left = (fa + 4.0 * fl + fm) * ((m - a) / 6.0);
    let right = (fm + 4.0 * fr + fb) * ((b - m) / 6.0);
    let err = left + right - whole;
    if depth == 0 || err.norm() < 15.0 * tol {
        return left + right + err / 15.0;
    }
    simpson(f, a, m, fa, fl, fm, ya, yl, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, fr, fb, ym, yr, tol / 2.0, depth - 1)
}

/// `max |a - b| / max(1, |a|)` over paired values.
pub fn max_relative_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / x.norm().max(1.0))
        .fold(0.0, f64::max)
}
