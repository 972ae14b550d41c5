mod common;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhlab::curves::Curve;
use rhlab::field::ExactMatrix;
use rhlab::monodromy::{
    build_loops, integrate_loop, irreducibility_probe, monodromy, trace_vector, track_sheets, word_list,
    Irreducibility, Loop, LoopSystem, Mat2, MonodromyOptions, MonodromyRepresentation,
};
use rhlab::systems::{sample_system, DifferentialSystem, LieAlgebraData};
use rhlab::Error;

const CLEARANCE: f64 = 0.25;
const TOL: f64 = 1e-12;

fn curve() -> Curve {
    Curve::hyperelliptic(&[0, 1, -6, 6, 12]).unwrap()
}

fn loops(c: &Curve) -> LoopSystem {
    build_loops(c.as_hyperelliptic().unwrap(), CLEARANCE).unwrap()
}

fn system(seed: u64) -> DifferentialSystem {
    sample_system(&curve(), &LieAlgebraData::sl2(), seed, 2)
}

fn max_entry_gap(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn reversed(lp: &Loop) -> Loop {
    Loop {
        label: format!("{}^-1", lp.label),
        lassos: vec![],
        vertices: lp.vertices.iter().rev().copied().collect(),
        sheets: lp.sheets.iter().rev().copied().collect(),
    }
}

fn reshaped(ls: &LoopSystem, points: &[Complex64], vertices: impl Fn(&Loop) -> Vec<Complex64>) -> LoopSystem {
    let mut out = ls.clone();
    for lp in &mut out.loops {
        lp.vertices = vertices(lp);
        lp.sheets = track_sheets(points, &lp.vertices, ls.base_sheet);
    }
    out
}

#[test]
fn zero_system_has_trivial_monodromy() {
    let c = curve();
    let rep = monodromy(
        &c,
        &DifferentialSystem::zero(c.clone(), LieAlgebraData::sl2()),
        &loops(&c),
        TOL,
    )
    .unwrap();
    for m in &rep.matrices {
        assert!(max_entry_gap(m, &Mat2::identity()) < 1e-14);
    }
    assert_eq!(rep.relation_residual, 0.0);
    let tv = trace_vector(&rep).unwrap();
    assert!(tv.values.iter().all(|t| (t - 2.0).norm() < 1e-14));
    assert_eq!(
        irreducibility_probe(&rep).verdict,
        Irreducibility::CommonEigenvectorFound
    );
}

#[test]
fn determinant_and_relation() {
    let c = curve();
    let ls = loops(&c);
    for seed in 0..6 {
        let rep = monodromy(&c, &system(seed), &ls, TOL).unwrap();
        assert!(
            rep.det_residuals.iter().all(|&d| d <= 1e-10),
            "seed {seed}: {:?}",
            rep.det_residuals
        );
        assert!(rep.relation_residual <= 1e-8, "seed {seed}: {}", rep.relation_residual);
        assert!(rep.valid);
        assert_eq!(trace_vector(&rep).unwrap().values.len(), word_list(2).len());
    }
}

#[test]
fn reverse_loop_gives_inverse() {
    let c = curve();
    let ls = loops(&c);
    let s = system(3);
    for lp in &ls.loops {
        let m = integrate_loop(&c, &s, lp, TOL).unwrap();
        let r = integrate_loop(&c, &s, &reversed(lp), TOL).unwrap();
        let gap = max_entry_gap(&(r * m), &Mat2::identity());
        assert!(gap <= 1e-9, "{}: {gap:.3e}", lp.label);
    }
}

#[test]
fn homotopy_invariance() {
    let c = curve();
    let pts = c.as_hyperelliptic().unwrap().branch_points_f64();
    let ls = loops(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let jitter: Vec<Vec<Complex64>> = ls
        .loops
        .iter()
        .map(|lp| {
            (0..lp.vertices.len())
                .map(|_| Complex64::from_polar(rng.random_range(0.0..0.099 * CLEARANCE), rng.random_range(0.0..6.3)))
                .collect()
        })
        .collect();
    let moved = reshaped(&ls, &pts, |lp| {
        let k = ls.loops.iter().position(|l| l.label == lp.label).unwrap();
        let n = lp.vertices.len();
        lp.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 || i == n - 1 { *v } else { v + jitter[k][i] })
            .collect()
    });
    let refined = reshaped(&ls, &pts, |lp| {
        let mut v = vec![lp.vertices[0]];
        for w in lp.vertices.windows(2) {
            v.push(0.5 * (w[0] + w[1]));
            v.push(w[1]);
        }
        v
    });
    for seed in [1, 4] {
        let s = system(seed);
        let base = monodromy(&c, &s, &ls, TOL).unwrap();
        for other in [&moved, &refined] {
            let rep = monodromy(&c, &s, other, TOL).unwrap();
            for (a, b) in base.matrices.iter().zip(&rep.matrices) {
                let gap = max_entry_gap(a, b);
                assert!(gap <= 1e-7, "seed {seed}: {gap:.3e}");
            }
        }
    }
}

fn conjugated(s: &DifferentialSystem) -> DifferentialSystem {
    let u = ExactMatrix::from_rows(&[vec![2.into(), 1.into()], vec![1.into(), 1.into()]]).unwrap();
    s.conjugated_sl2(&u).unwrap()
}

#[test]
fn gauge_conjugation_preserves_traces() {
    let c = curve();
    let ls = loops(&c);
    for seed in [0, 2, 5] {
        let s = system(seed);
        let a = monodromy(&c, &s, &ls, TOL).unwrap();
        let b = monodromy(&c, &conjugated(&s), &ls, TOL).unwrap();
        let ta = trace_vector(&a).unwrap().values;
        let tb = trace_vector(&b).unwrap().values;
        let abs = ta.iter().zip(&tb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(abs <= 1e-8, "seed {seed}: {abs:.3e}");
        // the matrices themselves are conjugated by the same S
        let s_mat = Mat2::new(2.0.into(), 1.0.into(), 1.0.into(), 1.0.into());
        let s_inv = s_mat.try_inverse().unwrap();
        for (x, y) in a.matrices.iter().zip(&b.matrices) {
            let expected = s_mat * x * s_inv;
            assert!(max_entry_gap(&expected, y) <= 1e-8 * (1.0 + x.norm()));
        }
    }
}

fn abelian(seed: u64) -> DifferentialSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h: Vec<i64> = (0..2).map(|_| rng.random_range(-2..=2)).collect();
    DifferentialSystem::from_integers(curve(), LieAlgebraData::sl2(), &[h, vec![0, 0], vec![0, 0]]).unwrap()
}

#[test]
fn abelian_case_matches_period_quadrature() {
    let c = curve();
    let pts = c.as_hyperelliptic().unwrap().branch_points_f64();
    let ls = loops(&c);
    for seed in 0..4 {
        let s = abelian(seed);
        let q: Vec<Complex64> = s.coefficients().row(0).iter().map(|v| v.to_complex()).collect();
        let periods: Vec<Complex64> = ls
            .loops
            .iter()
            .map(|lp| common::loop_period(&pts, lp, &q, 1e-14))
            .collect();
        for (lp, p) in ls.loops.iter().zip(&periods) {
            let m = integrate_loop(&c, &s, lp, TOL).unwrap();
            // the diagonal entries carry exp(+-period), so their ratios measure the period error directly
            let period_gap = (m[(0, 0)] / p.exp() - 1.0)
                .norm()
                .max((m[(1, 1)] * p.exp() - 1.0).norm());
            assert!(period_gap <= 1e-8, "seed {seed} {}: {period_gap:.3e}", lp.label);
            assert!(m[(0, 1)].norm().max(m[(1, 0)].norm()) <= 1e-12);
        }
        let rep = monodromy(&c, &s, &ls, TOL).unwrap();
        let tv = trace_vector(&rep).unwrap();
        let expected: Vec<Complex64> = word_list(2)
            .iter()
            .map(|w| 2.0 * w.0.iter().map(|&l| periods[l]).sum::<Complex64>().cosh())
            .collect();
        let gap = expected
            .iter()
            .zip(&tv.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-8, "seed {seed}: {gap:.3e}");
    }
}

#[test]
fn trace_examples() {
    let id = MonodromyRepresentation::from_matrices(vec![Mat2::identity(); 4], &MonodromyOptions::default());
    assert!(trace_vector(&id)
        .unwrap()
        .values
        .iter()
        .all(|t| (t - 2.0).norm() < 1e-15));
    assert_eq!(
        irreducibility_probe(&id).verdict,
        Irreducibility::CommonEigenvectorFound
    );
    let l = Complex64::new(1.5, 0.25);
    let mut ms = vec![Mat2::identity(); 4];
    ms[0] = Mat2::new(l, 0.0.into(), 0.0.into(), 1.0 / l);
    ms[3] = Mat2::new(1.0 / l, 0.0.into(), 0.0.into(), l);
    let rep = MonodromyRepresentation::from_matrices(ms, &MonodromyOptions::default());
    assert!((trace_vector(&rep).unwrap().values[0] - (l + 1.0 / l)).norm() < 1e-15);
    let upper = |a: f64, b: f64| Mat2::new(a.into(), b.into(), 0.0.into(), (1.0 / a).into());
    let tri = MonodromyRepresentation::from_matrices(
        vec![upper(2.0, 1.0), upper(0.5, 3.0), upper(1.0, 1.0), upper(4.0, -1.0)],
        &MonodromyOptions {
            relation_tol: f64::INFINITY,
            ..Default::default()
        },
    );
    let probe = irreducibility_probe(&tri);
    assert_eq!(probe.verdict, Irreducibility::CommonEigenvectorFound);
    assert!(probe.witness[1].norm() < 1e-12);
}

#[test]
fn generic_systems_probe_irreducible() {
    let c = curve();
    let ls = loops(&c);
    let passing = (0..6)
        .filter(|&seed| irreducibility_probe(&monodromy(&c, &system(seed), &ls, TOL).unwrap()).passes())
        .count();
    assert!(passing >= 5, "{passing}");
}

#[test]
fn input_errors() {
    let c = curve();
    let ls = loops(&c);
    assert!(matches!(
        monodromy(&c, &system(0), &ls, 0.0),
        Err(Error::Parameter { name: "ode_tol", .. })
    ));
    let other = Curve::hyperelliptic(&[0, 2, 4, 6, 8]).unwrap();
    assert!(matches!(
        monodromy(&other, &system(0), &ls, TOL),
        Err(Error::SystemMismatch(_))
    ));
    let gl2 = sample_system(&c, &LieAlgebraData::gl2(), 1, 2);
    assert!(monodromy(&c, &gl2, &ls, TOL).is_err());
}
