use proptest::prelude::*;
use rhlab::curves::{Curve, PlaneQuartic};
use rhlab::field::{ExactMatrix, ExactScalar};
use rhlab::multiplication::criterion_injective;
use rhlab::systems::{
    contract, dimension_report, dyad_detect, sample_system, sl2_matrices, DifferentialSystem, LieAlgebraData,
};
use rhlab::Error;

fn ints(v: &[i64]) -> Vec<ExactScalar> {
    v.iter().map(|&x| ExactScalar::from_int(x)).collect()
}

fn g2() -> Curve {
    Curve::hyperelliptic(&[0, 1, 2, 3, 4]).unwrap()
}

fn g3() -> Curve {
    Curve::hyperelliptic(&[0, 1, 2, 3, 4, 5, 6]).unwrap()
}

#[test]
fn builtin_tables_are_lie_algebras() {
    for lie in [LieAlgebraData::sl2(), LieAlgebraData::gl2(), LieAlgebraData::sl3()] {
        let n = lie.dimension();
        let e = |k: usize| {
            (0..n)
                .map(|i| ExactScalar::from_int((i == k) as i64))
                .collect::<Vec<_>>()
        };
        for i in 0..n {
            for j in 0..n {
                let a = lie.bracket(&e(i), &e(j));
                let b: Vec<ExactScalar> = lie.bracket(&e(j), &e(i)).iter().map(|v| -v).collect();
                assert_eq!(a, b);
                for k in 0..n {
                    let t1 = lie.bracket(&e(i), &lie.bracket(&e(j), &e(k)));
                    let t2 = lie.bracket(&e(j), &lie.bracket(&e(k), &e(i)));
                    let t3 = lie.bracket(&e(k), &lie.bracket(&e(i), &e(j)));
                    assert!((0..n).all(|r| (&(&t1[r] + &t2[r]) + &t3[r]).is_zero()));
                }
            }
        }
        assert_eq!(lie.derived_dimension() + lie.center_dimension(), n);
    }
}

#[test]
fn bad_tables_rejected() {
    let mut c = LieAlgebraData::sl2().structure_constants().to_vec();
    // break antisymmetry of [H, E]
    c[1] = ExactScalar::from_int(3);
    assert!(matches!(
        LieAlgebraData::from_table("broken", 3, c),
        Err(Error::LieAlgebra(_))
    ));
    // a Heisenberg table is not reductive
    let mut h = vec![ExactScalar::zero(); 27];
    // [e0, e1] = e2 at index (i * 3 + j) * 3 + k
    h[5] = ExactScalar::one();
    h[11] = -ExactScalar::one();
    assert!(LieAlgebraData::from_table("heisenberg", 3, h).is_err());
    let from_mats = LieAlgebraData::from_matrices("sl2-again", &sl2_matrices()).unwrap();
    assert_eq!(
        from_mats.structure_constants(),
        LieAlgebraData::sl2().structure_constants()
    );
}

#[test]
fn dimension_examples() {
    let r = dimension_report(2, &LieAlgebraData::sl2()).unwrap();
    assert_eq!((r.dim_character_variety, r.dim_syst), (6, 6));
    let r = dimension_report(3, &LieAlgebraData::sl2()).unwrap();
    assert_eq!((r.dim_character_variety, r.dim_syst), (12, 12));
    let r = dimension_report(2, &LieAlgebraData::gl2()).unwrap();
    assert_eq!((r.dim_character_variety, r.dim_syst), (10, 8));
    assert!(matches!(
        dimension_report(1, &LieAlgebraData::sl2()),
        Err(Error::GenusTooSmall(1))
    ));
}

#[test]
fn dimension_identity_over_range() {
    for lie in [LieAlgebraData::sl2(), LieAlgebraData::gl2(), LieAlgebraData::sl3()] {
        for g in 2..=10 {
            let r = dimension_report(g, &lie).unwrap();
            let (d, c) = (r.d, r.c);
            assert_eq!(r.dim_character_variety, 2 * (g - 1) * d + 2 * g * c);
            assert_eq!(r.dim_syst, (g - 1) * (d + 3) + g * c);
            assert_eq!(r.dim_syst + d, 3 * g - 3 + g * lie.dimension());
        }
    }
}

#[test]
fn contraction_examples() {
    let sl2 = LieAlgebraData::sl2();
    let s =
        DifferentialSystem::from_integers(g3(), sl2.clone(), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    assert_eq!(contract(&s, &ints(&[0, 1, 0])).unwrap(), ints(&[0, 1, 0]));
    assert_eq!(contract(&s, &ints(&[0, 0, 0])).unwrap(), ints(&[0, 0, 0]));
    let d = DifferentialSystem::dyad(g3(), sl2, &ints(&[2, -1, 3]), &ints(&[1, 4, -2])).unwrap();
    // h(B) = 5*2 + 1*(-1) + 0*3 = 9
    assert_eq!(contract(&d, &ints(&[5, 1, 0])).unwrap(), ints(&[9, 36, -18]));
    assert!(matches!(
        contract(&d, &ints(&[1, 1])),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn dyad_detection() {
    let sl2 = LieAlgebraData::sl2();
    let d = DifferentialSystem::dyad(g2(), sl2.clone(), &ints(&[1, 1, 0]), &ints(&[2, 1])).unwrap();
    assert!(dyad_detect(&d).is_dyad);
    assert!(dyad_detect(&d).rank_of_coefficients <= 1);
    let z = DifferentialSystem::zero(g2(), sl2.clone());
    assert_eq!(
        (dyad_detect(&z).is_dyad, dyad_detect(&z).rank_of_coefficients),
        (true, 0)
    );
    let s = DifferentialSystem::from_integers(g2(), sl2, &[vec![1, 0], vec![0, 1], vec![0, 0]]).unwrap();
    assert_eq!(
        (dyad_detect(&s).is_dyad, dyad_detect(&s).rank_of_coefficients),
        (false, 2)
    );
}

#[test]
fn span_dimension_tracks_coefficient_rank() {
    let sl3 = LieAlgebraData::sl3();
    for seed in 0..20 {
        let s = sample_system(&g3(), &sl3, seed, 1);
        let v = criterion_injective(s.curve(), &s).unwrap();
        assert_eq!(v.v_dimension, dyad_detect(&s).rank_of_coefficients.min(3));
        assert_eq!(s.omega_span().len(), v.v_dimension);
    }
}

#[test]
fn sampling() {
    let sl2 = LieAlgebraData::sl2();
    assert_eq!(sample_system(&g2(), &sl2, 4, 5), sample_system(&g2(), &sl2, 4, 5));
    assert!(sample_system(&g2(), &sl2, 4, 0).coefficients().is_zero());
    let draws: Vec<_> = (0..100).map(|s| sample_system(&g2(), &sl2, s, 5)).collect();
    let collisions = (0..99).filter(|&k| draws[k] == draws[k + 1]).count();
    assert_eq!(collisions, 0);
    let s = sample_system(&g2(), &sl2, 4, 5);
    assert!(s
        .coefficients()
        .entries()
        .iter()
        .all(|v| v.is_real() && v.re.numer().magnitude() <= &5u32.into()));
}

#[test]
fn shape_mismatch_rejected() {
    let m = ExactMatrix::zeros(3, 3);
    assert!(matches!(
        DifferentialSystem::new(g2(), LieAlgebraData::sl2(), m),
        Err(Error::Shape { .. })
    ));
}

#[test]
fn system_json_round_trip() {
    let s = sample_system(&PlaneQuartic::fermat().into(), &LieAlgebraData::gl2(), 8, 3);
    let text = serde_json::to_string(&s).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["algebra"], "gl2");
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 4);
    assert_eq!(serde_json::from_str::<DifferentialSystem>(&text).unwrap(), s);
}

#[test]
fn exact_conjugation_keeps_the_span() {
    let sl2 = LieAlgebraData::sl2();
    let s = sample_system(&g2(), &sl2, 12, 3);
    let u = ExactMatrix::from_rows(&[ints(&[2, 1]), ints(&[1, 1])]).unwrap();
    let c = s.conjugated_sl2(&u).unwrap();
    assert_eq!(
        dyad_detect(&c).rank_of_coefficients,
        dyad_detect(&s).rank_of_coefficients
    );
    assert_eq!(
        criterion_injective(&g2(), &c).unwrap().holds(),
        criterion_injective(&g2(), &s).unwrap().holds()
    );
}

proptest! {
    #[test]
    fn contract_is_linear(seed in 0u64..500, a in -7i64..=7, b in -7i64..=7,
                          h in proptest::collection::vec(-9i64..=9, 3), k in proptest::collection::vec(-9i64..=9, 3)) {
        let s = sample_system(&g3(), &LieAlgebraData::sl2(), seed, 5);
        let (sa, sb) = (ExactScalar::from_int(a), ExactScalar::from_int(b));
        let combo: Vec<ExactScalar> = h.iter().zip(&k).map(|(x, y)| ExactScalar::from_int(a * x + b * y)).collect();
        let lhs = contract(&s, &combo).unwrap();
        let ch = contract(&s, &ints(&h)).unwrap();
        let ck = contract(&s, &ints(&k)).unwrap();
        let rhs: Vec<ExactScalar> = ch.iter().zip(&ck).map(|(x, y)| &(&sa * x) + &(&sb * y)).collect();
        prop_assert_eq!(lhs, rhs);
    }
}
