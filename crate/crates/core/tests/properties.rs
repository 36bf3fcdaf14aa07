mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use expansive_core::orbits::jsr_bounds;
use expansive_core::rational::ratio;
use expansive_core::solenoid::{
    e_window, enumerate_basis, hom_distance, lift, regular_chain, Approx, DualModuleAction, HomVector,
    SolenoidWindow, DEFAULT_PRECISION,
};
use expansive_core::torus::{orbit_sup_distance, rational_orbit_oracle, TorusPoint};
use expansive_core::{
    char_poly, single_expansive, sturm_root_count, unit_disk_profile, Mode, QMatrix, QPoly, QVector, Rational,
    SemigroupAction,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn matrix(n: usize, range: i64) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-range..=range, n * n).prop_map(move |e| {
        let rows: Vec<&[i64]> = e.chunks(n).collect();
        QMatrix::from_i64(&rows)
    })
}

fn square_matrix(range: i64) -> impl Strategy<Value = QMatrix> {
    (1usize..=4).prop_flat_map(move |n| matrix(n, range))
}

fn unimodular2() -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-3i64..=3, 4)
        .prop_filter("det ±1", |e| (e[0] * e[3] - e[1] * e[2]).abs() == 1)
        .prop_map(|e| QMatrix::from_i64(&[&e[0..2], &e[2..4]]))
}

/// Coefficients of a polynomial with nonzero constant and leading terms.
fn int_poly() -> impl Strategy<Value = Vec<i64>> {
    (1usize..=6).prop_flat_map(|d| {
        (
            prop::collection::vec(-9i64..=9, d - 1),
            (1i64..=9, any::<bool>()),
            (1i64..=9, any::<bool>()),
        )
            .prop_map(|(mid, (c0, s0), (cd, sd))| {
                let mut c = vec![if s0 { c0 } else { -c0 }];
                c.extend(mid);
                c.push(if sd { cd } else { -cd });
                c
            })
    })
}

fn overlaps_mod_one(a: &Approx, b: &Approx) -> bool {
    !a.sub(b).circle_abs().lo().is_positive()
}

fn windows_agree(x: &SolenoidWindow, y: &SolenoidWindow, chars: &[QVector]) -> bool {
    chars
        .iter()
        .all(|c| overlaps_mod_one(x.get(c).unwrap(), y.get(c).unwrap()))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn cayley_hamilton(m in square_matrix(5)) {
        let chi = char_poly(&m).unwrap();
        prop_assert_eq!(chi.degree(), m.rows());
        prop_assert!(chi.eval_matrix(&m).is_zero());
    }

    #[test]
    fn sturm_counts_are_additive(c in int_poly(), a in -40i64..40, w1 in 1i64..40, w2 in 1i64..40) {
        let p = QPoly::from_i64(&c);
        let (lo, mid, hi) = (ratio(a, 4), ratio(a + w1, 4), ratio(a + w1 + w2, 4));
        let whole = sturm_root_count(&p, &lo, &hi).unwrap();
        let parts = sturm_root_count(&p, &lo, &mid).unwrap() + sturm_root_count(&p, &mid, &hi).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn sturm_counts_known_roots(roots in prop::collection::vec(-6i64..=6, 1..6), lo in -7i64..7, w in 1i64..14) {
        let p = roots.iter().fold(QPoly::one(), |acc, r| &acc * &QPoly::from_i64(&[-r, 1]));
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        let want = distinct.iter().filter(|r| **r > lo && **r <= lo + w).count();
        prop_assert_eq!(sturm_root_count(&p, &Rational::from_integer(lo.into()), &Rational::from_integer((lo + w).into())).unwrap(), want);
    }

    #[test]
    fn profile_is_invariant_under_scalars_and_negation(c in int_poly(), k in 1i64..5) {
        let p = QPoly::from_i64(&c);
        let base = unit_disk_profile(&p).unwrap();
        prop_assert_eq!(unit_disk_profile(&p.scale(&Rational::from_integer((-k).into()))).unwrap(), base);
        let flipped: Vec<i64> = c.iter().enumerate().map(|(i, x)| if i % 2 == 1 { -x } else { *x }).collect();
        prop_assert_eq!(unit_disk_profile(&QPoly::from_i64(&flipped)).unwrap(), base);
    }

    #[test]
    fn reversal_swaps_inside_and_outside(c in int_poly()) {
        let p = unit_disk_profile(&QPoly::from_i64(&c)).unwrap();
        let rev: Vec<i64> = c.iter().rev().copied().collect();
        let r = unit_disk_profile(&QPoly::from_i64(&rev)).unwrap();
        prop_assert_eq!((r.inside, r.on_circle, r.outside), (p.outside, p.on_circle, p.inside));
    }

    #[test]
    fn profile_matches_root_oracle(c in int_poly()) {
        let p = unit_disk_profile(&QPoly::from_i64(&c)).unwrap();
        prop_assert_eq!([p.at_zero, p.inside, p.on_circle, p.outside], common::root_profile(&c));
    }

    #[test]
    fn single_verdict_is_conjugation_invariant(m in matrix(3, 3), u in 1i64..3, v in -2i64..=2) {
        let mut p = QMatrix::identity(3);
        p.set(0, 1, Rational::from_integer(u.into()));
        p.set(2, 0, Rational::from_integer(v.into()));
        let conj = &(&p * &m) * &p.inverse().unwrap();
        for mode in [Mode::Semigroup, Mode::Group] {
            prop_assert_eq!(single_expansive(&m, mode), single_expansive(&conj, mode));
        }
    }

    #[test]
    fn reciprocal_split_factors(c in int_poly()) {
        let p = QPoly::from_i64(&c);
        let (g, q) = expansive_core::reciprocal_split(&p).unwrap();
        prop_assert_eq!(&(&g * &q).monic(), &p.monic());
        let circle = unit_disk_profile(&p).unwrap().on_circle;
        prop_assert_eq!(unit_disk_profile(&g).unwrap().on_circle, circle);
        prop_assert_eq!(unit_disk_profile(&q).unwrap().on_circle, 0);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn jsr_bounds_are_ordered_and_monotone(a in matrix(2, 2), b in matrix(2, 2)) {
        let one = SemigroupAction::new(vec![("a".into(), a.clone())], Mode::Semigroup).unwrap();
        let two = SemigroupAction::new(vec![("a".into(), a.clone()), ("b".into(), b)], Mode::Semigroup).unwrap();
        let j1 = jsr_bounds(&one, 4, 1e-3);
        let j2 = jsr_bounds(&two, 4, 1e-3);
        prop_assert!(j1.lower <= j1.upper * (1.0 + 1e-9) + 1e-12);
        prop_assert!(j2.lower <= j2.upper * (1.0 + 1e-9) + 1e-12);
        prop_assert!(j2.lower + 1e-9 >= j1.lower);
        prop_assert!(j2.upper * (1.0 + 1e-9) + 1e-12 >= j1.lower);
        let doubled = SemigroupAction::new(vec![("a".into(), a.scale(&Rational::from_integer(2.into())))], Mode::Semigroup).unwrap();
        let jd = jsr_bounds(&doubled, 4, 1e-3);
        prop_assert!((jd.lower - 2.0 * j1.lower).abs() <= 1e-9 * (1.0 + jd.lower));
    }

    #[test]
    fn torus_oracle_is_sound(m in unimodular2(), q in 2u64..=7) {
        let action = SemigroupAction::new(vec![("g".into(), m)], Mode::Group).unwrap();
        let eps = ratio(1, 4);
        let o = rational_orbit_oracle(&action, q, &eps).unwrap();
        // Independent check: walk every grid point's orbit.
        let mut first_bad = None;
        'grid: for i in 0..q as i64 {
            for j in 0..q as i64 {
                if i == 0 && j == 0 {
                    continue;
                }
                let x = TorusPoint::new(&[ratio(i, q as i64), ratio(j, q as i64)]);
                if orbit_sup_distance(&action, &x, 100_000).unwrap() < eps {
                    first_bad = Some(x);
                    break 'grid;
                }
            }
        }
        prop_assert_eq!(o.separated, first_bad.is_none());
        prop_assert_eq!(o.failing_point, first_bad);
    }
}

fn dyadic() -> DualModuleAction {
    DualModuleAction::new(
        vec![vec![Rational::one()]],
        vec![("x2".into(), QMatrix::from_i64(&[&[2]]))],
        Mode::Group,
    )
    .unwrap()
}

fn z_sixth_chars() -> Vec<QVector> {
    let dm = DualModuleAction::new(
        vec![vec![Rational::one()]],
        vec![("x2".into(), QMatrix::from_i64(&[&[2]])), ("x3".into(), QMatrix::from_i64(&[&[3]]))],
        Mode::Group,
    )
    .unwrap();
    enumerate_basis(&dm, 3).pop().unwrap()
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..1_000_000, 1i64..1000).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn e_is_a_homomorphism(p in small_rational(), q in small_rational()) {
        let chars = z_sixth_chars();
        let hp = HomVector::from_rationals(&[p], DEFAULT_PRECISION);
        let hq = HomVector::from_rationals(&[q], DEFAULT_PRECISION);
        let sum = e_window(&hp.add(&hq), &chars);
        let combined = e_window(&hp, &chars).combine(&e_window(&hq, &chars)).unwrap();
        prop_assert!(windows_agree(&sum, &combined, &chars));
    }

    #[test]
    fn e_is_equivariant(p in small_rational(), gen in 0usize..2) {
        let chars = z_sixth_chars();
        let m = QMatrix::from_i64(&[&[[2, 3][gen]]]);
        let moved: Vec<QVector> = chars.iter().map(|c| m.mul_vec(c)).collect();
        let hp = HomVector::from_rationals(&[p], DEFAULT_PRECISION);
        let lhs = e_window(&hp.pull(&m), &chars);
        let rhs = e_window(&hp, &moved).pullback(&m, &chars).unwrap();
        prop_assert!(windows_agree(&lhs, &rhs, &chars));
    }

    #[test]
    fn hom_distance_is_a_metric(p in small_rational(), q in small_rational(), r in small_rational()) {
        let chars = z_sixth_chars();
        let h = |x: &Rational| HomVector::from_rationals(&[x.clone()], DEFAULT_PRECISION);
        let (hp, hq, hr) = (h(&p), h(&q), h(&r));
        let d = |a: &HomVector, b: &HomVector| hom_distance(a, b, &chars);
        prop_assert!(d(&hp, &hr).lo() <= d(&hp, &hq).hi() + d(&hq, &hr).hi());
        prop_assert!(d(&hp, &hp).contains(&Rational::zero()));
        let (pq, qp) = (d(&hp, &hq), d(&hq, &hp));
        prop_assert!(pq.lo() <= qp.hi() && qp.lo() <= pq.hi());
    }

    #[test]
    fn lift_inverts_e_on_small_functionals(num in -500i64..500, den in 1_000_000i64..2_000_000) {
        let dm = dyadic();
        let chain = regular_chain(&enumerate_basis(&dm, 5), 10).unwrap();
        let c = ratio(3, 10);
        let p = ratio(num, den);
        let w = e_window(&HomVector::from_rationals(&[p.clone()], DEFAULT_PRECISION), chain.characters());
        let l = lift(&w, &chain, &c, DEFAULT_PRECISION).unwrap();
        for ch in chain.characters() {
            prop_assert!(l.value(ch).unwrap().contains(&(&ch[0] * &p)));
        }
    }
}
