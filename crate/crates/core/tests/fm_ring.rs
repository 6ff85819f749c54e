use std::cmp::Ordering;
use std::collections::BTreeSet;

use proptest::prelude::*;
use tautring::algebra::MonomialIndexer;
use tautring::fm::{self, DPart, Family, StandardMonomialFM};
use tautring::poly::build::{a, b, dd, diag};
use tautring::{rat, Generator, Monomial, QPoly, QRing, Rational, Subset};

fn set(v: &[usize]) -> Subset {
    v.iter().copied().collect()
}

fn range(lo: usize, hi: usize) -> Subset {
    (lo..=hi).collect()
}

fn twenty_point_sets() -> Vec<Subset> {
    vec![
        range(1, 8),
        set(&[1, 2, 3]),
        set(&[4, 5, 6]),
        range(9, 20),
        range(9, 18),
        range(9, 12),
        range(13, 16),
    ]
}

#[test]
fn twenty_point_forest() {
    let sets = twenty_point_sets();
    let f = fm::forest_of(&sets).unwrap();
    assert_eq!(f.len(), 7);
    assert_eq!(f.edges().len(), 5);
    let idx = |k: usize| f.index_of(sets[k]).unwrap();
    let roots: BTreeSet<usize> = f.roots().into_iter().collect();
    assert_eq!(roots, [idx(0), idx(3)].into_iter().collect());
    let externals: BTreeSet<usize> = (0..7).filter(|&r| f.is_external(r)).collect();
    assert_eq!(externals, [1, 2, 5, 6].into_iter().map(idx).collect());
    assert_eq!(f.degree(idx(0)), 2);
    assert_eq!(f.degree(idx(4)), 2);
    assert_eq!(f.degree(idx(3)), 1);
    assert_eq!(f.s_set(20), set(&[1, 9]));
}

#[test]
fn twenty_point_dual_follows_the_exponent_formula() {
    let sets = twenty_point_sets();
    let d = DPart::new(sets.iter().map(|&s| (s, 1))).unwrap();
    let v = fm::check_standard(tautring::xn::StandardMonomialXn::one(), d, 20).unwrap();
    let w = fm::dual_fm(&v, 20).unwrap();
    assert_eq!(w.ab().a_set(), set(&[1, 9]));
    let exps: Vec<u32> = sets.iter().map(|&s| w.dpart().exponent(s)).collect();
    // internal: |I| - |children| + deg - 1 - i, external: |I| - 1 - i
    assert_eq!(exps, vec![2, 1, 1, 1, 2, 2, 2]);
    assert_eq!(w.degree(), 13);
    assert_eq!(fm::dual_fm(&w, 20).unwrap(), v);
}

#[test]
fn standardness_of_one_and_two_divisors() {
    for n in 3..=7 {
        for i_set in Subset::divisor_sets(n) {
            for e in 1..=i_set.len() {
                let m = Monomial::from_gens(std::iter::repeat_n(Generator::d(i_set), e));
                assert_eq!(fm::is_standard_fm(&m, n), e + 1 < i_set.len());
            }
            for j_set in Subset::divisor_sets(n) {
                if !i_set.is_proper_subset(j_set) {
                    continue;
                }
                for i in 1..=3 {
                    for j in 1..=4 {
                        let m = Monomial::from_gens(
                            std::iter::repeat_n(Generator::d(i_set), i)
                                .chain(std::iter::repeat_n(Generator::d(j_set), j)),
                        );
                        let expected = j < j_set.len() - i_set.len() && i + 1 < i_set.len();
                        assert_eq!(fm::is_standard_fm(&m, n), expected, "{m}");
                    }
                }
            }
        }
    }
}

#[test]
fn enumeration_matches_brute_force_filter() {
    for n in 1..=4 {
        let gens = fm::fm_generators(n);
        for d in 0..=n {
            let ix = MonomialIndexer::new(gens.len(), d);
            let brute: BTreeSet<String> = ix
                .enumerate()
                .into_iter()
                .map(|im| Monomial::from_gens(im.iter().map(|&k| gens[k as usize])))
                .filter(|m| fm::is_standard_fm(m, n))
                .map(|m| m.to_string())
                .collect();
            let listed: BTreeSet<String> = fm::enumerate_standard_fm(n, d)
                .unwrap()
                .iter()
                .map(|v| v.monomial().to_string())
                .collect();
            assert_eq!(listed, brute, "n={n} d={d}");
        }
    }
}

#[test]
fn x3_examples() {
    let ring = QRing::new(fm::fm_presentation(3).unwrap());
    assert_eq!(ring.hilbert(3).unwrap(), vec![1, 7, 7, 1]);
    let big_d = dd::<Rational>(set(&[1, 2, 3]));
    let v = &(&big_d * &a(1)) * &big_d;
    assert_eq!(ring.socle_eval(&v).unwrap(), rat(-1));
    let lhs = big_d.pow(2);
    let rhs = &(&(&diag(1, 2) + &diag(1, 3)) * &big_d) - &(&diag(1, 2) * &diag(1, 3));
    assert!(ring.reduce(&(&lhs - &rhs), 2).unwrap().is_zero());
    assert_eq!(
        ring.reduce(&(&a(2) * &big_d), 2).unwrap(),
        ring.reduce(&(&a(1) * &big_d), 2).unwrap()
    );
    assert_eq!(fm::fm_family::<Rational>(3, Family::SelfIntersection).len(), 3);
    assert!(fm::fm_family::<Rational>(3, Family::Chern).is_empty());
}

#[test]
fn gorenstein_up_to_four() {
    for n in 1..=4 {
        let ring = QRing::new(fm::fm_presentation(n).unwrap());
        let report = ring.gorenstein_check().unwrap();
        assert!(report.verdict, "X[{n}]: {report:?}");
        let blocks = fm::block_check::<Rational>(n).unwrap();
        assert!(blocks.passed());
        assert_eq!(blocks.hilbert, report.hilbert);
        let cross = fm::engine_cross_check(&ring).unwrap();
        assert!(cross.passed(), "{cross:?}");
        if n >= 3 {
            assert!(cross.triangularity_pairs > 0 && cross.sign_pairs > 0 && cross.filtration_pairs > 0);
        }
    }
}

#[test]
fn blocks_up_to_six() {
    for n in 1..=6 {
        let bc = fm::block_check::<Rational>(n).unwrap();
        assert!(bc.passed(), "n={n}");
        assert_eq!(bc.conditional_on_sign_rule, n > 4);
    }
}

#[test]
fn involution_up_to_six() {
    for n in 1..=6 {
        for d in 0..=n {
            for v in fm::enumerate_standard_fm(n, d).unwrap() {
                let w = fm::dual_fm(&v, n).unwrap();
                assert_eq!(w.degree(), n - d);
                assert!(fm::is_standard_fm(&w.monomial(), n));
                assert_eq!(fm::dual_fm(&w, n).unwrap(), v);
            }
        }
    }
}

#[test]
fn dual_of_d_free_monomials_is_product_dual() {
    for n in 1..=6 {
        for d in 0..=n {
            for v in tautring::xn::enumerate_standard_xn(n, d) {
                let fmv = fm::check_standard(v.clone(), DPart::empty(), n).unwrap();
                assert_eq!(fm::dual_fm(&fmv, n).unwrap().ab(), &tautring::xn::dual_xn(&v, n));
                assert_eq!(fm::filtration_p(&fmv), d);
            }
        }
    }
}

#[test]
fn psi_pullbacks() {
    let p2: QPoly = fm::psi_pullback(2, 1).unwrap();
    assert_eq!(p2, &(&a(1).scale(&rat(3)) + &a(2)) + &b(1, 2));
    let p3: QPoly = fm::psi_pullback(3, 1).unwrap();
    let expected = &(&(&a(1).scale(&rat(2)) + &diag(1, 2)) + &diag(1, 3)) - &dd(set(&[1, 2, 3]));
    assert_eq!(p3, expected);
    assert!(fm::psi_pullback::<Rational>(3, 4).is_err());
}

#[test]
fn socle_is_one_dimensional_with_point_class() {
    for n in 1..=4 {
        let ring = QRing::new(fm::fm_presentation(n).unwrap());
        let top = ring.basis_monomials(n).unwrap();
        assert_eq!(top.len(), 1);
        let points: QPoly = tautring::poly::build::product((1..=n).map(a));
        assert_eq!(ring.socle_eval(&points).unwrap(), rat(1));
    }
}

#[test]
fn subset_order_examples() {
    assert!(set(&[1, 2, 3]) < set(&[1, 2, 4]));
    assert!(set(&[1, 2, 3]) < set(&[1, 2, 3, 4]));
    assert!(!(set(&[1, 2, 3]) < set(&[1, 2, 3])));
    assert!(set(&[1, 4, 5]) < set(&[2, 3, 4]));
}

fn arb_dpart(n: usize) -> impl Strategy<Value = DPart> {
    let sets = Subset::divisor_sets(n);
    prop::collection::vec((prop::sample::select(sets), 1u32..3), 0..4)
        .prop_map(|v| DPart::new(v).unwrap())
}

fn arb_standard(n: usize) -> impl Strategy<Value = StandardMonomialFM> {
    let all: Vec<StandardMonomialFM> = (0..=n)
        .flat_map(|d| fm::enumerate_standard_fm(n, d).unwrap())
        .collect();
    prop::sample::select(all)
}

proptest! {
    #[test]
    fn dpart_order_is_total(x in arb_dpart(6), y in arb_dpart(6), z in arb_dpart(6)) {
        let xy = fm::compare_dparts(&x, &y);
        prop_assert_eq!(xy, fm::compare_dparts(&y, &x).reverse());
        prop_assert_eq!(xy == Ordering::Equal, x == y);
        if xy != Ordering::Greater && fm::compare_dparts(&y, &z) != Ordering::Greater {
            prop_assert_ne!(fm::compare_dparts(&x, &z), Ordering::Greater);
        }
    }

    #[test]
    fn much_less_implies_less(v in arb_standard(5), w in arb_standard(5)) {
        if fm::much_less(&v, &w) && !w.dpart().is_empty() {
            prop_assert_eq!(fm::compare_fm(&v, &w), Ordering::Less);
        }
    }

    #[test]
    fn serde_round_trip(v in arb_standard(5)) {
        let text = serde_json::to_string(&v).unwrap();
        let back: StandardMonomialFM = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, v);
    }
}
