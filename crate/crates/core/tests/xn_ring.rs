use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tautring::poly::build::{a, b, product};
use tautring::xn::{self, StandardMonomialXn};
use tautring::{linalg, rat, Generator, Monomial, QPoly, QRing, Rational, Subset};

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn double_factorial_odd(p: usize) -> usize {
    // (2p - 1)!!
    (1..=p).map(|i| 2 * i - 1).product()
}

/// Number of (a-set, matching) pairs of degree `d` on `n` points.
fn standard_count(n: usize, d: usize) -> usize {
    (0..=d)
        .map(|p| {
            binom(n, 2 * p) * double_factorial_odd(p) * binom(n.saturating_sub(2 * p), d - p)
        })
        .sum()
}

#[test]
fn enumeration_matches_closed_count() {
    for n in 1..=8 {
        for d in 0..=n {
            assert_eq!(xn::enumerate_standard_xn(n, d).len(), standard_count(n, d), "n={n} d={d}");
        }
    }
}

#[test]
fn hilbert_matches_standard_minus_six_point_rank() {
    for n in 1..=6 {
        let ring = QRing::new(xn::xn_presentation(n).unwrap());
        let engine = ring.hilbert(n).unwrap();
        let oracle: Vec<usize> = (0..=n)
            .map(|d| {
                let rels = xn::six_point_relations::<Rational>(n, d).unwrap();
                let r = if rels.is_empty() {
                    0
                } else {
                    linalg::rank(&linalg::SparseMatrix::from_dense(&rels))
                };
                standard_count(n, d) - r
            })
            .collect();
        assert_eq!(engine, oracle, "n={n}");
    }
}

#[test]
fn known_hilbert_functions() {
    let h = |n| QRing::new(xn::xn_presentation(n).unwrap()).hilbert(n).unwrap();
    assert_eq!(h(2), vec![1, 3, 1]);
    assert_eq!(h(3), vec![1, 6, 6, 1]);
    assert_eq!(h(4), vec![1, 10, 21, 10, 1]);
}

/// Cycles of the union of two perfect matchings given as pair lists.
fn cycles(u: &[(u8, u8)], v: &[(u8, u8)]) -> u32 {
    let mut adj: std::collections::HashMap<u8, Vec<u8>> = Default::default();
    for &(i, j) in u.iter().chain(v) {
        adj.entry(i).or_default().push(j);
        adj.entry(j).or_default().push(i);
    }
    let mut seen = std::collections::HashSet::new();
    let mut count = 0;
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    count
}

#[test]
fn matching_gram_entries_are_cycle_powers() {
    for m in 1..=4 {
        let g = xn::matching_gram::<Rational>(m).unwrap();
        for (i, u) in g.matchings.iter().enumerate() {
            for (j, v) in g.matchings.iter().enumerate() {
                let expected = num_traits::pow(rat(-4), cycles(u.pairs(), v.pairs()) as usize);
                assert_eq!(g.matrix.get(i, j), expected, "m={m}");
            }
        }
    }
}

#[test]
fn matching_gram_three_kernel_is_six_point() {
    let g = xn::matching_gram::<Rational>(3).unwrap();
    let (rank, kernel) = linalg::rank_and_kernel(&g.matrix);
    assert_eq!(rank, 14);
    assert_eq!(kernel.len(), 1);
    let k = &kernel[0];
    assert!(k.iter().all(|x| *x == k[0]) && k[0] != rat(0));
    let full_rank = |m| {
        let g = xn::matching_gram::<Rational>(m).unwrap();
        linalg::rank(&g.matrix) == g.matchings.len()
    };
    assert!(full_rank(1) && full_rank(2));
}

#[test]
fn duality_on_products() {
    for n in 1..=8 {
        for d in 0..=n {
            for v in xn::enumerate_standard_xn(n, d) {
                let w = xn::dual_xn(&v, n);
                assert_eq!(w.degree(), n - d);
                assert_eq!(xn::dual_xn(&w, n), v);
            }
        }
    }
}

#[test]
fn dual_pairs_to_nonzero() {
    for n in 1..=6 {
        for d in 0..=n {
            for v in xn::enumerate_standard_xn(n, d) {
                let w = xn::dual_xn(&v, n);
                let q = QPoly::monomial(v.monomial().mul(&w.monomial()), rat(1));
                let value = xn::xn_socle_value(&q, n).unwrap();
                assert_eq!(value, num_traits::pow(rat(-4), v.pairs().len()));
            }
        }
    }
}

#[test]
fn engine_and_rewriting_agree_on_top_degree() {
    let mut rng = StdRng::seed_from_u64(7);
    for n in 2..=5 {
        let ring = QRing::new(xn::xn_presentation(n).unwrap());
        let gens: Vec<QPoly> = ring
            .presentation()
            .generators()
            .iter()
            .map(|&g| QPoly::gen(g))
            .collect();
        for _ in 0..40 {
            let q = product((0..n).map(|_| gens[rng.gen_range(0..gens.len())].clone()));
            assert_eq!(ring.socle_eval(&q).unwrap(), xn::xn_socle_value(&q, n).unwrap());
        }
    }
}

#[test]
fn six_point_relation_vanishes_in_the_ring() {
    let ring = QRing::new(xn::xn_presentation(6).unwrap());
    let r = xn::six_point_sum::<Rational>();
    assert!(ring.reduce(&r, 3).unwrap().is_zero());
    assert!(!xn::quadratic_normal_form(&r).is_zero());
}

#[test]
fn derived_six_point_is_minus_the_sum() {
    assert_eq!(
        xn::derive_six_point::<Rational>().unwrap(),
        -xn::six_point_sum::<Rational>()
    );
}

#[test]
fn faber_relation_pullback() {
    let expected: QPoly = (&(&b(1, 2) * &b(1, 3)) - &(&a(1) * &b(2, 3))).scale(&rat(2));
    assert_eq!(xn::verify_faber_relation::<Rational>(), expected);
}

#[test]
fn pushforward_drops_the_last_point() {
    for m in 1..=4 {
        for d in 0..=m {
            for v in xn::enumerate_standard_xn(m, d) {
                let lifted = QPoly::monomial(v.monomial(), rat(1)).mul_monomial(&Monomial::gen(Generator::a(m + 1)));
                let down = xn::fiber_pushforward(&lifted, m).unwrap();
                assert_eq!(down, QPoly::monomial(v.monomial(), rat(1)));
            }
        }
    }
}

fn arb_ab_monomial(n: usize, deg: usize) -> impl Strategy<Value = Monomial> {
    let mut gens: Vec<Generator> = (1..=n).map(Generator::a).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push(Generator::b(i, j));
        }
    }
    prop::collection::vec(prop::sample::select(gens), 1..=deg).prop_map(Monomial::from_gens)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rewriting_is_confluent(m in arb_ab_monomial(6, 7), seed in any::<u64>()) {
        let q = QPoly::monomial(m, rat(1));
        let reference = xn::quadratic_normal_form(&q);
        let mut rng = StdRng::seed_from_u64(seed);
        let other = xn::quadratic_normal_form_with(&q, |rs| rng.gen_range(0..rs.len()));
        prop_assert_eq!(other, reference);
    }

    #[test]
    fn rewriting_output_is_standard(m in arb_ab_monomial(7, 7)) {
        let nf = xn::quadratic_normal_form(&QPoly::monomial(m, rat(1)));
        for (mono, _) in nf.terms() {
            prop_assert!(StandardMonomialXn::from_monomial(mono).is_ok());
        }
    }

    #[test]
    fn support_is_preserved(m in arb_ab_monomial(7, 6)) {
        let support = m.factors().iter().fold(Subset::EMPTY, |s, g| s | g.support());
        let nf = xn::quadratic_normal_form(&QPoly::monomial(m, rat(1)));
        for (mono, _) in nf.terms() {
            let v = StandardMonomialXn::from_monomial(mono).unwrap();
            prop_assert_eq!(v.support(), support);
        }
    }
}
