//! Independent oracles: a permutation-sum shuffle evaluator, positive root
//! heights from the classical root systems, and hand-expanded values.

use qborel::coeffring::{parse_poly, LaurentPoly, Scalar};
use qborel::datum::{make_datum, QuantumDatum, Series, Specialization};
use qborel::freeword::{Algebra, FreeElem, Letters};
use qborel::pbwgen::{alpha, alpha_from_word, pbw_generators};
use qborel::shuffle::ShuffleElem;
use qborel::verify::{enumerate_products, verify_pbw_independence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dat(s: Series, n: u32) -> QuantumDatum {
    make_datum(s, n, Specialization::Multiparameter).unwrap()
}

fn poly(d: &QuantumDatum, s: &str) -> LaurentPoly {
    parse_poly(s, d.vars).unwrap()
}

/// `(a_1)(a_2)..(a_k)` as a sum over all arrangements: whenever a later
/// letter `a_t` lands before an earlier `a_s`, pay `p(a_t, a_s)^-1`.
fn brute_eval(alg: &Algebra<'_, qborel::Symbolic>, word: &[u8]) -> ShuffleElem<LaurentPoly> {
    fn go(
        alg: &Algebra<'_, qborel::Symbolic>,
        word: &[u8],
        used: &mut Vec<bool>,
        order: &mut Vec<usize>,
        out: &mut ShuffleElem<LaurentPoly>,
    ) {
        if order.len() == word.len() {
            let mut c = alg.one();
            for a in 0..order.len() {
                for b in a + 1..order.len() {
                    let (s, t) = (order[b], order[a]);
                    if t > s {
                        c = c.mul_ref(alg.p_inv(word[t], word[s]));
                    }
                }
            }
            let w: Letters = order.iter().map(|&i| word[i]).collect();
            out.add_term(w, c);
            return;
        }
        for i in 0..word.len() {
            if !used[i] {
                used[i] = true;
                order.push(i);
                go(alg, word, used, order, out);
                order.pop();
                used[i] = false;
            }
        }
    }
    let mut out = ShuffleElem::zero();
    go(
        alg,
        word,
        &mut vec![false; word.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

#[test]
fn eval_matches_permutation_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (s, n) in [(Series::C, 3), (Series::D, 4), (Series::A, 3)] {
        let d = dat(s, n);
        let alg = Algebra::symbolic(&d);
        for _ in 0..25 {
            let len = rng.gen_range(1..=6);
            let w: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=n) as u8).collect();
            let fast = alg.eval_free(&FreeElem::term(Letters::from_slice(&w), alg.one()));
            assert_eq!(
                fast.first_difference(&brute_eval(&alg, &w)),
                None,
                "{s}{n} word {w:?}"
            );
        }
    }
}

/// Heights of the positive roots of C_n and D_n.
fn root_heights(s: Series, n: u32) -> Vec<u32> {
    let mut h = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            h.push(j - i);
            h.push(match s {
                Series::C => 2 * n - i - j + 1,
                _ => 2 * n - i - j,
            });
        }
        if s == Series::C {
            h.push(2 * (n - i) + 1);
        }
    }
    h.sort();
    h
}

/// Number of nonzero exponent vectors with weighted sum at most `max`.
fn product_count(heights: &[u32], max: u32) -> usize {
    let mut ways = vec![0usize; max as usize + 1];
    ways[0] = 1;
    for &h in heights {
        for t in h as usize..=max as usize {
            ways[t] += ways[t - h as usize];
        }
    }
    ways.iter().sum::<usize>() - 1
}

fn generator_heights(d: &QuantumDatum) -> Vec<u32> {
    let mut h: Vec<u32> = pbw_generators(d)
        .iter()
        .map(|g| d.root_word(g.k, g.m).unwrap().len() as u32)
        .collect();
    h.sort();
    h
}

#[test]
fn generators_are_indexed_by_positive_roots() {
    for (s, n) in [
        (Series::C, 2),
        (Series::C, 3),
        (Series::C, 4),
        (Series::D, 3),
        (Series::D, 4),
        (Series::D, 5),
    ] {
        let d = dat(s, n);
        assert_eq!(generator_heights(&d), root_heights(s, n), "{s}{n}");
    }
    assert_eq!(pbw_generators(&dat(Series::C, 2)).len(), 4);
    assert_eq!(pbw_generators(&dat(Series::D, 3)).len(), 6);
}

#[test]
fn product_counts_match_generating_function() {
    // C2: heights 1,1,2,3; 1/((1-x)^2 (1-x^2)(1-x^3)) = 1 + 2x + 4x^2 + 7x^3 + 11x^4 + ...
    assert_eq!(product_count(&[1, 1, 2, 3], 1), 2);
    assert_eq!(product_count(&[1, 1, 2, 3], 2), 2 + 4);
    assert_eq!(product_count(&[1, 1, 2, 3], 4), 2 + 4 + 7 + 11);
    for (s, n, deg) in [
        (Series::C, 2, 4),
        (Series::C, 2, 6),
        (Series::D, 3, 4),
        (Series::D, 3, 6),
    ] {
        let d = dat(s, n);
        let want = product_count(&root_heights(s, n), deg);
        assert_eq!(enumerate_products(&generator_heights(&d), deg).len(), want);
        let report = verify_pbw_independence(&d, deg, 0).unwrap();
        assert!(report.passed(), "{report}");
        let total = report.cases.last().unwrap();
        assert!(
            total.label.starts_with(&format!("{want} ordered products")),
            "{}",
            total.label
        );
    }
}

#[test]
fn max_degree_one_is_the_letters() {
    let d = dat(Series::C, 3);
    let r = verify_pbw_independence(&d, 1, 0).unwrap();
    assert!(r.passed());
    assert!(r
        .cases
        .last()
        .unwrap()
        .label
        .starts_with("3 ordered products"));
}

#[test]
fn frozen_bracket_images() {
    let c2 = dat(Series::C, 2);
    let alg = Algebra::symbolic(&c2);
    let x = |i| alg.letter(i).unwrap();
    let img = alg.eval_free(&alg.skew_bracket(&x(1), &x(2)).unwrap());
    let want = ShuffleElem::term(Letters::from_slice(&[2, 1]), poly(&c2, "(q^2-1)*t_1_2"));
    assert_eq!(img.first_difference(&want), None);
    assert_eq!(img.to_string(), "(q^2-1)*t_1_2 * (x2 x1)");

    for n in [3, 4] {
        let d = dat(Series::C, n);
        let alg = Algebra::symbolic(&d);
        for i in 1..=n {
            for j in i + 2..=n {
                let b = alg
                    .skew_bracket(&alg.letter(i).unwrap(), &alg.letter(j).unwrap())
                    .unwrap();
                assert!(alg.eval_free(&b).is_zero(), "C{n} [x{i},x{j}]");
            }
        }
    }
}

#[test]
fn frozen_structure_constants() {
    let c2 = dat(Series::C, 2);
    assert_eq!(
        alpha(&c2, 1, 3).unwrap(),
        poly(&c2, "(1+q^-1)*(q-1)^2*q^-1")
    );
    assert_eq!(alpha(&c2, 1, 2).unwrap(), poly(&c2, "(1+q)*(q-1)*t_1_2"));
    assert_eq!(c2.mu(1, 2, 1).unwrap(), poly(&c2, "q^-2"));
    // in C3 the split (2,3) is the pair (n-1,n), so the product is q^-2
    let c3 = dat(Series::C, 3);
    assert_eq!(c3.mu(1, 3, 2).unwrap(), poly(&c3, "q^-2"));
    assert_eq!(dat(Series::C, 4).mu(1, 3, 2).unwrap().to_string(), "q^-1");
    for (s, n) in [(Series::C, 3), (Series::D, 4), (Series::A, 4)] {
        let d = dat(s, n);
        for k in 1..=d.max_letter() {
            for m in k..=d.max_letter() {
                if s == Series::D && k == n && m == n {
                    continue;
                }
                assert_eq!(
                    alpha(&d, k, m).unwrap(),
                    alpha_from_word(&d, k, m).unwrap(),
                    "{s}{n} ({k},{m})"
                );
            }
        }
    }
}
