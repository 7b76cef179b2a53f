mod common;

use std::collections::HashSet;

use common::seed2;
use flagcurve_core::surface::*;
use flagcurve_core::FlagError;
use nalgebra::Matrix2;
use proptest::prelude::*;

/// Reduced words by filtering all letter sequences.
fn brute_count(letters: usize, radius: usize) -> usize {
    let mut count = 0;
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..=radius {
        count += layer.len();
        let mut next = Vec::new();
        for w in &layer {
            for c in 0..letters {
                if w.last().is_none_or(|l| l ^ 1 != c) {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    count
}

#[test]
fn ball_sizes() {
    let seed = seed2();
    assert_eq!(seed.ball(0).count(), 1);
    assert_eq!(seed.ball(1).count(), 9);
    for n in 0..=4 {
        assert_eq!(ball_size(2, n), brute_count(8, n));
        assert_eq!(seed.ball(n).count(), 1 + 8 * (7usize.pow(n as u32) - 1) / 6);
    }
    let g3 = standard_fuchsian(3).unwrap();
    assert_eq!(g3.ball(3).count(), brute_count(12, 3));
}

#[test]
fn ball_is_shortlex_without_duplicates() {
    let words: Vec<Word> = seed2().ball(4).map(|(w, _)| w).collect();
    let set: HashSet<_> = words.iter().cloned().collect();
    assert_eq!(set.len(), words.len());
    for w in words.windows(2) {
        assert!(w[0].shortlex_key() < w[1].shortlex_key());
    }
    for (w, m) in seed2().ball(3) {
        assert!((m - seed2().image(&w)).norm() < 1e-12);
        assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
    }
}

#[test]
fn standard_seeds() {
    for g in [2, 3] {
        let seed = standard_fuchsian(g).unwrap();
        assert_eq!(seed.generators().len(), 2 * g);
        assert!(seed.relator_residual() <= 1e-8);
        for m in seed.generators() {
            assert!((m.determinant() - 1.0).abs() <= 1e-10);
            assert!(m.trace().abs() > 2.0);
        }
        for (w, m) in seed.ball(4) {
            if !w.is_empty() {
                assert!(m.trace().abs() > 2.0, "{w}");
            }
        }
    }
    assert_eq!(standard_fuchsian(1).unwrap_err(), FlagError::UnsupportedGenus(1));
}

#[test]
fn genus_two_generator_lengths() {
    // side pairings of the regular octagon with angles pi/4 all have
    // |tr| = 2 + sqrt 2
    let seed = seed2();
    for m in seed.generators() {
        let tr = m.trace().abs();
        assert!((tr - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        let t = translation_length(m).unwrap();
        assert!((2.0 * (t / 2.0).cosh() - tr).abs() < 1e-12);
    }
}

#[test]
fn translation_length_examples() {
    let e = std::f64::consts::E;
    assert!((translation_length(&Matrix2::new(e, 0.0, 0.0, 1.0 / e)).unwrap() - 2.0).abs() < 1e-14);
    assert!(matches!(translation_length(&Matrix2::identity()), Err(FlagError::NotHyperbolic { .. })));
    let m = seed2().image(&"a1b2".parse().unwrap());
    let inv = inverse2(&m);
    assert!((translation_length(&m).unwrap() - translation_length(&inv).unwrap()).abs() < 1e-12);
}

#[test]
fn fingerprint_dedup_keeps_distinct() {
    let seed = seed2();
    let d = enumerate_ball_dedup(&seed, 3, 1e-7);
    assert_eq!(d.len(), seed.ball(3).count());
}

#[test]
fn seed_json_shapes() {
    let seed: FuchsianSeed = serde_json::from_str(r#"{"genus":2}"#).unwrap();
    assert_eq!(seed, seed2());
    let text = serde_json::to_string(&seed).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 4);
    assert_eq!(v["generators"][0].as_array().unwrap().len(), 4);
    let bad = r#"{"genus":2,"generators":[[1,0,0,1],[1,0,0,1],[1,0,0,1],[1,0,0,1]]}"#;
    assert!(serde_json::from_str::<FuchsianSeed>(bad).is_err());
}

fn word() -> impl Strategy<Value = Word> {
    proptest::collection::vec(0usize..8, 0..10).prop_map(|c| Word::reduced(c.into_iter().map(Letter::from_code)))
}

proptest! {
    #[test]
    fn eval_u_is_a_morphism(a in word(), b in word(), values in proptest::collection::vec(-3.0f64..3.0, 4)) {
        let u = CohomologyClass::new(values).unwrap();
        let lhs = eval_u(&u, &a.mul(&b));
        prop_assert!((lhs - eval_u(&u, &a) - eval_u(&u, &b)).abs() < 1e-12);
        prop_assert!((eval_u(&u, &a.inverse()) + eval_u(&u, &a)).abs() < 1e-12);
    }

    #[test]
    fn commutators_vanish(values in proptest::collection::vec(-3.0f64..3.0, 4), a in word(), b in word()) {
        let u = CohomologyClass::new(values).unwrap();
        let c = a.mul(&b).mul(&a.inverse()).mul(&b.inverse());
        prop_assert!(eval_u(&u, &c).abs() < 1e-12);
    }

    #[test]
    fn translation_length_of_powers(w in word(), n in 1usize..5) {
        prop_assume!(!w.is_empty());
        let m = seed2().image(&w);
        prop_assume!(m.trace().abs() > 2.1);
        let t = translation_length(&m).unwrap();
        let mn = (0..n).fold(Matrix2::identity(), |acc, _| acc * m);
        prop_assert!((translation_length(&mn).unwrap() - n as f64 * t).abs() <= 1e-9 * (1.0 + n as f64 * t));
    }

    #[test]
    fn words_round_trip_text(w in word()) {
        let back: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w.clone());
        prop_assert_eq!(w.inverse().inverse(), w);
    }
}

#[test]
fn word_text_examples() {
    let w: Word = "a1b1A1B1".parse().unwrap();
    assert_eq!(w.len(), 4);
    assert_eq!(w.letters(), &Presentation::new(2).unwrap().relator().letters()[..4]);
    assert_eq!(w.to_string(), "a1b1A1B1");
    assert_eq!("a1A1".parse::<Word>().unwrap(), Word::empty());
    assert!("c1".parse::<Word>().is_err());
}
