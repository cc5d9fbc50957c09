use nalgebra::DMatrix;
use proptest::prelude::*;

use xlembed::bicca::cca;
use xlembed::bivcd::merge_documents;
use xlembed::corpus::{format_pharaoh_line, parse_pharaoh_line, AlignmentLink};
use xlembed::embedstore::{cosine, EmbeddingMatrix};
use xlembed::evalsuite::{average_ranks, spearman, tfidf_doc_vector, Idf};
use xlembed::sgcore::Side;
use xlembed::stats::{mcnemar_test, steiger_test, PairedOutcomes};

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn merge_keeps_every_token_in_order(p in 1usize..80, q in 1usize..80) {
        let src: Vec<u32> = (0..p as u32).collect();
        let tgt: Vec<u32> = (100..100 + q as u32).collect();
        let m = merge_documents(&src, &tgt).unwrap();
        prop_assert_eq!(m.tokens.len(), p + q);
        let s: Vec<u32> = m.tokens.iter().filter(|t| t.side == Side::Src).map(|t| t.id).collect();
        let t: Vec<u32> = m.tokens.iter().filter(|t| t.side == Side::Tgt).map(|t| t.id).collect();
        prop_assert_eq!(s, src);
        prop_assert_eq!(t, tgt);
    }

    #[test]
    fn merge_never_puts_two_short_tokens_together(p in 1usize..80, q in 1usize..80) {
        let m = merge_documents(&vec![0; p], &vec![0; q]).unwrap();
        let short = if p >= q { Side::Tgt } else { Side::Src };
        for w in m.tokens.windows(2) {
            prop_assert!(!(w[0].side == short && w[1].side == short));
        }
    }

    #[test]
    fn cosine_is_symmetric_bounded_and_scale_free(a in vec_strategy(6), b in vec_strategy(6), s in 0.01f64..100.0) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
        let c = cosine(&a, &b).unwrap();
        prop_assert_eq!(c, cosine(&b, &a).unwrap());
        prop_assert!((-1.0..=1.0).contains(&c));
        let scaled: Vec<f64> = a.iter().map(|x| x * s).collect();
        prop_assert!((cosine(&scaled, &b).unwrap() - c).abs() <= 1e-12);
    }

    #[test]
    fn ranks_sum_to_triangular_number(x in prop::collection::vec(0u8..5, 1..40)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let n = x.len() as f64;
        let total: f64 = average_ranks(&x).iter().sum();
        prop_assert!((total - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn spearman_ignores_monotone_transforms(x in vec_strategy(20), y in vec_strategy(20)) {
        let base = spearman(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&base));
        prop_assert!((spearman(&y, &x).unwrap() - base).abs() <= 1e-12);
        let warped: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
        prop_assert!((spearman(&warped, &y).unwrap() - base).abs() <= 1e-12);
    }

    #[test]
    fn mcnemar_is_symmetric(a in prop::collection::vec(any::<bool>(), 1..120), seed in any::<u64>()) {
        let b: Vec<bool> = a.iter().enumerate().map(|(i, &x)| x ^ ((seed >> (i % 64)) & 1 == 1)).collect();
        let o = PairedOutcomes::new(a, b).unwrap();
        let r = mcnemar_test(&o);
        prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
        prop_assert_eq!(r.p_value, mcnemar_test(&o.swapped()).p_value);
    }

    #[test]
    fn steiger_is_symmetric(ra in -0.9f64..0.9, rb in -0.9f64..0.9, rab in -0.9f64..0.9, n in 5usize..500) {
        if let Ok(p) = steiger_test(ra, rb, rab, n) {
            prop_assert!(p > 0.0 && p <= 1.0);
            prop_assert!((steiger_test(rb, ra, rab, n).unwrap() - p).abs() <= 1e-12);
        }
    }

    #[test]
    fn pharaoh_round_trip(links in prop::collection::vec((0u32..50, 0u32..50), 0..20)) {
        let links: Vec<AlignmentLink> = links.into_iter().map(|(i, j)| AlignmentLink::new(i, j)).collect();
        prop_assert_eq!(parse_pharaoh_line(&format_pharaoh_line(&links), 1).unwrap(), links);
    }

    #[test]
    fn saved_vectors_reload_closely_and_resave_identically(data in vec_strategy(12)) {
        let words = vec!["a".to_string(), "b".into(), "c".into()];
        let m = EmbeddingMatrix::new(words, 4, data.clone()).unwrap();
        let mut first = Vec::new();
        m.write_to(&mut first).unwrap();
        let back = EmbeddingMatrix::read_from(first.as_slice(), "mem").unwrap();
        for (x, y) in data.iter().zip(back.data()) {
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1e-300) + 1e-300);
        }
        let mut second = Vec::new();
        back.write_to(&mut second).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn doc_vectors_scale_with_the_space(s in 0.1f64..10.0, doc in prop::collection::vec(0usize..4, 1..12)) {
        let words: Vec<String> = ["w0", "w1", "w2", "w3"].iter().map(|w| w.to_string()).collect();
        let data: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin()).collect();
        let emb = EmbeddingMatrix::new(words.clone(), 3, data).unwrap();
        let doc: Vec<String> = doc.into_iter().map(|i| words[i].clone()).collect();
        let other = vec!["w0".to_string()];
        let idf = Idf::from_documents([doc.as_slice(), other.as_slice()]);
        let a = tfidf_doc_vector(&doc, &emb, &idf).unwrap();
        let b = tfidf_doc_vector(&doc, &emb.scaled(s), &idf).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x * s - y).abs() <= 1e-9);
        }
    }
}

fn random_matrix(n: usize, c: usize, seed: u64) -> DMatrix<f64> {
    // small LCG so this file needs no RNG crate
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    DMatrix::from_fn(n, c, |_, _| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    })
}

#[test]
fn cca_correlations_survive_invertible_maps_and_shifts() {
    let x = random_matrix(150, 5, 1);
    let y = x.columns(0, 4) * random_matrix(4, 4, 2) + random_matrix(150, 4, 3) * 0.5;
    let base = cca(&x, &y, 1.0).unwrap().correlations;
    let a = random_matrix(5, 5, 4) + DMatrix::identity(5, 5) * 2.0;
    let mut x2 = &x * a;
    x2.add_scalar_mut(7.0);
    let y2 = &y * 3.0;
    let moved = cca(&x2, &y2, 1.0).unwrap().correlations;
    for (p, q) in base.iter().zip(&moved) {
        assert!((p - q).abs() < 1e-8, "{p} vs {q}");
    }
}

#[test]
fn cca_swapping_sides_keeps_correlations() {
    let x = random_matrix(120, 4, 5);
    let y = &x * random_matrix(4, 4, 6) + random_matrix(120, 4, 7);
    let a = cca(&x, &y, 1.0).unwrap().correlations;
    let b = cca(&y, &x, 1.0).unwrap().correlations;
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).abs() < 1e-9);
    }
}
