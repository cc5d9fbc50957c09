//! Small end-to-end runs on generated data checking qualitative behaviour.

use xlembed::bicvm::{compose, train_bicvm, BicvmConfig};
use xlembed::biskip::train_biskip;
use xlembed::bivcd::train_bivcd;
use xlembed::corpus::{ParallelCorpus, Vocabulary, OOV};
use xlembed::embedstore::{cosine, knn_cross, BilingualEmbedding};
use xlembed::evalsuite::{eval_dictionary_induction, GoldDictionary};
use xlembed::sgcore::{ObjectiveSpec, SGDConfig};
use xlembed::testkit::{generate_parallel, SynthParallel, SynthSpec};

fn small_world(seed: u64) -> SynthParallel {
    generate_parallel(&SynthSpec {
        vocab_size: 80,
        sentence_count: 3000,
        seed,
        ..SynthSpec::default()
    })
    .unwrap()
}

fn sgd(dim: usize, epochs: usize, base: SGDConfig) -> SGDConfig {
    SGDConfig {
        dim,
        epochs,
        min_count: 1,
        threads: 1,
        ..base
    }
}

fn mean_gold_minus_random(be: &BilingualEmbedding, gold: &[(String, String)]) -> f64 {
    let n = gold.len();
    let (mut g, mut r) = (0.0, 0.0);
    for (i, (e, f)) in gold.iter().enumerate() {
        let ev = be.src.vector(e).unwrap();
        g += cosine(ev, be.tgt.vector(f).unwrap()).unwrap();
        let other = &gold[(i + n / 2) % n].1;
        r += cosine(ev, be.tgt.vector(other).unwrap()).unwrap();
    }
    (g - r) / n as f64
}

fn sentence_vector(space: &xlembed::embedstore::EmbeddingMatrix, ids: &[u32]) -> Vec<f64> {
    let rows: Vec<&[f64]> = ids.iter().filter(|&&i| i != OOV).map(|&i| space.row(i)).collect();
    compose(&rows).unwrap()
}

#[test]
fn bicvm_aligned_sentences_end_up_closer_than_mismatched_ones() {
    let data = small_world(3);
    let cfg = BicvmConfig {
        dim: 40,
        epochs: 15,
        ..BicvmConfig::default()
    };
    let be = train_bicvm(&data.corpus, &cfg).unwrap();
    let pairs = data.corpus.pairs();
    let n = 300;
    let (mut aligned, mut shuffled) = (0.0, 0.0);
    for i in 0..n {
        let s = sentence_vector(&be.src, &pairs[i].src);
        aligned += cosine(&s, &sentence_vector(&be.tgt, &pairs[i].tgt)).unwrap();
        shuffled += cosine(&s, &sentence_vector(&be.tgt, &pairs[(i + 1000) % pairs.len()].tgt)).unwrap();
    }
    let gap = (aligned - shuffled) / n as f64;
    assert!(gap >= 0.2, "aligned minus mismatched cosine {gap}");
}

#[test]
fn bivcd_gold_pairs_beat_random_pairs() {
    let data = small_world(4);
    let be = train_bivcd(&data.corpus, &sgd(40, 5, SGDConfig::bivcd())).unwrap();
    let gap = mean_gold_minus_random(&be, &data.gold_pairs);
    assert!(gap >= 0.15, "gold minus random cosine {gap}");
}

#[test]
fn biskip_on_a_copied_language_finds_the_same_word() {
    let data = small_world(5);
    let lines = &data.src_lines;
    let align: Vec<String> = lines
        .iter()
        .map(|l| (0..l.split_whitespace().count()).map(|i| format!("{i}-{i}")).collect::<Vec<_>>().join(" "))
        .collect();
    let vs = Vocabulary::build(lines, 1, true).unwrap();
    let vt = vs.clone();
    let corpus = ParallelCorpus::from_lines(lines, lines, Some(&align), vs, vt, true).unwrap();
    let be = train_biskip(&corpus, &sgd(30, 3, SGDConfig::biskip()), &ObjectiveSpec::default()).unwrap();
    let words = be.src.words().to_vec();
    let found = words
        .iter()
        .filter(|w| knn_cross(w, 3, &be.src, &be.tgt).unwrap().iter().any(|(x, _)| x == *w))
        .count();
    let share = found as f64 / words.len() as f64;
    assert!(share >= 0.9, "only {share} of words have themselves in the top 3");
}

#[test]
fn dictionary_accuracy_grows_with_k() {
    let data = small_world(6);
    let be = train_bivcd(&data.corpus, &sgd(20, 2, SGDConfig::bivcd())).unwrap();
    let gold = GoldDictionary::from_pairs(data.gold_pairs.clone());
    let mut last = 0.0;
    let mut mrr = None;
    for k in 1..=12 {
        let rep = eval_dictionary_induction(&be, &gold, k).unwrap();
        let acc = rep.metric("accuracy").unwrap();
        assert!(acc >= last, "k={k}: {acc} < {last}");
        last = acc;
        // mrr does not depend on k
        let m = rep.metric("mrr").unwrap();
        assert_eq!(*mrr.get_or_insert(m), m);
    }
}
