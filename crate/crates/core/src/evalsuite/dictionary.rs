use std::collections::BTreeSet;
use std::path::Path;

use super::report::{EvalReport, ItemOutcome};
use crate::corpus::{read_lines, Vocabulary};
use crate::embedstore::{rank_in, similarities, BilingualEmbedding};
use crate::error::{Error, Result};

/// Gold `(source, target)` translation pairs, sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoldDictionary {
    entries: Vec<(String, String)>,
}

impl GoldDictionary {
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        let set: BTreeSet<(String, String)> = pairs.into_iter().collect();
        Self {
            entries: set.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reads `src_lemmas<TAB>tgt_lemmas` lines, lemma lists comma-separated.
pub fn read_synset_tsv(path: &Path) -> Result<Vec<(Vec<String>, Vec<String>)>> {
    let ctx = path.display().to_string();
    let split = |s: &str| -> Vec<String> {
        s.split(',')
            .map(|w| w.trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect()
    };
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match line.split_once('\t') {
            Some((a, b)) if !split(a).is_empty() && !split(b).is_empty() => out.push((split(a), split(b))),
            _ => return Err(Error::parse(&ctx, i + 1, "expected 'src,lemmas<TAB>tgt,lemmas'")),
        }
    }
    Ok(out)
}

fn frequency(vocab: &Vocabulary, word: &str) -> u64 {
    vocab.id(word).map_or(0, |id| vocab.count(id))
}

/// Drops words seen fewer than `min_freq` times in their own language, then
/// emits the cross product of each aligned synset pair.
pub fn build_gold_dictionary(
    synsets: &[(Vec<String>, Vec<String>)],
    src_counts: &Vocabulary,
    tgt_counts: &Vocabulary,
    min_freq: u64,
) -> GoldDictionary {
    let mut pairs = Vec::new();
    for (s1, s2) in synsets {
        let keep_src: Vec<&String> = s1.iter().filter(|w| frequency(src_counts, w) >= min_freq).collect();
        let keep_tgt: Vec<&String> = s2.iter().filter(|w| frequency(tgt_counts, w) >= min_freq).collect();
        for a in &keep_src {
            for b in &keep_tgt {
                pairs.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    GoldDictionary::from_pairs(pairs)
}

/// Top-`k` accuracy and mean reciprocal rank of gold targets among all
/// target-space words, ranked by cosine to the source word.
pub fn eval_dictionary_induction(be: &BilingualEmbedding, gold: &GoldDictionary, k: usize) -> Result<EvalReport> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let mut report = EvalReport::new("dictionary-induction");
    report.push_config("k", k);
    let (mut hits, mut rr, mut n) = (0usize, 0.0, 0usize);
    let mut cache: Option<(&str, Option<Vec<f64>>)> = None;
    for (e, f) in &gold.entries {
        let outcome = match (be.src.vector(e), be.tgt.id(f)) {
            (Some(q), Some(t)) => {
                if cache.as_ref().is_none_or(|(w, _)| *w != e) {
                    cache = Some((e.as_str(), similarities(q, &be.tgt).ok()));
                }
                cache.as_ref().and_then(|(_, s)| s.as_deref()).map(|sims| rank_in(sims, t))
            }
            _ => None,
        };
        let item = match outcome {
            Some(rank) => {
                n += 1;
                rr += 1.0 / rank as f64;
                let ok = rank <= k;
                hits += ok as usize;
                ItemOutcome {
                    id: format!("{e} {f}"),
                    correct: Some(ok),
                    value: rank as f64,
                    note: String::new(),
                }
            }
            None => ItemOutcome {
                id: format!("{e} {f}"),
                correct: None,
                value: f64::NAN,
                note: "oov".to_string(),
            },
        };
        report.items.push(item);
    }
    if n == 0 {
        return Err(Error::invalid("no gold entry is covered by the embedding"));
    }
    report.evaluated = n;
    report.total = gold.len();
    report.push_metric("accuracy", hits as f64 / n as f64);
    report.push_metric("mrr", rr / n as f64);
    Ok(report)
}
