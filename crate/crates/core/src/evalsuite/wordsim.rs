use std::collections::HashSet;
use std::path::Path;

use super::report::{EvalReport, ItemOutcome};
use crate::corpus::read_lines;
use crate::embedstore::{cosine, EmbeddingMatrix};
use crate::error::{Error, Result};

/// Word pairs with human similarity judgements.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSimDataset {
    triples: Vec<(String, String, f64)>,
}

impl WordSimDataset {
    pub fn new(triples: Vec<(String, String, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (a, b, s) in &triples {
            if !s.is_finite() {
                return Err(Error::invalid(format!("score of ({a}, {b}) is not finite")));
            }
            let key = if a <= b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate pair ({a}, {b})")));
            }
        }
        Ok(Self { triples })
    }

    /// `word_a<TAB>word_b<TAB>score` lines. A first line whose score does not
    /// parse is taken as a header.
    pub fn read_tsv(path: &Path) -> Result<Self> {
        let ctx = path.display().to_string();
        let mut triples = Vec::new();
        for (i, line) in read_lines(path)?.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() < 3 {
                return Err(Error::parse(&ctx, i + 1, "expected 'word_a<TAB>word_b<TAB>score'"));
            }
            match f[2].trim().parse::<f64>() {
                Ok(s) => triples.push((f[0].trim().to_lowercase(), f[1].trim().to_lowercase(), s)),
                Err(_) if i == 0 => continue,
                Err(_) => return Err(Error::parse(&ctx, i + 1, format!("bad score '{}'", f[2]))),
            }
        }
        Self::new(triples)
    }

    pub fn triples(&self) -> &[(String, String, f64)] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("pearson needs two equal-length samples of size >= 2"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("correlation of a constant sample is undefined"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Cosine of every dataset pair, `None` when a word is missing or a vector
/// is zero.
pub fn similarity_scores(emb: &EmbeddingMatrix, data: &WordSimDataset) -> Vec<Option<f64>> {
    data.triples
        .iter()
        .map(|(a, b, _)| match (emb.vector(a), emb.vector(b)) {
            (Some(va), Some(vb)) => cosine(va, vb).ok(),
            _ => None,
        })
        .collect()
}

pub fn eval_word_similarity(emb: &EmbeddingMatrix, data: &WordSimDataset) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::invalid("word similarity dataset is empty"));
    }
    let scores = similarity_scores(emb, data);
    let mut human = Vec::new();
    let mut model = Vec::new();
    let mut report = EvalReport::new("word-similarity");
    for ((a, b, h), s) in data.triples.iter().zip(&scores) {
        if let Some(s) = s {
            human.push(*h);
            model.push(*s);
        }
        report.items.push(ItemOutcome {
            id: format!("{a} {b}"),
            correct: None,
            value: s.unwrap_or(f64::NAN),
            note: if s.is_some() { h.to_string() } else { "oov".to_string() },
        });
    }
    if model.is_empty() {
        return Err(Error::invalid("no word similarity pair is covered by the embedding"));
    }
    report.evaluated = model.len();
    report.total = data.len();
    report.push_metric("spearman", spearman(&human, &model)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_case() {
        let h = [1.0, 2.0, 3.0, 4.0, 5.0];
        let m = [1.0, 2.0, 3.0, 5.0, 4.0];
        assert_eq!(spearman(&h, &m).unwrap(), 0.9);
        assert_eq!(spearman(&h, &h).unwrap(), 1.0);
        let rev: Vec<f64> = h.iter().rev().cloned().collect();
        assert_eq!(spearman(&h, &rev).unwrap(), -1.0);
    }

    #[test]
    fn ties_share_ranks() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn duplicates_rejected() {
        let t = vec![("a".into(), "b".into(), 1.0), ("b".into(), "a".into(), 2.0)];
        assert!(WordSimDataset::new(t).is_err());
    }

    #[test]
    fn oov_pairs_lower_coverage() {
        let emb = EmbeddingMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            vec![1.0, 0.0, 0.8, 0.6, 0.0, 1.0],
        )
        .unwrap();
        let data = WordSimDataset::new(vec![
            ("a".into(), "b".into(), 9.0),
            ("a".into(), "c".into(), 1.0),
            ("b".into(), "c".into(), 5.0),
            ("a".into(), "zzz".into(), 5.0),
        ])
        .unwrap();
        let r = eval_word_similarity(&emb, &data).unwrap();
        assert_eq!((r.evaluated, r.total), (3, 4));
        assert_eq!(r.metric("spearman"), Some(1.0));
    }

    #[test]
    fn nothing_covered_is_an_error() {
        let emb = EmbeddingMatrix::new(vec!["a".into()], 1, vec![1.0]).unwrap();
        let data = WordSimDataset::new(vec![("x".into(), "y".into(), 1.0)]).unwrap();
        assert!(eval_word_similarity(&emb, &data).is_err());
    }
}
