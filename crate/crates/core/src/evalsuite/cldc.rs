use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::perceptron::AveragedPerceptron;
use super::report::{EvalReport, ItemOutcome};
use crate::corpus::{read_lines, tokenize, write_lines};
use crate::embedstore::{BilingualEmbedding, EmbeddingMatrix};
use crate::error::{Error, Result};

/// Documents with class labels, one language.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDocumentSet {
    docs: Vec<(String, Vec<String>)>,
}

impl LabeledDocumentSet {
    pub fn new(docs: Vec<(String, Vec<String>)>) -> Result<Self> {
        if let Some(i) = docs.iter().position(|(_, t)| t.is_empty()) {
            return Err(Error::invalid(format!("document {i} is empty")));
        }
        Ok(Self { docs })
    }

    pub fn docs(&self) -> &[(String, Vec<String>)] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Distinct labels in sorted order.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.docs.iter().map(|(l, _)| l).collect();
        set.into_iter().cloned().collect()
    }

    /// `label<TAB>space separated tokens` lines.
    pub fn read_tsv(path: &Path, lowercase: bool) -> Result<Self> {
        let ctx = path.display().to_string();
        let mut docs = Vec::new();
        for (i, line) in read_lines(path)?.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (label, text) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(&ctx, i + 1, "expected 'label<TAB>tokens'"))?;
            let tokens: Vec<String> = tokenize(text, lowercase).map(|t| t.into_owned()).collect();
            if tokens.is_empty() {
                return Err(Error::parse(&ctx, i + 1, "empty document"));
            }
            docs.push((label.trim().to_string(), tokens));
        }
        Self::new(docs)
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        write_lines(path, self.docs.iter().map(|(l, t)| format!("{l}\t{}", t.join(" "))))
    }
}

/// Inverse document frequencies `ln(N / df)` over one document collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Idf {
    n_docs: usize,
    df: HashMap<String, usize>,
}

impl Idf {
    pub fn from_documents<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut n_docs = 0;
        for doc in docs {
            n_docs += 1;
            let uniq: BTreeSet<&String> = doc.iter().collect();
            for w in uniq {
                *df.entry(w.clone()).or_insert(0) += 1;
            }
        }
        Self { n_docs, df }
    }

    /// A word outside the collection is weighted as if seen in one document.
    pub fn weight(&self, word: &str) -> f64 {
        let df = self.df.get(word).copied().unwrap_or(1).max(1);
        (self.n_docs as f64 / df as f64).ln()
    }
}

/// `sum_w tfidf(w) vec(w) / sum_w tfidf(w)` over in-vocabulary words, with
/// raw counts as tf. Falls back to the tf-weighted mean when every idf is 0.
pub fn tfidf_doc_vector(doc: &[String], emb: &EmbeddingMatrix, idf: &Idf) -> Result<Vec<f64>> {
    // counts in order of first occurrence, so summation order is fixed
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut counts: Vec<(u32, &str, f64)> = Vec::new();
    for w in doc {
        if let Some(id) = emb.id(w) {
            match index.get(w.as_str()) {
                Some(&k) => counts[k].2 += 1.0,
                None => {
                    index.insert(w, counts.len());
                    counts.push((id, w, 1.0));
                }
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::invalid("document has no in-vocabulary word"));
    }
    let mut weights: Vec<f64> = counts.iter().map(|(_, w, tf)| tf * idf.weight(w)).collect();
    let mut total: f64 = weights.iter().sum();
    if total == 0.0 {
        weights = counts.iter().map(|c| c.2).collect();
        total = weights.iter().sum();
    }
    let mut out = vec![0.0; emb.dim()];
    for ((id, _, _), wt) in counts.iter().zip(&weights) {
        for (o, x) in out.iter_mut().zip(emb.row(*id)) {
            *o += wt * x;
        }
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    Ok(out)
}

fn featurize(set: &LabeledDocumentSet, emb: &EmbeddingMatrix) -> Vec<Option<Vec<f64>>> {
    let idf = Idf::from_documents(set.docs.iter().map(|(_, t)| t.as_slice()));
    set.docs.iter().map(|(_, t)| tfidf_doc_vector(t, emb, &idf).ok()).collect()
}

/// Trains on `train` documents embedded in the source space and tests on
/// `test` documents embedded in the target space.
pub fn eval_cldc(
    be: &BilingualEmbedding,
    train: &LabeledDocumentSet,
    test: &LabeledDocumentSet,
    iters: usize,
    seed: u64,
) -> Result<EvalReport> {
    eval_cldc_spaces(&be.src, &be.tgt, train, test, iters, seed)
}

pub fn eval_cldc_spaces(
    train_space: &EmbeddingMatrix,
    test_space: &EmbeddingMatrix,
    train: &LabeledDocumentSet,
    test: &LabeledDocumentSet,
    iters: usize,
    seed: u64,
) -> Result<EvalReport> {
    let labels = train.labels();
    if labels != test.labels() {
        return Err(Error::invalid("train and test label sets differ"));
    }
    if labels.len() < 2 {
        return Err(Error::invalid("classification needs at least two labels"));
    }
    if train_space.dim() != test_space.dim() {
        return Err(Error::invalid("train and test spaces differ in dimension"));
    }
    let class = |l: &String| labels.binary_search(l).expect("label present");

    let mut feats = Vec::new();
    let mut ys = Vec::new();
    for ((label, _), f) in train.docs.iter().zip(featurize(train, train_space)) {
        if let Some(f) = f {
            feats.push(f);
            ys.push(class(label));
        }
    }
    let model = AveragedPerceptron::train(&feats, &ys, labels.len(), iters, seed)?;

    let mut train_counts = vec![0usize; labels.len()];
    for &y in &ys {
        train_counts[y] += 1;
    }
    // first maximum, i.e. lowest label on ties
    let majority = (0..labels.len()).fold(0, |b, k| if train_counts[k] > train_counts[b] { k } else { b });

    let mut report = EvalReport::new("cldc");
    let mut per_class = vec![(0usize, 0usize); labels.len()];
    let (mut right, mut n, mut majority_right) = (0usize, 0usize, 0usize);
    for (i, ((label, _), f)) in test.docs.iter().zip(featurize(test, test_space)).enumerate() {
        let gold = class(label);
        let item = match f {
            Some(f) => {
                let guess = model.predict(&f);
                let ok = guess == gold;
                n += 1;
                right += ok as usize;
                majority_right += (gold == majority) as usize;
                per_class[gold].1 += 1;
                per_class[gold].0 += ok as usize;
                ItemOutcome {
                    id: format!("doc{i}"),
                    correct: Some(ok),
                    value: guess as f64,
                    note: labels[guess].clone(),
                }
            }
            None => ItemOutcome {
                id: format!("doc{i}"),
                correct: None,
                value: f64::NAN,
                note: "all-oov".to_string(),
            },
        };
        report.items.push(item);
    }
    if n == 0 {
        return Err(Error::invalid("no test document has an in-vocabulary word"));
    }
    report.evaluated = n;
    report.total = test.len();
    report.push_metric("accuracy", right as f64 / n as f64);
    report.push_metric("majority_baseline", majority_right as f64 / n as f64);
    for (label, (r, t)) in labels.iter().zip(&per_class) {
        if *t > 0 {
            report.push_metric(format!("accuracy.{label}"), *r as f64 / *t as f64);
        }
    }
    report.push_config("iters", iters);
    report.push_config("seed", seed);
    report.push_config("train_docs", feats.len());
    Ok(report)
}
