//! Canonical correlation analysis between two independently trained
//! monolingual spaces, anchored by a translation lexicon.
//!
//! Both covariance matrices get a small ridge (`1e-10 * trace / dim` on the
//! diagonal) so that nearly singular inputs still whiten cleanly.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::corpus::{ParallelCorpus, TranslationLexicon};
use crate::embedstore::{BilingualEmbedding, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::sgcore::{train_monolingual, SGDConfig, Side};

pub const RIDGE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CcaResult {
    /// `l x d` source directions.
    pub proj_src: DMatrix<f64>,
    /// `m x d` target directions.
    pub proj_tgt: DMatrix<f64>,
    /// Canonical correlations, non-increasing.
    pub correlations: Vec<f64>,
    pub mean_src: DVector<f64>,
    pub mean_tgt: DVector<f64>,
}

impl CcaResult {
    pub fn dim(&self) -> usize {
        self.correlations.len()
    }
}

/// Rows of the two spaces for the usable lexicon pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedMatrices {
    pub src: DMatrix<f64>,
    pub tgt: DMatrix<f64>,
    /// Lexicon pairs dropped because a word has no vector.
    pub skipped: usize,
}

pub fn build_paired_matrices(
    src: &EmbeddingMatrix,
    tgt: &EmbeddingMatrix,
    pairs: &[(String, String)],
) -> Result<PairedMatrices> {
    if pairs.is_empty() {
        return Err(Error::invalid("lexicon is empty"));
    }
    let usable: Vec<(&[f64], &[f64])> = pairs
        .iter()
        .filter_map(|(a, b)| Some((src.vector(a)?, tgt.vector(b)?)))
        .collect();
    let n = usable.len();
    Ok(PairedMatrices {
        src: DMatrix::from_fn(n, src.dim(), |i, j| usable[i].0[j]),
        tgt: DMatrix::from_fn(n, tgt.dim(), |i, j| usable[i].1[j]),
        skipped: pairs.len() - n,
    })
}

fn centered(x: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = x.nrows() as f64;
    let mean = DVector::from_fn(x.ncols(), |j, _| x.column(j).sum() / n);
    let mut c = x.clone();
    for j in 0..x.ncols() {
        let m = mean[j];
        c.column_mut(j).iter_mut().for_each(|v| *v -= m);
    }
    (c, mean)
}

/// `C^{-1/2}` of a ridged covariance matrix.
fn inverse_sqrt(mut cov: DMatrix<f64>, name: &'static str) -> Result<DMatrix<f64>> {
    let dim = cov.nrows();
    let trace = cov.trace();
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::RankDeficient { matrix: name });
    }
    let eps = RIDGE * trace / dim as f64;
    for i in 0..dim {
        cov[(i, i)] += eps;
    }
    let eig = SymmetricEigen::new(cov);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::RankDeficient { matrix: name });
    }
    let inv = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose())
}

/// Classical CCA of the paired rows of `w` (`n x l`) and `v` (`n x m`),
/// keeping `floor(k_ratio * min(l, m))` components. Each component is signed
/// so its largest-magnitude source loading is positive.
pub fn cca(w: &DMatrix<f64>, v: &DMatrix<f64>, k_ratio: f64) -> Result<CcaResult> {
    let n = w.nrows();
    if v.nrows() != n {
        return Err(Error::invalid("paired matrices differ in row count"));
    }
    if n < 2 {
        return Err(Error::invalid("cca needs at least two paired rows"));
    }
    if !(k_ratio > 0.0 && k_ratio <= 1.0) {
        return Err(Error::invalid("k_ratio must lie in (0, 1]"));
    }
    let (l, m) = (w.ncols(), v.ncols());
    let d = (k_ratio * l.min(m) as f64).floor() as usize;
    if d == 0 {
        return Err(Error::invalid("k_ratio keeps no components"));
    }
    if n < d {
        return Err(Error::invalid(format!("{n} paired rows cannot support {d} components")));
    }
    let (wc, mean_src) = centered(w);
    let (vc, mean_tgt) = centered(v);
    let scale = 1.0 / (n - 1) as f64;
    let cxx = wc.tr_mul(&wc) * scale;
    let cyy = vc.tr_mul(&vc) * scale;
    let cxy = wc.tr_mul(&vc) * scale;
    let kx = inverse_sqrt(cxx, "source covariance")?;
    let ky = inverse_sqrt(cyy, "target covariance")?;
    let svd = (&kx * cxy * &ky).svd(true, true);
    let u = svd.u.expect("requested u");
    let vt = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(Ordering::Equal)
    });
    let mut proj_src = DMatrix::zeros(l, d);
    let mut proj_tgt = DMatrix::zeros(m, d);
    let mut correlations = Vec::with_capacity(d);
    for (c, &k) in order.iter().take(d).enumerate() {
        let mut a = &kx * u.column(k);
        let mut b = &ky * vt.row(k).transpose();
        let lead = a.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if lead < 0.0 {
            a.neg_mut();
            b.neg_mut();
        }
        proj_src.set_column(c, &a);
        proj_tgt.set_column(c, &b);
        correlations.push(svd.singular_values[k].max(0.0));
    }
    Ok(CcaResult {
        proj_src,
        proj_tgt,
        correlations,
        mean_src,
        mean_tgt,
    })
}

/// `(x - mean) P` for every row of `emb`.
pub fn project(emb: &EmbeddingMatrix, proj: &DMatrix<f64>, mean: &DVector<f64>) -> Result<EmbeddingMatrix> {
    if proj.nrows() != emb.dim() || mean.len() != emb.dim() {
        return Err(Error::invalid("projection does not match the embedding dim"));
    }
    let x = DMatrix::from_fn(emb.len(), emb.dim(), |i, j| emb.row(i as u32)[j] - mean[j]);
    let y = x * proj;
    let d = proj.ncols();
    let mut data = Vec::with_capacity(emb.len() * d);
    for i in 0..emb.len() {
        data.extend(y.row(i).iter());
    }
    EmbeddingMatrix::new(emb.words().to_vec(), d, data)
}

/// Projects both full vocabularies into the canonical space learned from the
/// lexicon pairs.
pub fn train_bicca(
    src: &EmbeddingMatrix,
    tgt: &EmbeddingMatrix,
    lexicon: &[(String, String)],
    k_ratio: f64,
) -> Result<BilingualEmbedding> {
    let paired = build_paired_matrices(src, tgt, lexicon)?;
    let res = cca(&paired.src, &paired.tgt, k_ratio)?;
    BilingualEmbedding::new(
        project(src, &res.proj_src, &res.mean_src)?,
        project(tgt, &res.proj_tgt, &res.mean_tgt)?,
    )
}

/// Monolingual skip-gram on each side of `corpus`, then [`train_bicca`].
pub fn train_bicca_from_corpus(
    corpus: &ParallelCorpus,
    config: &SGDConfig,
    lexicon: &TranslationLexicon,
    k_ratio: f64,
) -> Result<BilingualEmbedding> {
    let src_sents: Vec<Vec<u32>> = corpus.pairs().iter().map(|p| p.src.clone()).collect();
    let tgt_sents: Vec<Vec<u32>> = corpus.pairs().iter().map(|p| p.tgt.clone()).collect();
    let src = train_monolingual(&src_sents, corpus.vocab_src(), Side::Src, config)?.matrices.remove(0);
    let tgt = train_monolingual(&tgt_sents, corpus.vocab_tgt(), Side::Tgt, config)?.matrices.remove(0);
    let pairs = lexicon.word_pairs(corpus.vocab_src(), corpus.vocab_tgt());
    train_bicca(&src, &tgt, &pairs, k_ratio)
}
