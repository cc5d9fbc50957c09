//! Embedding matrices: storage, text serialization, cosine queries and 2-D
//! PCA coordinates.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::corpus::{write_lines, Vocabulary};
use crate::error::{Error, Result};

/// Row-major `|words| x dim` matrix with a word index.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    words: Vec<String>,
    index: HashMap<String, u32>,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(words: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("embedding dim must be >= 1"));
        }
        if data.len() != words.len() * dim {
            return Err(Error::invalid(format!(
                "embedding data has {} values, expected {} x {}",
                data.len(),
                words.len(),
                dim
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NumericalBlowUp {
                ids: vec![(pos / dim) as u32],
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::invalid(format!("duplicate embedding word '{w}'")));
            }
        }
        Ok(Self {
            words,
            index,
            dim,
            data,
        })
    }

    pub fn from_vocab(vocab: &Vocabulary, dim: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(vocab.words().to_vec(), dim, data)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn row(&self, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.id(word).map(|id| self.row(id))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            words: self.words.clone(),
            index: self.index.clone(),
            dim: self.dim,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Writes the `"<rows> <dim>"` text format with 9 significant digits.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_to(&mut out).map_err(|e| Error::io(path, e))
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (i, w) in self.words.iter().enumerate() {
            out.write_all(w.as_bytes())?;
            for x in self.row(i as u32) {
                write!(out, " {}", format_value(*x))?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file), &path.display().to_string())
    }

    pub fn read_from<R: BufRead>(reader: R, context: &str) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            None => return Err(Error::parse(context, 1, "empty embedding file")),
            Some(l) => l.map_err(|e| Error::io(context, e))?,
        };
        let mut head = header.split_whitespace();
        let parse_usize = |s: Option<&str>| s.and_then(|s| s.parse::<usize>().ok());
        let (Some(rows), Some(dim), None) = (parse_usize(head.next()), parse_usize(head.next()), head.next()) else {
            return Err(Error::parse(context, 1, "header must be '<count> <dim>'"));
        };
        if rows == 0 {
            return Err(Error::parse(context, 1, "empty embedding file"));
        }
        let mut words = Vec::with_capacity(rows);
        let mut data = Vec::with_capacity(rows * dim);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line.map_err(|e| Error::io(context, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().unwrap_or_default();
            let before = data.len();
            for tok in parts {
                let x: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(context, line_no, format!("bad number '{tok}'")))?;
                data.push(x);
            }
            let got = data.len() - before;
            if got != dim {
                return Err(Error::parse(
                    context,
                    line_no,
                    format!("row {} has {got} values, header says {dim}", words.len() + 1),
                ));
            }
            words.push(word.to_string());
        }
        if words.is_empty() {
            return Err(Error::parse(context, 1, "empty embedding file"));
        }
        if words.len() != rows {
            return Err(Error::parse(
                context,
                1,
                format!("header announces {rows} rows, file has {}", words.len()),
            ));
        }
        Self::new(words, dim, data)
    }
}

fn format_value(x: f64) -> String {
    format!("{x:.8e}")
}

/// Source (W) and target (V) matrices sharing one space.
#[derive(Debug, Clone, PartialEq)]
pub struct BilingualEmbedding {
    pub src: EmbeddingMatrix,
    pub tgt: EmbeddingMatrix,
}

impl BilingualEmbedding {
    pub fn new(src: EmbeddingMatrix, tgt: EmbeddingMatrix) -> Result<Self> {
        if src.dim() != tgt.dim() {
            return Err(Error::invalid(format!(
                "source dim {} differs from target dim {}",
                src.dim(),
                tgt.dim()
            )));
        }
        Ok(Self { src, tgt })
    }

    pub fn shared_dim(&self) -> usize {
        self.src.dim()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // four independent accumulators so the loop vectorizes
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("vector lengths differ: {} vs {}", a.len(), b.len())));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine of `query` against every row of `space`; zero rows score `-inf`.
pub fn similarities(query: &[f64], space: &EmbeddingMatrix) -> Result<Vec<f64>> {
    if query.len() != space.dim() {
        return Err(Error::invalid(format!(
            "query dim {} differs from space dim {}",
            query.len(),
            space.dim()
        )));
    }
    let nq = norm(query);
    if nq == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((0..space.len() as u32)
        .map(|id| {
            let row = space.row(id);
            let nr = norm(row);
            if nr == 0.0 {
                f64::NEG_INFINITY
            } else {
                (dot(query, row) / (nq * nr)).clamp(-1.0, 1.0)
            }
        })
        .collect())
}

fn by_score_then_id(sims: &[f64]) -> impl Fn(&u32, &u32) -> Ordering + '_ {
    move |&a, &b| {
        sims[b as usize]
            .partial_cmp(&sims[a as usize])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    }
}

/// Top-`k` rows of `space` by cosine to `query`, ties by ascending id.
pub fn knn_vector(query: &[f64], k: usize, space: &EmbeddingMatrix, exclude: Option<u32>) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let sims = similarities(query, space)?;
    let mut ids: Vec<u32> = (0..space.len() as u32).filter(|&i| Some(i) != exclude).collect();
    let cmp = by_score_then_id(&sims);
    if ids.len() > k {
        ids.select_nth_unstable_by(k - 1, &cmp);
        ids.truncate(k);
    }
    ids.sort_by(&cmp);
    Ok(ids
        .into_iter()
        .map(|i| (space.word(i).to_string(), sims[i as usize]))
        .collect())
}

/// Nearest neighbours of `word` within its own space (the word itself is
/// excluded).
pub fn knn(word: &str, k: usize, space: &EmbeddingMatrix) -> Result<Vec<(String, f64)>> {
    let id = space.id(word).ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    knn_vector(space.row(id), k, space, Some(id))
}

/// Nearest neighbours of a `from`-space word among the rows of `to`.
pub fn knn_cross(word: &str, k: usize, from: &EmbeddingMatrix, to: &EmbeddingMatrix) -> Result<Vec<(String, f64)>> {
    let query = from.vector(word).ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    knn_vector(query, k, to, None)
}

/// 1-based rank of row `target` among all rows of `space` under the knn
/// ordering.
pub fn rank_of(query: &[f64], target: u32, space: &EmbeddingMatrix) -> Result<usize> {
    Ok(rank_in(&similarities(query, space)?, target))
}

pub(crate) fn rank_in(sims: &[f64], target: u32) -> usize {
    let t = sims[target as usize];
    let ahead = sims
        .iter()
        .enumerate()
        .filter(|&(j, &s)| s > t || (s == t && (j as u32) < target))
        .count();
    ahead + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaPoint {
    /// Index of the input set the word came from.
    pub set: usize,
    pub word: String,
    pub x: f64,
    pub y: f64,
}

/// Projects the pooled vectors of the requested words onto their top two
/// principal components.
///
/// Components are ordered by descending eigenvalue of the covariance of the
/// mean-centred pool, and each is signed so that its largest-magnitude
/// loading is positive.
pub fn pca_project(sets: &[(&EmbeddingMatrix, &[&str])]) -> Result<Vec<PcaPoint>> {
    let Some(first) = sets.first() else {
        return Err(Error::invalid("pca needs at least one embedding space"));
    };
    let dim = first.0.dim();
    if sets.iter().any(|(m, _)| m.dim() != dim) {
        return Err(Error::invalid("pca spaces must share one dimension"));
    }
    if dim < 2 {
        return Err(Error::invalid("pca needs vectors of dim >= 2"));
    }
    let mut labels = Vec::new();
    let mut rows: Vec<&[f64]> = Vec::new();
    for (set, (space, words)) in sets.iter().enumerate() {
        for w in words.iter() {
            let v = space.vector(w).ok_or_else(|| Error::UnknownWord(w.to_string()))?;
            labels.push((set, w.to_string()));
            rows.push(v);
        }
    }
    let n = rows.len();
    if n < 3 {
        return Err(Error::invalid("pca needs at least 3 words"));
    }
    let mut x = DMatrix::from_fn(n, dim, |i, j| rows[i][j]);
    for j in 0..dim {
        let mean = x.column(j).sum() / n as f64;
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = (x.transpose() * &x) / (n as f64 - 1.0);
    let components = principal_axes(cov, 2);
    let proj = &x * &components;
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(i, (set, word))| PcaPoint {
            set,
            word,
            x: proj[(i, 0)],
            y: proj[(i, 1)],
        })
        .collect())
}

/// Top `k` eigenvectors of a symmetric matrix as columns, descending by
/// eigenvalue, sign-fixed.
pub(crate) fn principal_axes(sym: DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let dim = sym.nrows();
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(Ordering::Equal)
    });
    let mut out = DMatrix::zeros(dim, k);
    for (c, &src) in order.iter().take(k).enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        fix_sign(col.as_mut_slice());
        out.set_column(c, &col);
    }
    out
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Writes `word<TAB>lang<TAB>x<TAB>y` rows; `langs[set]` names each input set.
pub fn write_pca_tsv(path: &Path, points: &[PcaPoint], langs: &[&str]) -> Result<()> {
    write_lines(
        path,
        points.iter().map(|p| {
            let lang = langs.get(p.set).copied().unwrap_or("?");
            format!("{}\t{}\t{}\t{}", p.word, lang, format_value(p.x), format_value(p.y))
        }),
    )
}
