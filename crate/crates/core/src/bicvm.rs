//! Bilingual compositional vector model: sentences are the sum of their word
//! vectors, and an aligned pair must sit closer (in squared distance) than
//! the source sentence and a random target sentence, by a margin.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{ParallelCorpus, OOV};
use crate::embedstore::{BilingualEmbedding, EmbeddingMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BicvmConfig {
    pub dim: usize,
    pub margin: f64,
    /// Noise sentences per aligned pair.
    pub noise_k: usize,
    pub batch_size: usize,
    pub epochs: usize,
    /// Weight decay applied to every row touched by an update.
    pub l2_lambda: f64,
    pub lr: f64,
    pub seed: u64,
    pub threads: usize,
}

impl Default for BicvmConfig {
    fn default() -> Self {
        Self {
            dim: 200,
            margin: 200.0,
            noise_k: 10,
            batch_size: 50,
            epochs: 100,
            l2_lambda: 1e-5,
            lr: 1e-3,
            seed: 1,
            threads: 1,
        }
    }
}

impl BicvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::invalid("margin must be > 0"));
        }
        if self.noise_k < 1 || self.batch_size < 1 || self.epochs < 1 || self.dim < 1 || self.threads < 1 {
            return Err(Error::invalid("dim, noise_k, batch_size, epochs and threads must all be >= 1"));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::invalid("learning rate must be > 0"));
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::invalid("l2_lambda must be >= 0"));
        }
        Ok(())
    }
}

/// Elementwise sum of the word vectors of a sentence.
pub fn compose(sentence: &[&[f64]]) -> Result<Vec<f64>> {
    let first = sentence.first().ok_or_else(|| Error::invalid("cannot compose an empty sentence"))?;
    let mut out = first.to_vec();
    for v in &sentence[1..] {
        if v.len() != out.len() {
            return Err(Error::invalid("word vectors differ in length"));
        }
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += x;
        }
    }
    Ok(out)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `max(margin + |v - w|^2 - |v - noise|^2, 0)`.
pub fn hinge_loss(v: &[f64], w: &[f64], noise: &[f64], margin: f64) -> f64 {
    (margin + sq_dist(v, w) - sq_dist(v, noise)).max(0.0)
}

/// Loss and gradients of [`hinge_loss`] with respect to the three
/// compositions. Every word of a sentence receives its composition's
/// gradient unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeGrad {
    pub loss: f64,
    pub d_v: Vec<f64>,
    pub d_w: Vec<f64>,
    pub d_noise: Vec<f64>,
}

pub fn hinge_gradients(v: &[f64], w: &[f64], noise: &[f64], margin: f64) -> HingeGrad {
    let loss = hinge_loss(v, w, noise, margin);
    let n = v.len();
    if loss <= 0.0 {
        return HingeGrad {
            loss: 0.0,
            d_v: vec![0.0; n],
            d_w: vec![0.0; n],
            d_noise: vec![0.0; n],
        };
    }
    HingeGrad {
        loss,
        d_v: (0..n).map(|i| 2.0 * (noise[i] - w[i])).collect(),
        d_w: (0..n).map(|i| 2.0 * (w[i] - v[i])).collect(),
        d_noise: (0..n).map(|i| 2.0 * (v[i] - noise[i])).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct BicvmOutput {
    pub embedding: BilingualEmbedding,
    /// Mean hinge loss per (pair, noise) term in each epoch.
    pub epoch_loss: Vec<f64>,
}

struct Element {
    loss: f64,
    d_src: Vec<f64>,
    d_tgt: Vec<f64>,
    noise: Vec<(usize, Vec<f64>)>,
}

fn compose_ids(m: &[f64], dim: usize, ids: &[u32]) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for &id in ids {
        let row = &m[id as usize * dim..(id as usize + 1) * dim];
        for (o, x) in out.iter_mut().zip(row) {
            *o += x;
        }
    }
    out
}

struct Accumulator {
    grad: Vec<f64>,
    touched: Vec<bool>,
    rows: Vec<u32>,
    dim: usize,
}

impl Accumulator {
    fn new(len: usize, dim: usize) -> Self {
        Self {
            grad: vec![0.0; len * dim],
            touched: vec![false; len],
            rows: Vec::new(),
            dim,
        }
    }

    fn add(&mut self, ids: &[u32], g: &[f64]) {
        for &id in ids {
            let r = id as usize;
            if !self.touched[r] {
                self.touched[r] = true;
                self.rows.push(id);
            }
            for (a, x) in self.grad[r * self.dim..(r + 1) * self.dim].iter_mut().zip(g) {
                *a += x;
            }
        }
    }

    /// `row -= lr * (grad + lambda * row)` on every touched row, then resets.
    fn apply(&mut self, m: &mut [f64], lr: f64, lambda: f64) -> Result<()> {
        let dim = self.dim;
        for &id in &self.rows {
            let r = id as usize;
            let row = &mut m[r * dim..(r + 1) * dim];
            let g = &mut self.grad[r * dim..(r + 1) * dim];
            for (x, gi) in row.iter_mut().zip(g.iter_mut()) {
                *x -= lr * (*gi + lambda * *x);
                *gi = 0.0;
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NumericalBlowUp { ids: vec![id] });
            }
            self.touched[r] = false;
        }
        self.rows.clear();
        Ok(())
    }
}

fn strip_oov(s: &[u32]) -> Vec<u32> {
    s.iter().copied().filter(|&id| id != OOV).collect()
}

pub fn train_bicvm_detailed(corpus: &ParallelCorpus, config: &BicvmConfig) -> Result<BicvmOutput> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let dim = config.dim;
    let vs = corpus.vocab_src();
    let vt = corpus.vocab_tgt();
    let src: Vec<Vec<u32>> = corpus.pairs().iter().map(|p| strip_oov(&p.src)).collect();
    let tgt: Vec<Vec<u32>> = corpus.pairs().iter().map(|p| strip_oov(&p.tgt)).collect();
    let usable: Vec<usize> = (0..src.len()).filter(|&i| !src[i].is_empty() && !tgt[i].is_empty()).collect();
    if usable.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = 1.0 / (dim as f64).sqrt();
    let mut w: Vec<f64> = (0..vs.len() * dim).map(|_| init_rng.random_range(-scale..scale)).collect();
    let mut v: Vec<f64> = (0..vt.len() * dim).map(|_| init_rng.random_range(-scale..scale)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut acc_src = Accumulator::new(vs.len(), dim);
    let mut acc_tgt = Accumulator::new(vt.len(), dim);
    let mut order = usable.clone();
    let mut epoch_loss = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let noise: Vec<Vec<usize>> = order
            .iter()
            .map(|_| (0..config.noise_k).map(|_| usable[rng.random_range(0..usable.len())]).collect())
            .collect();
        let mut total = 0.0;
        for (batch, batch_noise) in order.chunks(config.batch_size).zip(noise.chunks(config.batch_size)) {
            let (w_ref, v_ref) = (&w, &v);
            let elements: Vec<Element> = pool.install(|| {
                batch
                    .par_iter()
                    .zip(batch_noise.par_iter())
                    .map(|(&i, ns)| {
                        let a = compose_ids(w_ref, dim, &src[i]);
                        let b = compose_ids(v_ref, dim, &tgt[i]);
                        let mut el = Element {
                            loss: 0.0,
                            d_src: vec![0.0; dim],
                            d_tgt: vec![0.0; dim],
                            noise: Vec::new(),
                        };
                        for &j in ns {
                            let n = compose_ids(v_ref, dim, &tgt[j]);
                            let g = hinge_gradients(&a, &b, &n, config.margin);
                            if g.loss == 0.0 {
                                continue;
                            }
                            el.loss += g.loss;
                            for k in 0..dim {
                                el.d_src[k] += g.d_v[k];
                                el.d_tgt[k] += g.d_w[k];
                            }
                            el.noise.push((j, g.d_noise));
                        }
                        el
                    })
                    .collect()
            });
            for (el, &i) in elements.iter().zip(batch) {
                if !el.loss.is_finite() {
                    return Err(Error::NumericalBlowUp { ids: src[i].clone() });
                }
                total += el.loss;
                if el.loss == 0.0 {
                    continue;
                }
                acc_src.add(&src[i], &el.d_src);
                acc_tgt.add(&tgt[i], &el.d_tgt);
                for (j, g) in &el.noise {
                    acc_tgt.add(&tgt[*j], g);
                }
            }
            acc_src.apply(&mut w, config.lr, config.l2_lambda)?;
            acc_tgt.apply(&mut v, config.lr, config.l2_lambda)?;
        }
        epoch_loss.push(total / (order.len() * config.noise_k) as f64);
    }

    let src_m = EmbeddingMatrix::from_vocab(vs, dim, w)?;
    let tgt_m = EmbeddingMatrix::from_vocab(vt, dim, v)?;
    Ok(BicvmOutput {
        embedding: BilingualEmbedding::new(src_m, tgt_m)?,
        epoch_loss,
    })
}

/// Mini-batch SGD on the summed hinge loss over aligned pairs, each with
/// `noise_k` target sentences drawn uniformly (and redrawn every epoch).
/// Alignment links are ignored. Results do not depend on `threads`.
pub fn train_bicvm(corpus: &ParallelCorpus, config: &BicvmConfig) -> Result<BilingualEmbedding> {
    Ok(train_bicvm_detailed(corpus, config)?.embedding)
}

/// Squared distance between the compositions of one sentence pair.
pub fn pair_distance(be: &BilingualEmbedding, src: &[u32], tgt: &[u32]) -> f64 {
    let a = compose_ids(be.src.data(), be.src.dim(), &strip_oov(src));
    let b = compose_ids(be.tgt.data(), be.tgt.dim(), &strip_oov(tgt));
    sq_dist(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn corpus(src: &[&str], tgt: &[&str]) -> ParallelCorpus {
        let vs = Vocabulary::build(src, 1, true).unwrap();
        let vt = Vocabulary::build(tgt, 1, true).unwrap();
        ParallelCorpus::from_lines(src, tgt, None::<&[&str]>, vs, vt, true).unwrap()
    }

    #[test]
    fn compose_cases() {
        let a = [1.0, 2.0];
        let b = [-1.0, -2.0];
        let c = [0.5, 4.0];
        assert_eq!(compose(&[&a]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(compose(&[&a, &b]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(compose(&[&a, &c, &b]).unwrap(), compose(&[&b, &a, &c]).unwrap());
        assert!(compose(&[]).is_err());
    }

    #[test]
    fn hinge_cases() {
        let v = [1.0, 2.0];
        assert_eq!(hinge_loss(&v, &v, &[10.0, 2.0], 5.0), 0.0);
        assert_eq!(hinge_loss(&v, &[3.0, 3.0], &[3.0, 3.0], 5.0), 5.0);
        assert_eq!(hinge_loss(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 3.0], 5.0), 0.0);
        assert_eq!(hinge_loss(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 2.0], 5.0), 2.0);
    }

    #[test]
    fn inactive_hinge_has_zero_gradient() {
        let g = hinge_gradients(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 3.0], 5.0);
        assert_eq!(g.loss, 0.0);
        assert!(g.d_v.iter().chain(&g.d_w).chain(&g.d_noise).all(|x| *x == 0.0));
    }

    #[test]
    fn self_noise_pulls_pair_together() {
        let c = corpus(&["the cat sat"], &["le chat assis"]);
        let cfg = BicvmConfig {
            dim: 8,
            epochs: 1,
            lr: 1e-2,
            ..BicvmConfig::default()
        };
        let before = {
            let one = BicvmConfig { lr: 1e-300, ..cfg.clone() };
            let be = train_bicvm(&c, &one).unwrap();
            pair_distance(&be, &c.pairs()[0].src, &c.pairs()[0].tgt)
        };
        let out = train_bicvm_detailed(&c, &cfg).unwrap();
        assert_eq!(out.epoch_loss, vec![cfg.margin]);
        let after = pair_distance(&out.embedding, &c.pairs()[0].src, &c.pairs()[0].tgt);
        assert!(after < before, "{after} >= {before}");
    }

    #[test]
    fn norms_stay_bounded_without_decay() {
        let c = corpus(&["a b"], &["x y"]);
        let cfg = BicvmConfig {
            dim: 6,
            epochs: 100,
            l2_lambda: 0.0,
            lr: 1e-2,
            ..BicvmConfig::default()
        };
        let be = train_bicvm(&c, &cfg).unwrap();
        for x in be.src.data().iter().chain(be.tgt.data()) {
            assert!(x.abs() < 10.0);
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let src = ["a b c", "b c d", "c d a", "d a b"];
        let tgt = ["w x y", "x y z", "y z w", "z w x"];
        let c = corpus(&src, &tgt);
        let cfg = BicvmConfig {
            dim: 8,
            epochs: 3,
            batch_size: 3,
            noise_k: 2,
            ..BicvmConfig::default()
        };
        let one = train_bicvm(&c, &cfg).unwrap();
        let four = train_bicvm(&c, &BicvmConfig { threads: 4, ..cfg }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn config_validation() {
        assert!(BicvmConfig { margin: 0.0, ..BicvmConfig::default() }.validate().is_err());
        assert!(BicvmConfig { noise_k: 0, ..BicvmConfig::default() }.validate().is_err());
    }
}
