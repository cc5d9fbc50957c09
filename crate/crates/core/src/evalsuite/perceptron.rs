use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embedstore::dot;
use crate::error::{Error, Result};

/// Multi-class perceptron with one weight vector (plus bias) per class.
/// The final weights average the weights held after every training step.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedPerceptron {
    n_classes: usize,
    dim: usize,
    /// `n_classes` rows of `dim + 1` weights; the last one is the bias.
    weights: Vec<f64>,
}

impl AveragedPerceptron {
    /// Trains on `features` with class indices `labels` for `iters` epochs,
    /// shuffling the examples each epoch with `seed`.
    pub fn train(features: &[Vec<f64>], labels: &[usize], n_classes: usize, iters: usize, seed: u64) -> Result<Self> {
        if features.len() != labels.len() || features.is_empty() {
            return Err(Error::invalid("features and labels must be nonempty and equally long"));
        }
        let dim = features[0].len();
        if features.iter().any(|f| f.len() != dim) {
            return Err(Error::invalid("feature vectors differ in length"));
        }
        if labels.iter().any(|&l| l >= n_classes) {
            return Err(Error::invalid("label index out of range"));
        }
        let mut present = vec![false; n_classes];
        for &l in labels {
            present[l] = true;
        }
        if present.iter().filter(|p| **p).count() < 2 {
            return Err(Error::invalid("perceptron needs at least two classes in the training data"));
        }
        let stride = dim + 1;
        let mut w = vec![0.0; n_classes * stride];
        // sum of c * update, for the averaging trick w_avg = w - u / c
        let mut u = vec![0.0; n_classes * stride];
        let mut c = 1.0;
        let mut order: Vec<usize> = (0..features.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![1.0; stride];
        for _ in 0..iters {
            order.shuffle(&mut rng);
            for &i in &order {
                x[..dim].copy_from_slice(&features[i]);
                let guess = argmax(&w, stride, &x);
                let gold = labels[i];
                if guess != gold {
                    for (k, xi) in x.iter().enumerate() {
                        w[gold * stride + k] += xi;
                        u[gold * stride + k] += c * xi;
                        w[guess * stride + k] -= xi;
                        u[guess * stride + k] -= c * xi;
                    }
                }
                c += 1.0;
            }
        }
        let weights = w.iter().zip(&u).map(|(wi, ui)| wi - ui / c).collect();
        Ok(Self { n_classes, dim, weights })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Highest-scoring class; ties go to the lowest index.
    pub fn predict(&self, features: &[f64]) -> usize {
        let mut x = features.to_vec();
        x.push(1.0);
        argmax(&self.weights, self.dim + 1, &x)
    }
}

fn argmax(w: &[f64], stride: usize, x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, row) in w.chunks(stride).enumerate() {
        let s = dot(row, x);
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    best
}
