use rand::Rng;

use crate::error::{Error, Result};

/// Unigram distribution raised to the 0.75 power, stored as a cumulative
/// table over word ids.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDistribution {
    cumulative: Vec<f64>,
}

const POWER: f64 = 0.75;

impl NoiseDistribution {
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("noise distribution over an empty vocabulary"));
        }
        if counts.contains(&0) {
            return Err(Error::invalid("noise distribution needs positive counts"));
        }
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0.0;
        for &c in counts {
            acc += (c as f64).powf(POWER);
            cumulative.push(acc);
        }
        for x in cumulative.iter_mut() {
            *x /= acc;
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn probability(&self, id: u32) -> f64 {
        let i = id as usize;
        let lo = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        self.cumulative[i] - lo
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) as u32
    }
}

pub fn sample_negatives<R: Rng + ?Sized>(dist: &NoiseDistribution, n: usize, rng: &mut R) -> Vec<u32> {
    (0..n).map(|_| dist.sample(rng)).collect()
}
