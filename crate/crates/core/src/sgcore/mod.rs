//! Stochastic-gradient machinery shared by the skip-gram based trainers.
//!
//! Every trainer minimises a weighted sum `alpha * A(W) + beta * B(V) +
//! cross * C(W, V)`. Here each term is a stream of (center, context) skip-gram
//! tasks tagged with the term they belong to; the term weight scales the
//! learning rate of that task's update.

mod kernel;
mod noise;
mod trainer;

pub use kernel::{sg_pair_update, sgns_loss, sigmoid};
pub use noise::{sample_negatives, NoiseDistribution};
pub use trainer::{
    neighbours, train, train_monolingual, EmitContext, Slot, Task, TaskSource, TrainOutput, TrainStats,
};

use crate::error::{Error, Result};

/// Which language a space belongs to. Also selects the random streams a
/// space uses, so a language trained alone reproduces the draws it gets
/// inside a bilingual run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Src,
    Tgt,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Src => 0,
            Side::Tgt => 1,
        }
    }
}

/// Objective term a task contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    /// Monolingual skip-gram on one side (A for source, B for target).
    Mono(Side),
    /// Cross-lingual term C.
    Cross,
}

impl Term {
    pub const ALL: [Term; 3] = [Term::Mono(Side::Src), Term::Mono(Side::Tgt), Term::Cross];

    pub fn index(self) -> usize {
        match self {
            Term::Mono(side) => side.index(),
            Term::Cross => 2,
        }
    }
}

/// Weights of the three objective terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSpec {
    pub alpha: f64,
    pub beta: f64,
    pub cross_weight: f64,
}

impl Default for ObjectiveSpec {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            cross_weight: 4.0,
        }
    }
}

impl ObjectiveSpec {
    pub fn validate(&self) -> Result<()> {
        let w = [self.alpha, self.beta, self.cross_weight];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid("objective weights must be finite and >= 0"));
        }
        if w.iter().all(|x| *x == 0.0) {
            return Err(Error::invalid("at least one objective weight must be > 0"));
        }
        Ok(())
    }

    pub fn weight(&self, term: Term) -> f64 {
        match term {
            Term::Mono(Side::Src) => self.alpha,
            Term::Mono(Side::Tgt) => self.beta,
            Term::Cross => self.cross_weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SGDConfig {
    pub dim: usize,
    /// Maximum context radius; the effective radius is drawn per center.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_count: u64,
    pub seed: u64,
    pub threads: usize,
    /// Frequent-word subsampling threshold; 0 disables it.
    pub subsample_threshold: f64,
}

impl Default for SGDConfig {
    fn default() -> Self {
        Self::biskip()
    }
}

impl SGDConfig {
    pub fn biskip() -> Self {
        Self {
            dim: 200,
            window: 10,
            negatives: 30,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 5,
            seed: 1,
            threads: 1,
            subsample_threshold: 0.0,
        }
    }

    /// Monolingual skip-gram used ahead of the CCA projection.
    pub fn bicca_mono() -> Self {
        Self {
            window: 5,
            negatives: 5,
            ..Self::biskip()
        }
    }

    pub fn bivcd() -> Self {
        Self {
            window: 5,
            negatives: 5,
            ..Self::biskip()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 || self.window < 1 || self.epochs < 1 || self.threads < 1 {
            return Err(Error::invalid("dim, window, epochs and threads must all be >= 1"));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::invalid("initial learning rate must be > 0"));
        }
        if !(self.subsample_threshold >= 0.0) {
            return Err(Error::invalid("subsample threshold must be >= 0"));
        }
        Ok(())
    }
}
