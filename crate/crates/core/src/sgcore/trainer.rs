use std::cell::UnsafeCell;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kernel::sgns_step;
use super::noise::NoiseDistribution;
use super::{ObjectiveSpec, SGDConfig, Side, Term};
use crate::corpus::{Vocabulary, OOV};
use crate::embedstore::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Index of a space within one training run.
pub type Slot = u8;

/// One (center, context) prediction tagged with its objective term. The
/// center reads the input matrix of its slot; the context and the negatives
/// read the output matrix of the context slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub center_slot: Slot,
    pub center: u32,
    pub context_slot: Slot,
    pub context: u32,
    pub term: Term,
}

/// Produces the tasks of one training unit (a sentence, a sentence pair, a
/// document). Called once per unit per epoch.
pub trait TaskSource: Sync {
    fn units(&self) -> usize;
    fn emit(&self, unit: usize, ctx: &mut EmitContext<'_>, out: &mut Vec<Task>);
}

const LR_FLOOR: f64 = 1e-4;
const TERM_STREAM_BASE: u64 = 8;
const WORKER_STREAM_STRIDE: u64 = 16;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-worker view handed to [`TaskSource::emit`]: random streams keyed by
/// objective term, the window radius and subsampling tables.
pub struct EmitContext<'a> {
    rngs: &'a mut [ChaCha8Rng; 3],
    window: usize,
    keep_probs: &'a [Option<Vec<f64>>],
}

impl EmitContext<'_> {
    pub fn rng(&mut self, term: Term) -> &mut ChaCha8Rng {
        &mut self.rngs[term.index()]
    }

    /// Effective radius, uniform in `[1, window]`.
    pub fn radius(&mut self, term: Term) -> usize {
        let w = self.window;
        self.rng(term).random_range(1..=w)
    }

    /// Marks positions usable for training: not [`OOV`] and not dropped by
    /// frequent-word subsampling (which draws from `term`'s stream).
    pub fn keep_mask(&mut self, slot: Slot, term: Term, sentence: &[u32]) -> Vec<bool> {
        let probs = self.keep_probs[slot as usize].as_deref();
        let rng = &mut self.rngs[term.index()];
        sentence
            .iter()
            .map(|&id| {
                if id == OOV {
                    return false;
                }
                match probs {
                    Some(p) => rng.random::<f64>() < p[id as usize],
                    None => true,
                }
            })
            .collect()
    }

    /// Appends skip-gram tasks for every kept center of `sentence`.
    pub fn skipgram(&mut self, sentence: &[u32], keep: &[bool], slot: Slot, term: Term, out: &mut Vec<Task>) {
        for (i, &center) in sentence.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            let r = self.radius(term);
            for j in neighbours(i, r, sentence.len()) {
                if keep[j] {
                    out.push(Task {
                        center_slot: slot,
                        center,
                        context_slot: slot,
                        context: sentence[j],
                        term,
                    });
                }
            }
        }
    }
}

/// Positions within `radius` of `pos`, excluding `pos`.
pub fn neighbours(pos: usize, radius: usize, len: usize) -> impl Iterator<Item = usize> {
    let lo = pos.saturating_sub(radius);
    let hi = (pos + radius + 1).min(len);
    (lo..hi).filter(move |&j| j != pos)
}

/// Row storage shared between hogwild workers.
struct HogwildMatrix {
    dim: usize,
    cells: Box<[UnsafeCell<f64>]>,
}

// Workers write rows concurrently without locks. Lost or torn updates are
// accepted as in asynchronous SGD; a single worker is race free.
unsafe impl Sync for HogwildMatrix {}

impl HogwildMatrix {
    fn new(values: Vec<f64>, dim: usize) -> Self {
        Self {
            dim,
            cells: values.into_iter().map(UnsafeCell::new).collect(),
        }
    }

    /// # Safety
    /// A thread must not hold two references to the same row at once.
    #[allow(clippy::mut_from_ref)]
    unsafe fn row_mut(&self, id: u32) -> &mut [f64] {
        let start = id as usize * self.dim;
        let cells = &self.cells[start..start + self.dim];
        // UnsafeCell<f64> is layout-compatible with f64
        std::slice::from_raw_parts_mut(cells.as_ptr() as *mut f64, self.dim)
    }

    fn into_vec(self) -> Vec<f64> {
        self.cells.into_vec().into_iter().map(UnsafeCell::into_inner).collect()
    }
}

struct Space {
    input: HogwildMatrix,
    output: HogwildMatrix,
    noise: NoiseDistribution,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    /// Mean per-task loss of each epoch.
    pub epoch_loss: Vec<f64>,
    /// Executed tasks per epoch, indexed by [`Term::index`].
    pub updates: Vec<[u64; 3]>,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    /// Input vectors of each space, in slot order.
    pub matrices: Vec<EmbeddingMatrix>,
    pub stats: TrainStats,
}

struct Worker {
    rngs: [ChaCha8Rng; 3],
    tasks: Vec<Task>,
    negatives: Vec<u32>,
    grad: Vec<f64>,
    loss: f64,
    updates: [u64; 3],
}

/// Runs `config.epochs` passes of negative-sampling SGD over the tasks of
/// `source`.
///
/// `spaces` lists the side and vocabulary of every slot. The learning rate
/// decays linearly per unit from `initial_lr` to `initial_lr * 1e-4` over the
/// scheduled units and is multiplied by the weight of each task's term;
/// tasks of zero-weight terms are skipped. With one thread the result is a
/// pure function of the inputs and the seed.
pub fn train(
    objective: &ObjectiveSpec,
    source: &dyn TaskSource,
    spaces: &[(Side, &Vocabulary)],
    config: &SGDConfig,
) -> Result<TrainOutput> {
    objective.validate()?;
    config.validate()?;
    if source.units() == 0 {
        return Err(Error::EmptyCorpus);
    }
    if spaces.is_empty() || spaces.len() > Slot::MAX as usize {
        return Err(Error::invalid("training needs at least one space"));
    }
    let dim = config.dim;
    let mut state = Vec::with_capacity(spaces.len());
    let mut keep_probs = Vec::with_capacity(spaces.len());
    for &(side, vocab) in spaces {
        if vocab.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut rng = stream_rng(config.seed, side.index() as u64);
        let half = 0.5 / dim as f64;
        let input: Vec<f64> = (0..vocab.len() * dim).map(|_| rng.random_range(-half..half)).collect();
        state.push(Space {
            input: HogwildMatrix::new(input, dim),
            output: HogwildMatrix::new(vec![0.0; vocab.len() * dim], dim),
            noise: NoiseDistribution::from_counts(vocab.counts())?,
        });
        keep_probs.push(subsample_keep_probs(vocab, config.subsample_threshold));
    }

    let units = source.units();
    let total = (units * config.epochs) as f64;
    let progress = AtomicUsize::new(0);
    let mut workers: Vec<Worker> = (0..config.threads as u64)
        .map(|w| Worker {
            rngs: std::array::from_fn(|t| {
                stream_rng(config.seed, TERM_STREAM_BASE + t as u64 + WORKER_STREAM_STRIDE * w)
            }),
            tasks: Vec::new(),
            negatives: Vec::with_capacity(config.negatives),
            grad: vec![0.0; dim],
            loss: 0.0,
            updates: [0; 3],
        })
        .collect();

    let mut stats = TrainStats::default();
    let run = |worker: &mut Worker, index: usize| -> Result<()> {
        let stride = config.threads;
        for unit in (index..units).step_by(stride) {
            let done = progress.fetch_add(1, Ordering::Relaxed) as f64;
            let lr_unit = config.initial_lr * (1.0 - done / total).max(LR_FLOOR);
            worker.tasks.clear();
            let mut ctx = EmitContext {
                rngs: &mut worker.rngs,
                window: config.window,
                keep_probs: &keep_probs,
            };
            source.emit(unit, &mut ctx, &mut worker.tasks);
            for t in 0..worker.tasks.len() {
                let task = worker.tasks[t];
                let weight = objective.weight(task.term);
                if weight == 0.0 {
                    continue;
                }
                let ctx_space = &state[task.context_slot as usize];
                let rng = &mut worker.rngs[task.term.index()];
                worker.negatives.clear();
                for _ in 0..config.negatives {
                    let n = ctx_space.noise.sample(rng);
                    if n != task.context {
                        worker.negatives.push(n);
                    }
                }
                // SAFETY: the center row lives in an input matrix and every
                // target row in an output matrix; targets are visited one at
                // a time, so no row is borrowed twice on this thread.
                let center = unsafe { state[task.center_slot as usize].input.row_mut(task.center) };
                let targets = std::iter::once((task.context, true))
                    .chain(worker.negatives.iter().map(|&n| (n, false)))
                    .map(|(id, pos)| (unsafe { ctx_space.output.row_mut(id) }, pos));
                match sgns_step(center, &mut worker.grad, targets, lr_unit * weight) {
                    Some(loss) => worker.loss += loss,
                    None => {
                        return Err(Error::NumericalBlowUp {
                            ids: vec![task.center, task.context],
                        })
                    }
                }
                worker.updates[task.term.index()] += 1;
            }
        }
        Ok(())
    };

    for _ in 0..config.epochs {
        for w in workers.iter_mut() {
            w.loss = 0.0;
            w.updates = [0; 3];
        }
        if config.threads == 1 {
            run(&mut workers[0], 0)?;
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = workers
                    .iter_mut()
                    .enumerate()
                    .map(|(i, w)| {
                        let run = &run;
                        scope.spawn(move || run(w, i))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect::<Result<Vec<()>>>()
            })?;
        }
        let mut updates = [0u64; 3];
        let mut loss = 0.0;
        for w in &workers {
            loss += w.loss;
            for t in 0..3 {
                updates[t] += w.updates[t];
            }
        }
        let n: u64 = updates.iter().sum();
        stats.epoch_loss.push(if n == 0 { 0.0 } else { loss / n as f64 });
        stats.updates.push(updates);
    }

    let matrices = state
        .into_iter()
        .zip(spaces)
        .map(|(space, (_, vocab))| EmbeddingMatrix::from_vocab(vocab, dim, space.input.into_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainOutput { matrices, stats })
}

/// word2vec-style keep probability `(sqrt(f / (t * N)) + 1) * t * N / f`,
/// capped at 1.
fn subsample_keep_probs(vocab: &Vocabulary, threshold: f64) -> Option<Vec<f64>> {
    if threshold <= 0.0 {
        return None;
    }
    let scale = threshold * vocab.total_tokens() as f64;
    Some(
        vocab
            .counts()
            .iter()
            .map(|&c| {
                let f = c as f64;
                ((f / scale).sqrt() + 1.0) * scale / f
            })
            .map(|p| p.min(1.0))
            .collect(),
    )
}

struct MonoSource<'a> {
    sentences: &'a [Vec<u32>],
    term: Term,
}

impl TaskSource for MonoSource<'_> {
    fn units(&self) -> usize {
        self.sentences.len()
    }

    fn emit(&self, unit: usize, ctx: &mut EmitContext<'_>, out: &mut Vec<Task>) {
        let sent = &self.sentences[unit];
        let keep = ctx.keep_mask(0, self.term, sent);
        ctx.skipgram(sent, &keep, 0, self.term, out);
    }
}

/// Plain skip-gram over one language. `side` selects the random streams, so
/// the result equals that language's space in a bilingual run whose
/// cross-lingual term never fires.
pub fn train_monolingual(
    sentences: &[Vec<u32>],
    vocab: &Vocabulary,
    side: Side,
    config: &SGDConfig,
) -> Result<TrainOutput> {
    let term = Term::Mono(side);
    let objective = ObjectiveSpec {
        alpha: 1.0,
        beta: 1.0,
        cross_weight: 0.0,
    };
    train(&objective, &MonoSource { sentences, term }, &[(side, vocab)], config)
}
