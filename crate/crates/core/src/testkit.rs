//! Synthetic bilingual data with known ground truth.
//!
//! A hidden "concept" sequence is sampled per sentence and rendered twice:
//! concept `i` is the word `e{i}` in the first language and `f{sigma(i)}` in
//! the second, with `sigma` a random bijection that doubles as the gold
//! lexicon. Concepts follow a Zipf profile, every concept belongs to one
//! topic, and each sentence draws from its topic's concepts and from a short
//! list of preferred successors per concept, which gives skip-gram
//! something to learn.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{format_pharaoh_line, write_lexicon_tsv, write_lines, AlignmentLink, ParallelCorpus, TranslationLexicon, Vocabulary};
use crate::error::{Error, Result};
use crate::evalsuite::LabeledDocumentSet;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Words per language.
    pub vocab_size: usize,
    pub sentence_count: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub topic_count: usize,
    /// Chance that a rendered target word is replaced by a random one.
    pub noise_rate: f64,
    pub seed: u64,
    /// Every concept is forced to occur at least this often.
    pub min_occurrences: usize,
    pub zipf_exponent: f64,
    /// Chance a concept is drawn from the sentence topic rather than the
    /// whole vocabulary.
    pub topic_focus: f64,
    /// Chance the next concept is a preferred successor of the previous one.
    pub chain_prob: f64,
    pub successors: usize,
    /// Documents per side for classification data.
    pub doc_count: usize,
    pub doc_min_len: usize,
    pub doc_max_len: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            vocab_size: 500,
            sentence_count: 20_000,
            min_len: 5,
            max_len: 15,
            topic_count: 2,
            noise_rate: 0.05,
            seed: 42,
            min_occurrences: 5,
            zipf_exponent: 1.0,
            topic_focus: 0.8,
            chain_prob: 0.5,
            successors: 3,
            doc_count: 2000,
            doc_min_len: 20,
            doc_max_len: 60,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.vocab_size < 10 {
            return Err(Error::invalid("vocab_size must be >= 10"));
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return Err(Error::invalid("noise_rate must be in [0, 1)"));
        }
        if self.min_len < 1 || self.min_len > self.max_len || self.doc_min_len < 1 || self.doc_min_len > self.doc_max_len {
            return Err(Error::invalid("length ranges must satisfy 1 <= min <= max"));
        }
        if self.topic_count < 1 || self.topic_count > self.vocab_size {
            return Err(Error::invalid("topic_count must be in [1, vocab_size]"));
        }
        for p in [self.topic_focus, self.chain_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("probabilities must lie in [0, 1]"));
            }
        }
        if !(self.zipf_exponent >= 0.0) {
            return Err(Error::invalid("zipf exponent must be >= 0"));
        }
        Ok(())
    }

    /// `key=value` lines describing the generator settings.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "generator=xlembed-synth");
        let _ = writeln!(s, "vocab_size={}", self.vocab_size);
        let _ = writeln!(s, "sentence_count={}", self.sentence_count);
        let _ = writeln!(s, "sentence_length={}-{}", self.min_len, self.max_len);
        let _ = writeln!(s, "topic_count={}", self.topic_count);
        let _ = writeln!(s, "noise_rate={}", self.noise_rate);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "min_occurrences={}", self.min_occurrences);
        let _ = writeln!(s, "zipf_exponent={}", self.zipf_exponent);
        let _ = writeln!(s, "topic_focus={}", self.topic_focus);
        let _ = writeln!(s, "chain_prob={}", self.chain_prob);
        let _ = writeln!(s, "successors={}", self.successors);
        let _ = writeln!(s, "doc_count={}", self.doc_count);
        let _ = writeln!(s, "doc_length={}-{}", self.doc_min_len, self.doc_max_len);
        s
    }
}

pub fn src_word(concept: usize) -> String {
    format!("e{concept}")
}

pub fn tgt_word(id: usize) -> String {
    format!("f{id}")
}

/// Random streams of one generator run.
const WORLD: u64 = 0;
const PARALLEL: u64 = 1;
const CLDC_TRAIN: u64 = 2;
const CLDC_TEST: u64 = 3;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn draw(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u = rng.random::<f64>() * cum[cum.len() - 1];
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

/// Fixed structure shared by every corpus drawn from one spec.
#[derive(Debug, Clone)]
pub struct SynthWorld {
    spec: SynthSpec,
    /// `sigma[i]` is the target word id of concept `i`.
    sigma: Vec<usize>,
    topic_of: Vec<usize>,
    topic_members: Vec<Vec<usize>>,
    topic_cum: Vec<Vec<f64>>,
    global_cum: Vec<f64>,
    successors: Vec<Vec<usize>>,
}

impl SynthWorld {
    pub fn new(spec: &SynthSpec) -> Result<Self> {
        spec.validate()?;
        let v = spec.vocab_size;
        let mut r = rng(spec.seed, WORLD);
        let mut sigma: Vec<usize> = (0..v).collect();
        sigma.shuffle(&mut r);
        let zipf: Vec<f64> = (0..v).map(|i| 1.0 / ((i + 1) as f64).powf(spec.zipf_exponent)).collect();
        // round-robin topics keep topic masses comparable
        let topic_of: Vec<usize> = (0..v).map(|i| i % spec.topic_count).collect();
        let topic_members: Vec<Vec<usize>> = (0..spec.topic_count)
            .map(|t| (0..v).filter(|&i| topic_of[i] == t).collect())
            .collect();
        let topic_cum = topic_members
            .iter()
            .map(|m| cumulative(m.iter().map(|&i| zipf[i])))
            .collect();
        let successors = (0..v)
            .map(|i| {
                let m = &topic_members[topic_of[i]];
                (0..spec.successors).map(|_| m[r.random_range(0..m.len())]).collect()
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            sigma,
            topic_of,
            topic_members,
            topic_cum,
            global_cum: cumulative(zipf.into_iter()),
            successors,
        })
    }

    pub fn spec(&self) -> &SynthSpec {
        &self.spec
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn topic_of(&self, concept: usize) -> usize {
        self.topic_of[concept]
    }

    fn draw_concept(&self, topic: usize, r: &mut ChaCha8Rng) -> usize {
        if r.random::<f64>() < self.spec.topic_focus {
            self.topic_members[topic][draw(&self.topic_cum[topic], r)]
        } else {
            draw(&self.global_cum, r)
        }
    }

    /// One concept sequence of length `len` about `topic`.
    pub fn sample_sequence(&self, topic: usize, len: usize, r: &mut ChaCha8Rng) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(len);
        for _ in 0..len {
            let succ = out.last().map(|&p| &self.successors[p]).filter(|s| !s.is_empty());
            let next = match succ {
                Some(s) if r.random::<f64>() < self.spec.chain_prob => s[r.random_range(0..s.len())],
                _ => self.draw_concept(topic, r),
            };
            out.push(next);
        }
        out
    }

    fn render_src(&self, seq: &[usize]) -> String {
        seq.iter().map(|&c| src_word(c)).collect::<Vec<_>>().join(" ")
    }

    /// Target rendering with noise substitutions; `counts` tracks target word
    /// counts so no word is pushed below the occurrence floor.
    fn render_tgt(&self, seq: &[usize], counts: &mut [usize], r: &mut ChaCha8Rng) -> Vec<usize> {
        seq.iter()
            .map(|&c| {
                let gold = self.sigma[c];
                if self.spec.noise_rate > 0.0 && r.random::<f64>() < self.spec.noise_rate {
                    let sub = r.random_range(0..self.spec.vocab_size);
                    if sub != gold && counts[gold] > self.spec.min_occurrences {
                        counts[gold] -= 1;
                        counts[sub] += 1;
                        return sub;
                    }
                }
                gold
            })
            .collect()
    }

    pub fn gold_pairs(&self) -> Vec<(String, String)> {
        (0..self.spec.vocab_size)
            .map(|i| (src_word(i), tgt_word(self.sigma[i])))
            .collect()
    }
}

/// Generated parallel data: lines as written to disk plus the encoded corpus
/// and gold lexicon.
#[derive(Debug, Clone)]
pub struct SynthParallel {
    pub src_lines: Vec<String>,
    pub tgt_lines: Vec<String>,
    pub align_lines: Vec<String>,
    pub corpus: ParallelCorpus,
    pub lexicon: TranslationLexicon,
    pub gold_pairs: Vec<(String, String)>,
    pub manifest: String,
}

impl SynthParallel {
    /// Writes `src.txt`, `tgt.txt`, `align.txt`, `lexicon.tsv` and
    /// `manifest.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_lines(&dir.join("src.txt"), &self.src_lines)?;
        write_lines(&dir.join("tgt.txt"), &self.tgt_lines)?;
        write_lines(&dir.join("align.txt"), &self.align_lines)?;
        write_lexicon_tsv(&dir.join("lexicon.tsv"), &self.gold_pairs)?;
        let path = dir.join("manifest.txt");
        std::fs::write(&path, &self.manifest).map_err(|e| Error::io(&path, e))
    }
}

/// Raises every concept to `min_occurrences` by overwriting positions held
/// by concepts with occurrences to spare.
fn ensure_coverage(sentences: &mut [Vec<usize>], spec: &SynthSpec, r: &mut ChaCha8Rng) {
    let mut counts = vec![0usize; spec.vocab_size];
    for s in sentences.iter() {
        for &c in s {
            counts[c] += 1;
        }
    }
    let floor = spec.min_occurrences;
    let n_sent = sentences.len();
    for c in 0..spec.vocab_size {
        while counts[c] < floor {
            let si = r.random_range(0..n_sent);
            let pi = r.random_range(0..sentences[si].len());
            let donor = sentences[si][pi];
            if donor != c && counts[donor] > floor {
                counts[donor] -= 1;
                counts[c] += 1;
                sentences[si][pi] = c;
            }
        }
    }
}

/// Parallel corpus of `sentence_count` pairs with identity alignments. If
/// the requested sentences cannot hold `min_occurrences` of every concept,
/// more sentences are generated until they can.
pub fn generate_parallel(spec: &SynthSpec) -> Result<SynthParallel> {
    let world = SynthWorld::new(spec)?;
    let mut r = rng(spec.seed, PARALLEL);
    let need = spec.vocab_size * spec.min_occurrences * 2;
    let mut sentences: Vec<Vec<usize>> = Vec::with_capacity(spec.sentence_count);
    let mut tokens = 0;
    while sentences.len() < spec.sentence_count.max(1) || tokens < need {
        let topic = r.random_range(0..spec.topic_count);
        let len = r.random_range(spec.min_len..=spec.max_len);
        let s = world.sample_sequence(topic, len, &mut r);
        tokens += s.len();
        sentences.push(s);
    }
    ensure_coverage(&mut sentences, spec, &mut r);

    let mut tgt_counts = vec![0usize; spec.vocab_size];
    for s in &sentences {
        for &c in s {
            tgt_counts[world.sigma[c]] += 1;
        }
    }
    let mut src_lines = Vec::with_capacity(sentences.len());
    let mut tgt_lines = Vec::with_capacity(sentences.len());
    let mut align_lines = Vec::with_capacity(sentences.len());
    for s in &sentences {
        let t = world.render_tgt(s, &mut tgt_counts, &mut r);
        src_lines.push(world.render_src(s));
        tgt_lines.push(t.iter().map(|&w| tgt_word(w)).collect::<Vec<_>>().join(" "));
        let links: Vec<AlignmentLink> = (0..s.len() as u32).map(|k| AlignmentLink::new(k, k)).collect();
        align_lines.push(format_pharaoh_line(&links));
    }

    let vs = Vocabulary::build(&src_lines, 1, false)?;
    let vt = Vocabulary::build(&tgt_lines, 1, false)?;
    let gold_pairs = world.gold_pairs();
    let lexicon = TranslationLexicon::new(
        gold_pairs
            .iter()
            .filter_map(|(a, b)| Some((vs.id(a)?, vt.id(b)?)))
            .collect(),
    );
    let corpus = ParallelCorpus::from_lines(&src_lines, &tgt_lines, Some(&align_lines), vs, vt, false)?;
    Ok(SynthParallel {
        src_lines,
        tgt_lines,
        align_lines,
        corpus,
        lexicon,
        gold_pairs,
        manifest: spec.manifest(),
    })
}

/// Topic-labelled documents: training documents rendered in the first
/// language and test documents (drawn independently) in the second.
pub fn generate_cldc(spec: &SynthSpec) -> Result<(LabeledDocumentSet, LabeledDocumentSet)> {
    if spec.topic_count < 2 {
        return Err(Error::invalid("classification data needs topic_count >= 2"));
    }
    let world = SynthWorld::new(spec)?;
    let docs = |stream: u64, target: bool| -> Result<LabeledDocumentSet> {
        let mut r = rng(spec.seed, stream);
        let mut counts = vec![usize::MAX / 2; spec.vocab_size];
        let mut out = Vec::with_capacity(spec.doc_count);
        for _ in 0..spec.doc_count {
            let topic = r.random_range(0..spec.topic_count);
            let len = r.random_range(spec.doc_min_len..=spec.doc_max_len);
            let seq = world.sample_sequence(topic, len, &mut r);
            let tokens = if target {
                world
                    .render_tgt(&seq, &mut counts, &mut r)
                    .into_iter()
                    .map(tgt_word)
                    .collect()
            } else {
                seq.into_iter().map(src_word).collect()
            };
            out.push((format!("topic{topic}"), tokens));
        }
        LabeledDocumentSet::new(out)
    };
    Ok((docs(CLDC_TRAIN, false)?, docs(CLDC_TEST, true)?))
}
