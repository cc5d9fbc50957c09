//! Pseudo-bilingual documents: each aligned document pair is merged into a
//! single token stream and one skip-gram model is trained over the union of
//! both vocabularies.

use crate::corpus::{ParallelCorpus, Vocabulary, OOV};
use crate::embedstore::{BilingualEmbedding, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::sgcore::{train_monolingual, SGDConfig, Side, TrainStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TaggedToken {
    pub side: Side,
    pub id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedDocument {
    pub tokens: Vec<TaggedToken>,
    pub src_len: usize,
    pub tgt_len: usize,
}

/// Whether 1-indexed merged position `pos` takes a token of the shorter
/// document, given `r = floor(p / q)`. For `r >= 2` these are the multiples
/// of `r`. For `r = 1` every position would qualify, so the two documents
/// alternate instead, shorter one first.
pub fn is_short_slot(pos: usize, r: usize) -> bool {
    if r == 1 {
        pos % 2 == 1
    } else {
        pos.is_multiple_of(r)
    }
}

/// Interleaves `short` into `long` following [`is_short_slot`]; both keep
/// their internal order and leftover `long` tokens fill the tail.
pub fn interleave<T: Copy>(long: &[T], short: &[T]) -> Vec<T> {
    let (p, q) = (long.len(), short.len());
    debug_assert!(p >= q && q >= 1);
    let r = p / q;
    let mut out = Vec::with_capacity(p + q);
    let (mut e, mut f) = (long.iter(), short.iter());
    for pos in 1..=p + q {
        let next = if is_short_slot(pos, r) { f.next().or_else(|| e.next()) } else { e.next() };
        out.push(*next.expect("both streams sized to p + q"));
    }
    out
}

/// Merges a source and a target document. The longer one plays the role
/// of the base stream; on equal lengths the source does.
pub fn merge_documents(src: &[u32], tgt: &[u32]) -> Result<MergedDocument> {
    if src.is_empty() || tgt.is_empty() {
        return Err(Error::invalid("cannot merge an empty document"));
    }
    let tag = |side| move |&id: &u32| TaggedToken { side, id };
    let s: Vec<TaggedToken> = src.iter().map(tag(Side::Src)).collect();
    let t: Vec<TaggedToken> = tgt.iter().map(tag(Side::Tgt)).collect();
    let tokens = if s.len() >= t.len() { interleave(&s, &t) } else { interleave(&t, &s) };
    Ok(MergedDocument {
        tokens,
        src_len: src.len(),
        tgt_len: tgt.len(),
    })
}

/// Source words keep their ids; target ids are shifted past the source
/// vocabulary. The tagged names never leave this module.
fn union_vocabulary(vs: &Vocabulary, vt: &Vocabulary) -> Result<Vocabulary> {
    let rows = vs
        .words()
        .iter()
        .zip(vs.counts())
        .map(|(w, &c)| (format!("0\u{1}{w}"), c))
        .chain(vt.words().iter().zip(vt.counts()).map(|(w, &c)| (format!("1\u{1}{w}"), c)))
        .collect();
    Vocabulary::from_counts(rows, vs.total_tokens() + vt.total_tokens())
}

#[derive(Debug, Clone)]
pub struct BivcdOutput {
    pub embedding: BilingualEmbedding,
    pub stats: TrainStats,
    /// Tokens across all merged documents.
    pub merged_tokens: usize,
}

pub fn train_bivcd_detailed(corpus: &ParallelCorpus, config: &SGDConfig) -> Result<BivcdOutput> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vs = corpus.vocab_src();
    let vt = corpus.vocab_tgt();
    let shift = vs.len() as u32;
    let union = union_vocabulary(vs, vt)?;
    let mut docs = Vec::with_capacity(corpus.len());
    for p in corpus.pairs() {
        if p.src.is_empty() || p.tgt.is_empty() {
            continue;
        }
        let merged = merge_documents(&p.src, &p.tgt)?;
        docs.push(
            merged
                .tokens
                .iter()
                .map(|t| match (t.side, t.id) {
                    (_, OOV) => OOV,
                    (Side::Src, id) => id,
                    (Side::Tgt, id) => id + shift,
                })
                .collect::<Vec<u32>>(),
        );
    }
    let merged_tokens = docs.iter().map(Vec::len).sum();
    let out = train_monolingual(&docs, &union, Side::Src, config)?;
    let dim = config.dim;
    let all = out.matrices[0].data();
    let split = vs.len() * dim;
    let src = EmbeddingMatrix::from_vocab(vs, dim, all[..split].to_vec())?;
    let tgt = EmbeddingMatrix::from_vocab(vt, dim, all[split..].to_vec())?;
    Ok(BivcdOutput {
        embedding: BilingualEmbedding::new(src, tgt)?,
        stats: out.stats,
        merged_tokens,
    })
}

pub fn train_bivcd(corpus: &ParallelCorpus, config: &SGDConfig) -> Result<BilingualEmbedding> {
    Ok(train_bivcd_detailed(corpus, config)?.embedding)
}
