//! Bilingual skip-gram driven by word alignment links.
//!
//! Each sentence pair contributes monolingual skip-gram tasks on both sides.
//! Each alignment link `(s, t)` additionally lets the target word at `t`
//! predict the source neighbours of `s`, and the source word at `s` predict
//! the target neighbours of `t`. Neighbourhoods use the same dynamic window
//! as the monolingual contexts and never include the linked word itself.

use crate::corpus::ParallelCorpus;
use crate::embedstore::BilingualEmbedding;
use crate::error::{Error, Result};
use crate::sgcore::{self, neighbours, EmitContext, ObjectiveSpec, SGDConfig, Side, Task, TaskSource, Term, TrainOutput};

const SRC: u8 = 0;
const TGT: u8 = 1;

struct BiskipSource<'a> {
    corpus: &'a ParallelCorpus,
    objective: ObjectiveSpec,
}

impl TaskSource for BiskipSource<'_> {
    fn units(&self) -> usize {
        self.corpus.len()
    }

    fn emit(&self, unit: usize, ctx: &mut EmitContext<'_>, out: &mut Vec<Task>) {
        let pair = &self.corpus.pairs()[unit];
        let src_term = Term::Mono(Side::Src);
        let tgt_term = Term::Mono(Side::Tgt);
        let keep_src = ctx.keep_mask(SRC, src_term, &pair.src);
        let keep_tgt = ctx.keep_mask(TGT, tgt_term, &pair.tgt);
        if self.objective.alpha > 0.0 {
            ctx.skipgram(&pair.src, &keep_src, SRC, src_term, out);
        }
        if self.objective.beta > 0.0 {
            ctx.skipgram(&pair.tgt, &keep_tgt, TGT, tgt_term, out);
        }
        if self.objective.cross_weight == 0.0 {
            return;
        }
        let links = match self.corpus.alignments() {
            Some(a) => &a[unit],
            None => return,
        };
        for link in links {
            let (s, t) = (link.src_pos as usize, link.tgt_pos as usize);
            if !keep_src[s] || !keep_tgt[t] {
                continue;
            }
            let r = ctx.radius(Term::Cross);
            for j in neighbours(s, r, pair.src.len()) {
                if keep_src[j] {
                    out.push(Task {
                        center_slot: TGT,
                        center: pair.tgt[t],
                        context_slot: SRC,
                        context: pair.src[j],
                        term: Term::Cross,
                    });
                }
            }
            let r = ctx.radius(Term::Cross);
            for j in neighbours(t, r, pair.tgt.len()) {
                if keep_tgt[j] {
                    out.push(Task {
                        center_slot: SRC,
                        center: pair.src[s],
                        context_slot: TGT,
                        context: pair.tgt[j],
                        term: Term::Cross,
                    });
                }
            }
        }
    }
}

/// Trains both spaces and returns the raw training output (matrices in
/// source, target order plus per-epoch statistics).
pub fn train_biskip_detailed(
    corpus: &ParallelCorpus,
    config: &SGDConfig,
    objective: &ObjectiveSpec,
) -> Result<TrainOutput> {
    if corpus.alignments().is_none() {
        return Err(Error::invalid("biskip needs word alignments"));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let source = BiskipSource {
        corpus,
        objective: *objective,
    };
    sgcore::train(
        objective,
        &source,
        &[(Side::Src, corpus.vocab_src()), (Side::Tgt, corpus.vocab_tgt())],
        config,
    )
}

pub fn train_biskip(corpus: &ParallelCorpus, config: &SGDConfig, objective: &ObjectiveSpec) -> Result<BilingualEmbedding> {
    let mut out = train_biskip_detailed(corpus, config, objective)?.matrices;
    let tgt = out.pop().expect("two spaces");
    let src = out.pop().expect("two spaces");
    BilingualEmbedding::new(src, tgt)
}
