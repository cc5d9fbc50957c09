//! Vocabularies, sentence-aligned corpora, Pharaoh word alignments and
//! lexicon extraction.
//!
//! Input text is expected to be tokenized already: tokens are split on
//! whitespace and, unless disabled, lowercased. Tokens missing from a
//! vocabulary are encoded as [`OOV`], which keeps positions (and therefore
//! alignment indices) stable; trainers never use the sentinel as a center or
//! a context word.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sentinel id for tokens absent from the vocabulary.
pub const OOV: u32 = u32::MAX;

/// Surface form written for [`OOV`] positions.
pub const OOV_TOKEN: &str = "<unk>";

pub fn tokenize(line: &str, lowercase: bool) -> impl Iterator<Item = Cow<'_, str>> {
    line.split_whitespace().map(move |tok| {
        if lowercase && tok.chars().any(char::is_uppercase) {
            Cow::Owned(tok.to_lowercase())
        } else {
            Cow::Borrowed(tok)
        }
    })
}

/// Bijective word/id map with token counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: HashMap<String, u32>,
    counts: Vec<u64>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Counts tokens over `lines` and keeps words seen at least `min_count`
    /// times. Ids go by descending count; equal counts keep first-occurrence
    /// order.
    pub fn build<I, S>(lines: I, min_count: u64, lowercase: bool) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if min_count < 1 {
            return Err(Error::invalid("min_count must be >= 1"));
        }
        let mut order: Vec<String> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut freq: Vec<u64> = Vec::new();
        let mut total = 0u64;
        for line in lines {
            for tok in tokenize(line.as_ref(), lowercase) {
                total += 1;
                match seen.get(tok.as_ref()) {
                    Some(&slot) => freq[slot] += 1,
                    None => {
                        seen.insert(tok.to_string(), order.len());
                        order.push(tok.into_owned());
                        freq.push(1);
                    }
                }
            }
        }
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        let mut kept: Vec<usize> = (0..order.len()).filter(|&i| freq[i] >= min_count).collect();
        // stable sort keeps first-occurrence order among ties
        kept.sort_by(|&a, &b| freq[b].cmp(&freq[a]));
        let pairs = kept
            .into_iter()
            .map(|i| (std::mem::take(&mut order[i]), freq[i]))
            .collect();
        Self::from_counts(pairs, total)
    }

    /// Builds a vocabulary from `(word, count)` rows in id order.
    pub fn from_counts(rows: Vec<(String, u64)>, total_tokens: u64) -> Result<Self> {
        let mut words = Vec::with_capacity(rows.len());
        let mut counts = Vec::with_capacity(rows.len());
        let mut ids = HashMap::with_capacity(rows.len());
        for (word, count) in rows {
            if ids.insert(word.clone(), words.len() as u32).is_some() {
                return Err(Error::invalid(format!("duplicate vocabulary word '{word}'")));
            }
            words.push(word);
            counts.push(count);
        }
        let sum: u64 = counts.iter().sum();
        if total_tokens < sum {
            return Err(Error::invalid("total_tokens smaller than the sum of word counts"));
        }
        Ok(Self {
            words,
            ids,
            counts,
            total_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Encodes one line; unknown tokens become [`OOV`].
    pub fn encode(&self, line: &str, lowercase: bool) -> Vec<u32> {
        tokenize(line, lowercase)
            .map(|tok| self.id(&tok).unwrap_or(OOV))
            .collect()
    }

    pub fn decode(&self, ids: &[u32]) -> String {
        ids.iter()
            .map(|&id| if id == OOV { OOV_TOKEN } else { self.word(id) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Writes `word<TAB>count` rows preceded by a `#total<TAB>n` line.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let res: std::io::Result<()> = (|| {
            writeln!(out, "#total\t{}", self.total_tokens)?;
            for (w, c) in self.words.iter().zip(&self.counts) {
                writeln!(out, "{w}\t{c}")?;
            }
            out.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: &Path) -> Result<Self> {
        let lines = read_lines(path)?;
        let ctx = path.display().to_string();
        let mut total = None;
        let mut rows = Vec::new();
        for (i, line) in lines.iter().enumerate() {
            let mut parts = line.split('\t');
            let (Some(word), Some(num), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(&ctx, i + 1, "expected two tab-separated fields"));
            };
            let n: u64 = num
                .trim()
                .parse()
                .map_err(|_| Error::parse(&ctx, i + 1, format!("bad count '{num}'")))?;
            if i == 0 && word == "#total" {
                total = Some(n);
            } else {
                rows.push((word.to_string(), n));
            }
        }
        let total = total.unwrap_or_else(|| rows.iter().map(|r| r.1).sum());
        Self::from_counts(rows, total)
    }
}

/// One sentence pair encoded to ids (possibly containing [`OOV`]).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentencePair {
    pub src: Vec<u32>,
    pub tgt: Vec<u32>,
}

/// Source position to target position link, zero-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignmentLink {
    pub src_pos: u32,
    pub tgt_pos: u32,
}

impl AlignmentLink {
    pub fn new(src_pos: u32, tgt_pos: u32) -> Self {
        Self { src_pos, tgt_pos }
    }
}

/// Parses one Pharaoh-format line (`"0-0 1-2 ..."`). `line_no` is 1-based
/// and only used for error messages.
pub fn parse_pharaoh_line(line: &str, line_no: usize) -> Result<Vec<AlignmentLink>> {
    line.split_whitespace()
        .map(|tok| {
            let bad = || Error::parse("alignment", line_no, format!("malformed link '{tok}'"));
            let (i, j) = tok.split_once('-').ok_or_else(bad)?;
            let i: u32 = i.parse().map_err(|_| bad())?;
            let j: u32 = j.parse().map_err(|_| bad())?;
            Ok(AlignmentLink::new(i, j))
        })
        .collect()
}

pub fn format_pharaoh_line(links: &[AlignmentLink]) -> String {
    links
        .iter()
        .map(|l| format!("{}-{}", l.src_pos, l.tgt_pos))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelCorpus {
    vocab_src: Vocabulary,
    vocab_tgt: Vocabulary,
    pairs: Vec<SentencePair>,
    alignments: Option<Vec<Vec<AlignmentLink>>>,
}

impl ParallelCorpus {
    /// Validates ids and links before taking ownership.
    pub fn new(
        vocab_src: Vocabulary,
        vocab_tgt: Vocabulary,
        pairs: Vec<SentencePair>,
        alignments: Option<Vec<Vec<AlignmentLink>>>,
    ) -> Result<Self> {
        for (n, pair) in pairs.iter().enumerate() {
            let bad_src = pair.src.iter().any(|&id| id != OOV && id as usize >= vocab_src.len());
            let bad_tgt = pair.tgt.iter().any(|&id| id != OOV && id as usize >= vocab_tgt.len());
            if bad_src || bad_tgt {
                return Err(Error::invalid(format!("pair {n} holds an id outside its vocabulary")));
            }
        }
        if let Some(aligns) = &alignments {
            if aligns.len() != pairs.len() {
                return Err(Error::LineCountMismatch {
                    left_name: "sentence pairs".into(),
                    left: pairs.len(),
                    right_name: "alignment lines".into(),
                    right: aligns.len(),
                });
            }
            for (n, (links, pair)) in aligns.iter().zip(&pairs).enumerate() {
                check_links(links, pair, n + 1)?;
            }
        }
        Ok(Self {
            vocab_src,
            vocab_tgt,
            pairs,
            alignments,
        })
    }

    /// Encodes raw line pairs. `align` must have one entry per pair if given.
    pub fn from_lines<S: AsRef<str>>(
        src: &[S],
        tgt: &[S],
        align: Option<&[S]>,
        vocab_src: Vocabulary,
        vocab_tgt: Vocabulary,
        lowercase: bool,
    ) -> Result<Self> {
        if src.len() != tgt.len() {
            return Err(Error::LineCountMismatch {
                left_name: "source".into(),
                left: src.len(),
                right_name: "target".into(),
                right: tgt.len(),
            });
        }
        let pairs: Vec<SentencePair> = src
            .iter()
            .zip(tgt)
            .map(|(s, t)| SentencePair {
                src: vocab_src.encode(s.as_ref(), lowercase),
                tgt: vocab_tgt.encode(t.as_ref(), lowercase),
            })
            .collect();
        let alignments = match align {
            None => None,
            Some(lines) => {
                if lines.len() != src.len() {
                    return Err(Error::LineCountMismatch {
                        left_name: "sentence".into(),
                        left: src.len(),
                        right_name: "alignment".into(),
                        right: lines.len(),
                    });
                }
                let parsed = lines
                    .iter()
                    .enumerate()
                    .map(|(i, l)| parse_pharaoh_line(l.as_ref(), i + 1))
                    .collect::<Result<Vec<_>>>()?;
                Some(parsed)
            }
        };
        Self::new(vocab_src, vocab_tgt, pairs, alignments)
    }

    /// Replaces the alignment set, re-validating every link.
    pub fn with_alignments(self, alignments: Option<Vec<Vec<AlignmentLink>>>) -> Result<Self> {
        Self::new(self.vocab_src, self.vocab_tgt, self.pairs, alignments)
    }

    pub fn vocab_src(&self) -> &Vocabulary {
        &self.vocab_src
    }

    pub fn vocab_tgt(&self) -> &Vocabulary {
        &self.vocab_tgt
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn alignments(&self) -> Option<&[Vec<AlignmentLink>]> {
        self.alignments.as_deref()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Copy of this corpus with source and target exchanged (links transposed).
    pub fn swapped(&self) -> Self {
        Self {
            vocab_src: self.vocab_tgt.clone(),
            vocab_tgt: self.vocab_src.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|p| SentencePair {
                    src: p.tgt.clone(),
                    tgt: p.src.clone(),
                })
                .collect(),
            alignments: self.alignments.as_ref().map(|a| {
                a.iter()
                    .map(|links| links.iter().map(|l| AlignmentLink::new(l.tgt_pos, l.src_pos)).collect())
                    .collect()
            }),
        }
    }

    /// Writes source, target and (if present and requested) alignment files.
    pub fn write(&self, src_path: &Path, tgt_path: &Path, align_path: Option<&Path>) -> Result<()> {
        write_lines(src_path, self.pairs.iter().map(|p| self.vocab_src.decode(&p.src)))?;
        write_lines(tgt_path, self.pairs.iter().map(|p| self.vocab_tgt.decode(&p.tgt)))?;
        if let (Some(path), Some(aligns)) = (align_path, &self.alignments) {
            write_lines(path, aligns.iter().map(|l| format_pharaoh_line(l)))?;
        }
        Ok(())
    }
}

fn check_links(links: &[AlignmentLink], pair: &SentencePair, line_no: usize) -> Result<()> {
    for l in links {
        if l.src_pos as usize >= pair.src.len() || l.tgt_pos as usize >= pair.tgt.len() {
            return Err(Error::parse(
                "alignment",
                line_no,
                format!(
                    "link {}-{} out of range for sentence lengths {}/{}",
                    l.src_pos,
                    l.tgt_pos,
                    pair.src.len(),
                    pair.tgt.len()
                ),
            ));
        }
    }
    Ok(())
}

/// Loads a sentence-aligned corpus from disk, encoding against the given
/// vocabularies.
pub fn load_parallel_corpus(
    src_path: &Path,
    tgt_path: &Path,
    align_path: Option<&Path>,
    vocab_src: Vocabulary,
    vocab_tgt: Vocabulary,
    lowercase: bool,
) -> Result<ParallelCorpus> {
    let src = read_lines(src_path)?;
    let tgt = read_lines(tgt_path)?;
    if src.len() != tgt.len() {
        return Err(Error::LineCountMismatch {
            left_name: src_path.display().to_string(),
            left: src.len(),
            right_name: tgt_path.display().to_string(),
            right: tgt.len(),
        });
    }
    let align = match align_path {
        Some(p) => {
            let lines = read_lines(p)?;
            if lines.len() != src.len() {
                return Err(Error::LineCountMismatch {
                    left_name: src_path.display().to_string(),
                    left: src.len(),
                    right_name: p.display().to_string(),
                    right: lines.len(),
                });
            }
            Some(lines)
        }
        None => None,
    };
    ParallelCorpus::from_lines(&src, &tgt, align.as_deref(), vocab_src, vocab_tgt, lowercase)
}

/// Set of `(source id, target id)` translation pairs, sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TranslationLexicon {
    entries: Vec<(u32, u32)>,
}

impl TranslationLexicon {
    pub fn new(mut entries: Vec<(u32, u32)>) -> Self {
        entries.sort_unstable();
        entries.dedup();
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, src: u32, tgt: u32) -> bool {
        self.entries.binary_search(&(src, tgt)).is_ok()
    }

    pub fn word_pairs(&self, vocab_src: &Vocabulary, vocab_tgt: &Vocabulary) -> Vec<(String, String)> {
        self.entries
            .iter()
            .map(|&(a, b)| (vocab_src.word(a).to_string(), vocab_tgt.word(b).to_string()))
            .collect()
    }
}

/// Mutual-best lexicon: `(a, b)` is kept when `b` is the unique most
/// frequent alignment partner of `a` and `a` the unique most frequent partner
/// of `b`. A word whose maximum is tied contributes nothing.
pub fn extract_bilingual_lexicon(corpus: &ParallelCorpus) -> Result<TranslationLexicon> {
    let aligns = corpus
        .alignments()
        .ok_or_else(|| Error::invalid("lexicon extraction needs word alignments"))?;
    let mut cooc: HashMap<(u32, u32), u64> = HashMap::new();
    for (pair, links) in corpus.pairs().iter().zip(aligns) {
        for l in links {
            let a = pair.src[l.src_pos as usize];
            let b = pair.tgt[l.tgt_pos as usize];
            if a != OOV && b != OOV {
                *cooc.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    // (best partner, best count, tied)
    let mut best_src: HashMap<u32, (u32, u64, bool)> = HashMap::new();
    let mut best_tgt: HashMap<u32, (u32, u64, bool)> = HashMap::new();
    fn offer(slot: &mut HashMap<u32, (u32, u64, bool)>, key: u32, partner: u32, n: u64) {
        let e = slot.entry(key).or_insert((partner, 0, false));
        if n > e.1 {
            *e = (partner, n, false);
        } else if n == e.1 && partner != e.0 {
            e.2 = true;
        }
    }
    for (&(a, b), &n) in &cooc {
        offer(&mut best_src, a, b, n);
        offer(&mut best_tgt, b, a, n);
    }
    let entries = best_src
        .iter()
        .filter(|(_, &(_, _, tied))| !tied)
        .filter_map(|(&a, &(b, _, _))| match best_tgt.get(&b) {
            Some(&(back, _, false)) if back == a => Some((a, b)),
            _ => None,
        })
        .collect();
    Ok(TranslationLexicon::new(entries))
}

/// Reads `src<TAB>tgt` lines. Blank lines are skipped.
pub fn read_lexicon_tsv(path: &Path) -> Result<Vec<(String, String)>> {
    let ctx = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                out.push((a.trim().to_string(), b.trim().to_string()))
            }
            _ => return Err(Error::parse(&ctx, i + 1, "expected 'src<TAB>tgt'")),
        }
    }
    Ok(out)
}

pub fn write_lexicon_tsv(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    write_lines(path, pairs.iter().map(|(a, b)| format!("{a}\t{b}")))
}

/// All lines of a UTF-8 text file.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

/// Writes each item as one line.
pub fn write_lines<I, S>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let res: std::io::Result<()> = (|| {
        for l in lines {
            out.write_all(l.as_ref().as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}
