use std::ffi::OsString;
use std::path::{Path, PathBuf};

use xlembed::bicca::{train_bicca, RIDGE};
use xlembed::bicvm::{train_bicvm, BicvmConfig};
use xlembed::biskip::train_biskip;
use xlembed::bivcd::train_bivcd;
use xlembed::corpus::{
    extract_bilingual_lexicon, load_parallel_corpus, read_lexicon_tsv, read_lines, write_lexicon_tsv, write_lines,
    ParallelCorpus, Vocabulary,
};
use xlembed::embedstore::{knn, knn_cross, pca_project, write_pca_tsv, BilingualEmbedding, EmbeddingMatrix};
use xlembed::evalsuite::{
    build_gold_dictionary, eval_cldc, eval_dictionary_induction, eval_word_similarity, paired_outcomes,
    read_synset_tsv, EvalReport, GoldDictionary, LabeledDocumentSet, WordSimDataset,
};
use xlembed::sgcore::{train_monolingual, ObjectiveSpec, SGDConfig, Side};
use xlembed::stats::{mcnemar_test, steiger_test, McNemarMethod, MCNEMAR_EXACT_CUTOFF};
use xlembed::testkit::{generate_cldc, generate_parallel, SynthSpec};
use xlembed::Error;

use crate::args::*;
use crate::manifest::Manifest;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Vocab(a) => vocab(a),
        Command::ExtractLexicon(a) => extract_lexicon(a),
        Command::Train(a) => train(a),
        Command::EvalSim(a) => eval_sim(a),
        Command::EvalDict(a) => eval_dict(a),
        Command::EvalCldc(a) => eval_cldc_cmd(a),
        Command::Knn(a) => knn_cmd(a),
        Command::Pca(a) => pca(a),
        Command::Synth(a) => synth(a),
        Command::Stats(a) => match a.test {
            StatsTest::Steiger(s) => steiger(s),
            StatsTest::Mcnemar(m) => mcnemar(m),
        },
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

fn load_corpus(src: &Path, tgt: &Path, align: Option<&Path>, min_count: u64, lowercase: bool) -> Result<ParallelCorpus> {
    let vs = Vocabulary::build(&read_lines(src)?, min_count, lowercase)?;
    let vt = Vocabulary::build(&read_lines(tgt)?, min_count, lowercase)?;
    Ok(load_parallel_corpus(src, tgt, align, vs, vt, lowercase)?)
}

fn vocab(a: VocabArgs) -> Result<()> {
    let lowercase = !a.common.keep_case;
    let v = Vocabulary::build(&read_lines(&a.src)?, a.min_count, lowercase)?;
    ensure_parent(&a.out)?;
    v.write_tsv(&a.out)?;
    let mut m = Manifest::new("vocab");
    m.input("src", &a.src)?;
    m.set("min_count", a.min_count);
    m.set("lowercase", lowercase);
    m.set("words", v.len());
    m.write(&with_suffix(&a.out, ".manifest"))?;
    println!("{} words, {} tokens", v.len(), v.total_tokens());
    Ok(())
}

fn extract_lexicon(a: ExtractLexiconArgs) -> Result<()> {
    let lowercase = !a.common.keep_case;
    let corpus = load_corpus(&a.src, &a.tgt, Some(&a.align), a.min_count, lowercase)?;
    let lex = extract_bilingual_lexicon(&corpus)?;
    let pairs = lex.word_pairs(corpus.vocab_src(), corpus.vocab_tgt());
    ensure_parent(&a.out)?;
    write_lexicon_tsv(&a.out, &pairs)?;
    let mut m = Manifest::new("extract-lexicon");
    m.input("src", &a.src)?;
    m.input("tgt", &a.tgt)?;
    m.input("align", &a.align)?;
    m.set("min_count", a.min_count);
    m.set("lowercase", lowercase);
    m.set("pairs", pairs.len());
    m.write(&with_suffix(&a.out, ".manifest"))?;
    println!("{} lexicon pairs", pairs.len());
    Ok(())
}

fn sgd_config(a: &TrainArgs, defaults: SGDConfig) -> SGDConfig {
    SGDConfig {
        dim: a.dim.unwrap_or(defaults.dim),
        window: a.window.unwrap_or(defaults.window),
        negatives: a.negatives.unwrap_or(defaults.negatives),
        epochs: a.epochs.unwrap_or(defaults.epochs),
        initial_lr: a.lr.unwrap_or(defaults.initial_lr),
        min_count: a.min_count.unwrap_or(defaults.min_count),
        seed: a.seed.unwrap_or(defaults.seed),
        threads: a.threads.unwrap_or(defaults.threads),
        subsample_threshold: a.subsample.unwrap_or(defaults.subsample_threshold),
    }
}

fn record_sgd(m: &mut Manifest, c: &SGDConfig) {
    m.set("dim", c.dim);
    m.set("window", c.window);
    m.set("negatives", c.negatives);
    m.set("epochs", c.epochs);
    m.set("lr", c.initial_lr);
    m.set("min_count", c.min_count);
    m.set("subsample", c.subsample_threshold);
    m.set("seed", c.seed);
    m.set("threads", c.threads);
}

fn corpus_paths(a: &TrainArgs) -> Result<(&Path, &Path)> {
    match (&a.src, &a.tgt) {
        (Some(s), Some(t)) => Ok((s, t)),
        _ => usage(format!("{} needs --src and --tgt", a.model.name())),
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let lowercase = !a.common.keep_case;
    let mut m = Manifest::new("train");
    m.set("model", a.model.name());
    m.set("lowercase", lowercase);
    let be = match a.model {
        Model::Biskip => {
            let (src, tgt) = corpus_paths(&a)?;
            let Some(align) = a.align.as_deref() else {
                return usage("biskip needs --align (word alignments)");
            };
            let cfg = sgd_config(&a, SGDConfig::biskip());
            let d = ObjectiveSpec::default();
            let obj = ObjectiveSpec {
                alpha: a.alpha.unwrap_or(d.alpha),
                beta: a.beta.unwrap_or(d.beta),
                cross_weight: a.cross_weight.unwrap_or(d.cross_weight),
            };
            m.input("src", src)?;
            m.input("tgt", tgt)?;
            m.input("align", align)?;
            record_sgd(&mut m, &cfg);
            m.set("alpha", obj.alpha);
            m.set("beta", obj.beta);
            m.set("cross_weight", obj.cross_weight);
            let corpus = load_corpus(src, tgt, Some(align), cfg.min_count, lowercase)?;
            train_biskip(&corpus, &cfg, &obj)?
        }
        Model::Bicvm => {
            let (src, tgt) = corpus_paths(&a)?;
            let d = BicvmConfig::default();
            let cfg = BicvmConfig {
                dim: a.dim.unwrap_or(d.dim),
                margin: a.margin.unwrap_or(d.margin),
                noise_k: a.noise_k.unwrap_or(d.noise_k),
                batch_size: a.batch.unwrap_or(d.batch_size),
                epochs: a.epochs.unwrap_or(d.epochs),
                l2_lambda: a.l2.unwrap_or(d.l2_lambda),
                lr: a.lr.unwrap_or(d.lr),
                seed: a.seed.unwrap_or(d.seed),
                threads: a.threads.unwrap_or(d.threads),
            };
            let min_count = a.min_count.unwrap_or(5);
            m.input("src", src)?;
            m.input("tgt", tgt)?;
            m.set("dim", cfg.dim);
            m.set("margin", cfg.margin);
            m.set("noise_k", cfg.noise_k);
            m.set("batch", cfg.batch_size);
            m.set("epochs", cfg.epochs);
            m.set("l2", cfg.l2_lambda);
            m.set("lr", cfg.lr);
            m.set("min_count", min_count);
            m.set("seed", cfg.seed);
            m.set("threads", cfg.threads);
            let corpus = load_corpus(src, tgt, None, min_count, lowercase)?;
            train_bicvm(&corpus, &cfg)?
        }
        Model::Bicca => train_bicca_cmd(&a, &mut m, lowercase)?,
        Model::Bivcd => {
            let (src, tgt) = corpus_paths(&a)?;
            let cfg = sgd_config(&a, SGDConfig::bivcd());
            m.input("src", src)?;
            m.input("tgt", tgt)?;
            record_sgd(&mut m, &cfg);
            let corpus = load_corpus(src, tgt, None, cfg.min_count, lowercase)?;
            train_bivcd(&corpus, &cfg)?
        }
    };
    ensure_parent(&a.out)?;
    let src_out = with_suffix(&a.out, ".src.vec");
    let tgt_out = with_suffix(&a.out, ".tgt.vec");
    be.src.save(&src_out)?;
    be.tgt.save(&tgt_out)?;
    m.set("output.src", src_out.display());
    m.set("output.tgt", tgt_out.display());
    m.write(&with_suffix(&a.out, ".manifest"))?;
    println!(
        "{}: {} source and {} target vectors of dim {}",
        a.model.name(),
        be.src.len(),
        be.tgt.len(),
        be.shared_dim()
    );
    Ok(())
}

fn train_bicca_cmd(a: &TrainArgs, m: &mut Manifest, lowercase: bool) -> Result<BilingualEmbedding> {
    let k_ratio = a.k_ratio.unwrap_or(0.5);
    m.set("k_ratio", k_ratio);
    m.set("ridge", RIDGE);
    if let (Some(se), Some(te)) = (&a.src_emb, &a.tgt_emb) {
        let Some(lex_path) = a.lexicon.as_deref() else {
            return usage("bicca with --src-emb/--tgt-emb needs --lexicon");
        };
        m.input("src_emb", se)?;
        m.input("tgt_emb", te)?;
        m.input("lexicon", lex_path)?;
        let src = EmbeddingMatrix::load(se)?;
        let tgt = EmbeddingMatrix::load(te)?;
        return Ok(train_bicca(&src, &tgt, &read_lexicon_tsv(lex_path)?, k_ratio)?);
    }
    if a.src_emb.is_some() || a.tgt_emb.is_some() {
        return usage("bicca needs both --src-emb and --tgt-emb, or neither");
    }
    let (src, tgt) = corpus_paths(a)?;
    if a.lexicon.is_none() && a.align.is_none() {
        return usage("bicca needs --lexicon (or --align to extract one)");
    }
    let cfg = sgd_config(a, SGDConfig::bicca_mono());
    m.input("src", src)?;
    m.input("tgt", tgt)?;
    record_sgd(m, &cfg);
    let corpus = match (&a.lexicon, &a.align) {
        (Some(lex), _) => {
            m.input("lexicon", lex)?;
            load_corpus(src, tgt, None, cfg.min_count, lowercase)?
        }
        (None, Some(align)) => {
            m.input("align", align)?;
            load_corpus(src, tgt, Some(align), cfg.min_count, lowercase)?
        }
        (None, None) => unreachable!("checked above"),
    };
    let pairs = match &a.lexicon {
        Some(lex) => read_lexicon_tsv(lex)?,
        None => extract_bilingual_lexicon(&corpus)?.word_pairs(corpus.vocab_src(), corpus.vocab_tgt()),
    };
    let src_sents: Vec<Vec<u32>> = corpus.pairs().iter().map(|p| p.src.clone()).collect();
    let tgt_sents: Vec<Vec<u32>> = corpus.pairs().iter().map(|p| p.tgt.clone()).collect();
    let mut ws = train_monolingual(&src_sents, corpus.vocab_src(), Side::Src, &cfg)?.matrices;
    let mut wt = train_monolingual(&tgt_sents, corpus.vocab_tgt(), Side::Tgt, &cfg)?.matrices;
    Ok(train_bicca(&ws.remove(0), &wt.remove(0), &pairs, k_ratio)?)
}

fn finish_report(report: &EvalReport, out: Option<&Path>, m: Manifest) -> Result<()> {
    print!("{}", report.to_text());
    if let Some(prefix) = out {
        ensure_parent(prefix)?;
        report.write_text(&with_suffix(prefix, ".report.txt"))?;
        report.write_items_tsv(&with_suffix(prefix, ".items.tsv"))?;
        m.write(&with_suffix(prefix, ".manifest"))?;
    }
    Ok(())
}

fn eval_sim(a: EvalSimArgs) -> Result<()> {
    let emb = EmbeddingMatrix::load(&a.emb)?;
    let data = WordSimDataset::read_tsv(&a.data)?;
    let report = eval_word_similarity(&emb, &data)?;
    let mut m = Manifest::new("eval-sim");
    m.input("emb", &a.emb)?;
    m.input("data", &a.data)?;
    finish_report(&report, a.out.out.as_deref(), m)
}

fn load_pair(src: &Path, tgt: &Path) -> Result<BilingualEmbedding> {
    Ok(BilingualEmbedding::new(EmbeddingMatrix::load(src)?, EmbeddingMatrix::load(tgt)?)?)
}

fn eval_dict(a: EvalDictArgs) -> Result<()> {
    let be = load_pair(&a.src_emb, &a.tgt_emb)?;
    let mut m = Manifest::new("eval-dict");
    m.input("src_emb", &a.src_emb)?;
    m.input("tgt_emb", &a.tgt_emb)?;
    m.set("k", a.k);
    let gold = match (&a.lexicon, &a.synsets) {
        (Some(lex), _) => {
            m.input("lexicon", lex)?;
            GoldDictionary::from_pairs(read_lexicon_tsv(lex)?)
        }
        (None, Some(syn)) => {
            let (sv, tv) = (a.src_vocab.as_deref().unwrap(), a.tgt_vocab.as_deref().unwrap());
            m.input("synsets", syn)?;
            m.input("src_vocab", sv)?;
            m.input("tgt_vocab", tv)?;
            m.set("min_freq", a.min_freq);
            let g = build_gold_dictionary(
                &read_synset_tsv(syn)?,
                &Vocabulary::read_tsv(sv)?,
                &Vocabulary::read_tsv(tv)?,
                a.min_freq,
            );
            eprintln!("gold dictionary: {} pairs after pruning", g.len());
            g
        }
        (None, None) => return usage("eval-dict needs --lexicon or --synsets"),
    };
    let report = eval_dictionary_induction(&be, &gold, a.k)?;
    finish_report(&report, a.out.out.as_deref(), m)
}

fn eval_cldc_cmd(a: EvalCldcArgs) -> Result<()> {
    let lowercase = !a.common.keep_case;
    let mut be = load_pair(&a.src_emb, &a.tgt_emb)?;
    if a.reverse {
        be = BilingualEmbedding::new(be.tgt, be.src)?;
    }
    let train = LabeledDocumentSet::read_tsv(&a.train, lowercase)?;
    let test = LabeledDocumentSet::read_tsv(&a.test, lowercase)?;
    let mut report = eval_cldc(&be, &train, &test, a.iters, a.seed)?;
    report.push_config("reverse", a.reverse);
    let mut m = Manifest::new("eval-cldc");
    m.input("src_emb", &a.src_emb)?;
    m.input("tgt_emb", &a.tgt_emb)?;
    m.input("train", &a.train)?;
    m.input("test", &a.test)?;
    m.set("iters", a.iters);
    m.set("seed", a.seed);
    m.set("reverse", a.reverse);
    m.set("lowercase", lowercase);
    finish_report(&report, a.out.out.as_deref(), m)
}

fn knn_cmd(a: KnnArgs) -> Result<()> {
    let query = EmbeddingMatrix::load(&a.src_emb)?;
    let hits = match &a.tgt_emb {
        Some(t) => knn_cross(&a.word, a.k, &query, &EmbeddingMatrix::load(t)?)?,
        None => knn(&a.word, a.k, &query)?,
    };
    let lines: Vec<String> = hits.iter().map(|(w, s)| format!("{w}\t{s:.6}")).collect();
    for l in &lines {
        println!("{l}");
    }
    if let Some(out) = &a.out {
        ensure_parent(out)?;
        write_lines(out, &lines)?;
        let mut m = Manifest::new("knn");
        m.input("src_emb", &a.src_emb)?;
        if let Some(t) = &a.tgt_emb {
            m.input("tgt_emb", t)?;
        }
        m.set("word", &a.word);
        m.set("k", a.k);
        m.write(&with_suffix(out, ".manifest"))?;
    }
    Ok(())
}

fn pca(a: PcaArgs) -> Result<()> {
    let src = EmbeddingMatrix::load(&a.src_emb)?;
    let tgt = a.tgt_emb.as_deref().map(EmbeddingMatrix::load).transpose()?;
    let sw: Vec<&str> = a.src_words.iter().map(String::as_str).collect();
    let tw: Vec<&str> = a.tgt_words.iter().map(String::as_str).collect();
    let mut sets: Vec<(&EmbeddingMatrix, &[&str])> = vec![(&src, &sw)];
    if let Some(t) = &tgt {
        sets.push((t, &tw));
    }
    let points = pca_project(&sets)?;
    ensure_parent(&a.out)?;
    write_pca_tsv(&a.out, &points, &["src", "tgt"])?;
    let mut m = Manifest::new("pca");
    m.input("src_emb", &a.src_emb)?;
    if let Some(t) = &a.tgt_emb {
        m.input("tgt_emb", t)?;
    }
    m.set("src_words", a.src_words.join(","));
    m.set("tgt_words", a.tgt_words.join(","));
    m.write(&with_suffix(&a.out, ".manifest"))?;
    println!("{} points", points.len());
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        vocab_size: a.vocab_size,
        sentence_count: a.sentences,
        min_len: a.min_len,
        max_len: a.max_len,
        topic_count: a.topics,
        noise_rate: a.noise,
        seed: a.seed,
        doc_count: a.docs,
        ..SynthSpec::default()
    };
    let g = generate_parallel(&spec)?;
    g.write(&a.out)?;
    if spec.topic_count >= 2 && spec.doc_count > 0 {
        let (train, test) = generate_cldc(&spec)?;
        train.write_tsv(&a.out.join("cldc_train.tsv"))?;
        test.write_tsv(&a.out.join("cldc_test.tsv"))?;
    }
    println!("{} sentence pairs written to {}", g.corpus.len(), a.out.display());
    Ok(())
}

fn write_stat(out: Option<&Path>, text: &str, m: Manifest) -> Result<()> {
    print!("{text}");
    if let Some(out) = out {
        ensure_parent(out)?;
        std::fs::write(out, text).map_err(|source| Error::Io {
            path: out.to_path_buf(),
            source,
        })?;
        m.write(&with_suffix(out, ".manifest"))?;
    }
    Ok(())
}

fn steiger(a: SteigerArgs) -> Result<()> {
    let p = steiger_test(a.rho_a, a.rho_b, a.rho_ab, a.n)?;
    let mut m = Manifest::new("stats steiger");
    m.set("rho_a", a.rho_a);
    m.set("rho_b", a.rho_b);
    m.set("rho_ab", a.rho_ab);
    m.set("n", a.n);
    write_stat(a.out.as_deref(), &format!("test=steiger\np={p}\n"), m)
}

fn mcnemar(a: McnemarArgs) -> Result<()> {
    let ia = EvalReport::read_items_tsv(&a.items_a)?;
    let ib = EvalReport::read_items_tsv(&a.items_b)?;
    let r = mcnemar_test(&paired_outcomes(&ia, &ib)?);
    let method = match r.method {
        McNemarMethod::NoDiscordance => "none",
        McNemarMethod::ExactBinomial => "exact-binomial",
        McNemarMethod::ChiSquareCorrected => "chi-square-corrected",
    };
    let mut m = Manifest::new("stats mcnemar");
    m.input("items_a", &a.items_a)?;
    m.input("items_b", &a.items_b)?;
    let text = format!(
        "test=mcnemar\nb={}\nc={}\nmethod={method}\nexact_cutoff={MCNEMAR_EXACT_CUTOFF}\np={}\n",
        r.b, r.c, r.p_value
    );
    write_stat(a.out.as_deref(), &text, m)
}
