//! Word similarity, dictionary induction and cross-lingual document
//! classification.
//!
//! Every evaluation skips items it cannot score (out-of-vocabulary words,
//! zero vectors) and reports the evaluable fraction as coverage.

mod cldc;
mod dictionary;
mod perceptron;
mod report;
mod wordsim;

pub use cldc::{eval_cldc, eval_cldc_spaces, tfidf_doc_vector, Idf, LabeledDocumentSet};
pub use dictionary::{build_gold_dictionary, eval_dictionary_induction, read_synset_tsv, GoldDictionary};
pub use perceptron::AveragedPerceptron;
pub use report::{paired_outcomes, EvalReport, ItemOutcome};
pub use wordsim::{average_ranks, eval_word_similarity, pearson, spearman, similarity_scores, WordSimDataset};
