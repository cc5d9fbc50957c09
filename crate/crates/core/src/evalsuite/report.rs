use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::{read_lines, write_lines};
use crate::error::{Error, Result};
use crate::stats::PairedOutcomes;

/// Outcome of one evaluation item. `correct` is `None` when the item could
/// not be scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemOutcome {
    pub id: String,
    pub correct: Option<bool>,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub task: String,
    pub metrics: Vec<(String, f64)>,
    pub evaluated: usize,
    pub total: usize,
    pub p_values: Vec<(String, f64)>,
    pub config: Vec<(String, String)>,
    pub items: Vec<ItemOutcome>,
}

impl EvalReport {
    pub fn new(task: &str) -> Self {
        Self {
            task: task.to_string(),
            ..Self::default()
        }
    }

    pub fn coverage(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.evaluated as f64 / self.total as f64
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn push_metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push((name.into(), value));
    }

    pub fn push_config(&mut self, key: impl Into<String>, value: impl ToString) {
        self.config.push((key.into(), value.to_string()));
    }

    /// Flat `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task={}", self.task);
        let _ = writeln!(s, "evaluated={}", self.evaluated);
        let _ = writeln!(s, "total={}", self.total);
        let _ = writeln!(s, "coverage={}", self.coverage());
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "{k}={v}");
        }
        for (k, v) in &self.p_values {
            let _ = writeln!(s, "p.{k}={v}");
        }
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k}={v}");
        }
        s
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn write_items_tsv(&self, path: &Path) -> Result<()> {
        let header = std::iter::once("item\tcorrect\tvalue\tnote".to_string());
        let rows = self.items.iter().map(|it| {
            let c = match it.correct {
                Some(true) => "1",
                Some(false) => "0",
                None => "-",
            };
            format!("{}\t{c}\t{}\t{}", it.id, it.value, it.note)
        });
        write_lines(path, header.chain(rows))
    }

    pub fn read_items_tsv(path: &Path) -> Result<Vec<ItemOutcome>> {
        let ctx = path.display().to_string();
        let lines = read_lines(path)?;
        let mut out = Vec::new();
        for (i, line) in lines.iter().enumerate().skip(1) {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(Error::parse(&ctx, i + 1, "expected 4 tab-separated fields"));
            }
            let correct = match f[1] {
                "1" => Some(true),
                "0" => Some(false),
                "-" => None,
                other => return Err(Error::parse(&ctx, i + 1, format!("bad correctness flag '{other}'"))),
            };
            let value = f[2]
                .parse()
                .map_err(|_| Error::parse(&ctx, i + 1, format!("bad value '{}'", f[2])))?;
            out.push(ItemOutcome {
                id: f[0].to_string(),
                correct,
                value,
                note: f[3].to_string(),
            });
        }
        Ok(out)
    }
}

/// Pairs two systems' item outcomes for McNemar. Both lists must name the
/// same items in the same order; an item a system could not score counts
/// as wrong for that system.
pub fn paired_outcomes(a: &[ItemOutcome], b: &[ItemOutcome]) -> Result<PairedOutcomes> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.id != y.id) {
        return Err(Error::invalid("item lists of the two systems do not match"));
    }
    PairedOutcomes::new(
        a.iter().map(|x| x.correct == Some(true)).collect(),
        b.iter().map(|x| x.correct == Some(true)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn items_round_trip() {
        let mut r = EvalReport::new("demo");
        r.items = vec![
            ItemOutcome {
                id: "a b".into(),
                correct: Some(true),
                value: 1.5,
                note: String::new(),
            },
            ItemOutcome {
                id: "c d".into(),
                correct: None,
                value: f64::NAN,
                note: "oov".into(),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("items.tsv");
        r.write_items_tsv(&p).unwrap();
        let back = EvalReport::read_items_tsv(&p).unwrap();
        assert_eq!(back[0], r.items[0]);
        assert_eq!(back[1].correct, None);
        assert!(back[1].value.is_nan());
    }

    #[test]
    fn text_lists_coverage() {
        let mut r = EvalReport::new("t");
        r.evaluated = 3;
        r.total = 4;
        r.push_metric("accuracy", 0.5);
        let t = r.to_text();
        assert!(t.contains("coverage=0.75\n"));
        assert!(t.contains("accuracy=0.5\n"));
    }
}
