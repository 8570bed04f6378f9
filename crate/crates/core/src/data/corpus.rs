use std::fs;
use std::path::{Path, PathBuf};

use super::vocab::Vocab;
use crate::error::{Error, Result};

/// A tokenized sentence. `label` is `None` once the sentence has been handed
/// to the unlabeled pool; the true label then lives only in the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub id: usize,
    pub tokens: Vec<usize>,
    pub label: Option<u8>,
}

impl Sentence {
    pub fn unlabeled(&self) -> Sentence {
        Sentence {
            label: None,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub vocab: Vocab,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusSource {
    /// Two files with one sentence per line; the first holds label 1.
    PosNeg { pos: PathBuf, neg: PathBuf },
    /// `label<TAB>text` per line.
    Tsv(PathBuf),
}

/// Lowercase and split on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    // Some distributions of these corpora are Latin-1; invalid bytes are
    // replaced rather than rejected.
    Ok(String::from_utf8_lossy(&bytes)
        .lines()
        .map(str::to_string)
        .collect())
}

/// Builds a corpus from `(label, text)` pairs in order, skipping texts with
/// no tokens.
pub fn corpus_from_texts<'a>(items: impl IntoIterator<Item = (Option<u8>, &'a str)>) -> Result<Corpus> {
    let mut vocab = Vocab::new();
    let mut sentences = Vec::new();
    for (label, text) in items {
        let words = tokenize(text);
        if words.is_empty() {
            continue;
        }
        let tokens = words.iter().map(|w| vocab.insert(w)).collect();
        sentences.push(Sentence {
            id: sentences.len(),
            tokens,
            label,
        });
    }
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(Corpus { sentences, vocab })
}

pub fn load_corpus(source: &CorpusSource) -> Result<Corpus> {
    match source {
        CorpusSource::PosNeg { pos, neg } => {
            let pos_lines = read_lines(pos)?;
            let neg_lines = read_lines(neg)?;
            corpus_from_texts(
                pos_lines
                    .iter()
                    .map(|l| (Some(1), l.as_str()))
                    .chain(neg_lines.iter().map(|l| (Some(0), l.as_str()))),
            )
        }
        CorpusSource::Tsv(path) => {
            let lines = read_lines(path)?;
            let mut items = Vec::with_capacity(lines.len());
            for (n, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let parse_err = |message: String| Error::Parse {
                    path: path.clone(),
                    line: n + 1,
                    message,
                };
                let (label, text) = line
                    .split_once('\t')
                    .ok_or_else(|| parse_err("expected `label<TAB>text`".into()))?;
                let label = match label.trim() {
                    "0" => 0,
                    "1" => 1,
                    other => return Err(parse_err(format!("label must be 0 or 1, got {other:?}"))),
                };
                items.push((Some(label), text));
            }
            corpus_from_texts(items)
        }
    }
}

impl CorpusSource {
    /// Resolves a dataset argument: a `.tsv` file, a `POS,NEG` pair, or a
    /// directory holding one of the well-known file pairs.
    pub fn resolve(dataset: &Path, tsv: bool) -> Result<CorpusSource> {
        if tsv {
            return Ok(CorpusSource::Tsv(dataset.to_path_buf()));
        }
        let text = dataset.to_string_lossy();
        if let Some((pos, neg)) = text.split_once(',') {
            return Ok(CorpusSource::PosNeg {
                pos: pos.into(),
                neg: neg.into(),
            });
        }
        const PAIRS: [(&str, &str); 4] = [
            ("pos.txt", "neg.txt"),
            ("rt-polarity.pos", "rt-polarity.neg"),
            ("quote.tok.gt9.5000", "plot.tok.gt9.5000"),
            ("pos", "neg"),
        ];
        for (pos, neg) in PAIRS {
            let (p, n) = (dataset.join(pos), dataset.join(neg));
            if p.is_file() && n.is_file() {
                return Ok(CorpusSource::PosNeg { pos: p, neg: n });
            }
        }
        Err(Error::io(
            dataset,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no positive/negative file pair found",
            ),
        ))
    }
}
