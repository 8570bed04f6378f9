use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::Rng as _;

use super::vocab::{Vocab, PAD};
use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::rng::{purpose, rng_for};

pub const DEFAULT_EMBEDDING_DIM: usize = 100;
pub const INIT_RANGE: f64 = 0.1;

/// `V x d` word vectors. Row [`PAD`] is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix(Tensor);

impl EmbeddingMatrix {
    /// Uniform(-0.1, 0.1) rows, PAD zeroed.
    pub fn random(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, &[purpose::EMBEDDINGS]);
        let mut data: Vec<f64> = (0..vocab_size * dim)
            .map(|_| rng.gen_range(-INIT_RANGE..INIT_RANGE))
            .collect();
        data[PAD * dim..(PAD + 1) * dim].fill(0.0);
        EmbeddingMatrix(Tensor::new(vec![vocab_size, dim], data).expect("consistent shape"))
    }

    pub fn from_tensor(t: Tensor) -> Result<Self> {
        if t.shape().len() != 2 || t.rows() == PAD {
            return Err(Error::shape("embedding_matrix", &[t.shape()]));
        }
        if !t.all_finite() {
            return Err(Error::NonFinite("embedding matrix".into()));
        }
        let mut t = t;
        let d = t.cols();
        t.data_mut()[PAD * d..(PAD + 1) * d].fill(0.0);
        Ok(EmbeddingMatrix(t))
    }

    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn vocab_size(&self) -> usize {
        self.0.rows()
    }

    pub fn row(&self, id: usize) -> &[f64] {
        self.0.row(id)
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor {
        self.0
    }
}

/// Reads a text vector file (`word v1 ... vd` per line, optional word2vec
/// `count dim` header). Rows for words in the file are copied; everything
/// else is random-initialized from `seed`.
pub fn load_embeddings(path: &Path, vocab: &Vocab, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let mut matrix = EmbeddingMatrix::random(vocab.len(), dim, seed).into_tensor();
    let mut seen = HashSet::new();
    let mut file_dim: Option<usize> = None;
    for (n, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else { continue };
        let values: Vec<&str> = fields.collect();
        if n == 0 && values.len() == 1 && word.parse::<usize>().is_ok() && values[0].parse::<usize>().is_ok() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message,
        };
        match file_dim {
            None => {
                if values.len() != dim {
                    return Err(parse_err(format!(
                        "vector has {} components, expected {dim}",
                        values.len()
                    )));
                }
                file_dim = Some(values.len());
            }
            Some(d) if d != values.len() => {
                return Err(parse_err(format!(
                    "inconsistent dimensionality: {} after {d}",
                    values.len()
                )));
            }
            Some(_) => {}
        }
        let mut row = Vec::with_capacity(dim);
        for v in values {
            let x: f64 = v
                .parse()
                .map_err(|_| parse_err(format!("non-numeric vector entry {v:?}")))?;
            if !x.is_finite() {
                return Err(parse_err(format!("non-finite vector entry {v:?}")));
            }
            row.push(x);
        }
        if let Some(id) = vocab.get(word) {
            if id != PAD && seen.insert(id) {
                matrix.data_mut()[id * dim..(id + 1) * dim].copy_from_slice(&row);
            }
        }
    }
    EmbeddingMatrix::from_tensor(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(words: &[&str]) -> Vocab {
        let mut v = Vocab::new();
        for w in words {
            v.insert(w);
        }
        v
    }

    #[test]
    fn copies_rows_and_zeroes_pad() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.txt");
        fs::write(&p, "2 3\ngood 1 2 3\nbad -1 0.5 2e-1\n").unwrap();
        let v = vocab(&["good", "bad", "meh"]);
        let m = load_embeddings(&p, &v, 3, 1).unwrap();
        assert_eq!(m.row(v.id("good")), &[1.0, 2.0, 3.0]);
        assert_eq!(m.row(v.id("bad")), &[-1.0, 0.5, 0.2]);
        assert_eq!(m.row(PAD), &[0.0; 3]);
        assert!(m.row(v.id("meh")).iter().all(|x| x.abs() < INIT_RANGE));
    }

    #[test]
    fn empty_file_falls_back_to_random() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.txt");
        fs::write(&p, "").unwrap();
        let v = vocab(&["a"]);
        let m = load_embeddings(&p, &v, 4, 2).unwrap();
        assert_eq!(m, EmbeddingMatrix::random(v.len(), 4, 2));
        assert_eq!(m.row(PAD), &[0.0; 4]);
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let v = vocab(&["a", "b"]);
        let p = dir.path().join("v.txt");
        fs::write(&p, "a 1 2\nb 1 2 3\n").unwrap();
        assert!(matches!(load_embeddings(&p, &v, 2, 1), Err(Error::Parse { line: 2, .. })));
        fs::write(&p, "a 1 x\n").unwrap();
        assert!(matches!(load_embeddings(&p, &v, 2, 1), Err(Error::Parse { line: 1, .. })));
        fs::write(&p, "a 1 2 3\n").unwrap();
        assert!(load_embeddings(&p, &v, 2, 1).is_err());
    }
}
