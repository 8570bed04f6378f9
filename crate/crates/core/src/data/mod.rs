//! Synthetic points, text corpora, vocabularies, word vectors and splits.

mod corpus;
mod embeddings;
mod split;
mod synthetic;
pub mod toy;
mod vocab;

pub use corpus::{corpus_from_texts, load_corpus, tokenize, Corpus, CorpusSource, Sentence};
pub use embeddings::{load_embeddings, EmbeddingMatrix, DEFAULT_EMBEDDING_DIM, INIT_RANGE};
pub use split::{split, Split, DEFAULT_RATIOS};
pub use synthetic::{generate_synthetic, positive_probability, Region, SyntheticPoint, COORD_RANGE};
pub use vocab::{Vocab, PAD, PAD_TOKEN, UNK, UNK_TOKEN};
