use std::fmt;
use std::str::FromStr;

use crate::data::DEFAULT_EMBEDDING_DIM;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Fully connected ReLU network over 2-D points.
    Mlp2d,
    /// Embedding, mean over words, ReLU hidden layers.
    MeanPool,
    /// Embedding, one convolution per filter width with max-over-time
    /// pooling, concatenation.
    Cnn,
}

impl ModelKind {
    pub fn is_text(self) -> bool {
        !matches!(self, ModelKind::Mlp2d)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Mlp2d => "mlp2d",
            ModelKind::MeanPool => "meanpool",
            ModelKind::Cnn => "cnn",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mlp2d" => Ok(ModelKind::Mlp2d),
            "meanpool" => Ok(ModelKind::MeanPool),
            "cnn" => Ok(ModelKind::Cnn),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Width of each hidden layer; for the CNN, feature maps per filter width.
    pub hidden: usize,
    /// Number of hidden ReLU layers (MLP and mean-pool models).
    pub hidden_layers: usize,
    pub filter_sizes: Vec<usize>,
    /// Dropout rate applied to the features feeding the output layer.
    pub dropout: f64,
    pub embedding_dim: usize,
    pub vocab_size: usize,
    pub input_dim: usize,
    /// When false no bias parameters exist at all.
    pub bias: bool,
}

impl ModelConfig {
    pub fn mlp2d() -> Self {
        Self {
            kind: ModelKind::Mlp2d,
            hidden: 100,
            hidden_layers: 1,
            filter_sizes: Vec::new(),
            dropout: 0.0,
            embedding_dim: 0,
            vocab_size: 0,
            input_dim: 2,
            bias: true,
        }
    }

    pub fn meanpool(vocab_size: usize) -> Self {
        Self {
            kind: ModelKind::MeanPool,
            hidden: 100,
            hidden_layers: 1,
            filter_sizes: Vec::new(),
            dropout: 0.5,
            embedding_dim: DEFAULT_EMBEDDING_DIM,
            vocab_size,
            input_dim: 0,
            bias: true,
        }
    }

    pub fn cnn(vocab_size: usize) -> Self {
        Self {
            kind: ModelKind::Cnn,
            hidden: 100,
            hidden_layers: 0,
            filter_sizes: vec![3, 4, 5],
            dropout: 0.5,
            embedding_dim: DEFAULT_EMBEDDING_DIM,
            vocab_size,
            input_dim: 0,
            bias: true,
        }
    }

    pub fn text(kind: ModelKind, vocab_size: usize) -> Result<Self> {
        match kind {
            ModelKind::MeanPool => Ok(Self::meanpool(vocab_size)),
            ModelKind::Cnn => Ok(Self::cnn(vocab_size)),
            ModelKind::Mlp2d => Err(Error::Config("mlp2d is not a text model".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..1.0).contains(&self.dropout) {
            return fail("dropout must lie in [0, 1)");
        }
        if self.hidden == 0 {
            return fail("hidden width must be positive");
        }
        match self.kind {
            ModelKind::Mlp2d => {
                if self.input_dim == 0 || self.hidden_layers == 0 {
                    return fail("mlp2d needs an input dimension and at least one hidden layer");
                }
            }
            ModelKind::MeanPool | ModelKind::Cnn => {
                if self.embedding_dim == 0 || self.vocab_size < 2 {
                    return fail("text models need an embedding dimension and a vocabulary");
                }
                if self.kind == ModelKind::Cnn
                    && (self.filter_sizes.is_empty() || self.filter_sizes.contains(&0))
                {
                    return fail("cnn needs positive filter widths");
                }
            }
        }
        Ok(())
    }

    /// Length of the representation feeding the output layer.
    pub fn feature_dim(&self) -> usize {
        match self.kind {
            ModelKind::Cnn => self.hidden * self.filter_sizes.len(),
            ModelKind::MeanPool if self.hidden_layers == 0 => self.embedding_dim,
            _ => self.hidden,
        }
    }

    /// Sentences shorter than this are padded with PAD.
    pub fn min_tokens(&self) -> usize {
        self.filter_sizes.iter().copied().max().unwrap_or(1)
    }
}
