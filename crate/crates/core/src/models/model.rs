use rand::Rng as _;

use super::config::{ModelConfig, ModelKind};
use crate::autodiff::{sigmoid, Tape, Tensor, Var};
use crate::data::{EmbeddingMatrix, PAD};
use crate::error::{Error, Result};
use crate::rng::{purpose, rng_for, Rng};

/// One model input.
#[derive(Clone, Copy, Debug)]
pub enum Input<'a> {
    Point(&'a [f64]),
    Tokens(&'a [usize]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: Tensor,
}

#[derive(Clone, Debug, PartialEq)]
struct Layer {
    weight: usize,
    bias: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
struct Layout {
    embedding: Option<usize>,
    hidden: Vec<Layer>,
    convs: Vec<(usize, Layer)>,
    out: Layer,
}

/// A binary classifier with a single output logit.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    config: ModelConfig,
    params: Vec<Param>,
    layout: Layout,
    pretrained: Option<Tensor>,
    version: u64,
}

/// Parameter nodes of a model recorded on one tape.
#[derive(Clone, Debug)]
pub struct Bound(Vec<Var>);

impl Bound {
    pub fn vars(&self) -> &[Var] {
        &self.0
    }
}

/// Model input on a tape, plus the token positions it covers.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub var: Var,
    /// Position in the original token list for each row of `var`; `None`
    /// for padding rows. Empty for point inputs.
    pub positions: Vec<Option<usize>>,
}

impl Model {
    /// Builds a model with parameters initialized from `seed`.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let c = &config;
        let mut params: Vec<Param> = Vec::new();
        let embedding = c.kind.is_text().then(|| {
            params.push(Param {
                name: "embedding".into(),
                value: Tensor::zeros(vec![c.vocab_size, c.embedding_dim]),
            });
            0
        });
        let mut push = |name: String, shape: Vec<usize>| {
            params.push(Param {
                name,
                value: Tensor::zeros(shape),
            });
            params.len() - 1
        };
        let mut layer = |name: &str, fan_in: usize, fan_out: usize| Layer {
            weight: push(format!("{name}.weight"), vec![fan_in, fan_out]),
            bias: c.bias.then(|| push(format!("{name}.bias"), vec![fan_out])),
        };

        let mut hidden = Vec::new();
        let mut convs = Vec::new();
        let mut width = if c.kind.is_text() { c.embedding_dim } else { c.input_dim };
        if c.kind == ModelKind::Cnn {
            for &k in &c.filter_sizes {
                convs.push((k, layer(&format!("conv{k}"), k * c.embedding_dim, c.hidden)));
            }
            width = c.feature_dim();
        } else {
            for l in 0..c.hidden_layers {
                hidden.push(layer(&format!("hidden{l}"), width, c.hidden));
                width = c.hidden;
            }
        }
        let out = layer("out", width, 1);
        let layout = Layout {
            embedding,
            hidden,
            convs,
            out,
        };
        let mut model = Model {
            config,
            params,
            layout,
            pretrained: None,
            version: 0,
        };
        model.reinitialize(seed);
        Ok(model)
    }

    /// Like [`Model::new`] but the embedding table starts from, and is reset
    /// to, `embeddings`.
    pub fn with_embeddings(config: ModelConfig, embeddings: EmbeddingMatrix, seed: u64) -> Result<Self> {
        if embeddings.vocab_size() != config.vocab_size || embeddings.dim() != config.embedding_dim {
            return Err(Error::shape(
                "with_embeddings",
                &[
                    &[config.vocab_size, config.embedding_dim],
                    embeddings.tensor().shape(),
                ],
            ));
        }
        let mut model = Model::new(config, seed)?;
        model.pretrained = Some(embeddings.into_tensor());
        model.reinitialize(seed);
        Ok(model)
    }

    /// Redraws every parameter from `seed`: He-uniform weights for ReLU
    /// layers, Glorot-uniform output weights, zero biases, and either the
    /// pretrained vectors or Uniform(-0.1, 0.1) embeddings.
    pub fn reinitialize(&mut self, seed: u64) {
        let mut rng = rng_for(seed, &[purpose::INIT]);
        let out_weight = self.layout.out.weight;
        for (i, p) in self.params.iter_mut().enumerate() {
            let shape = p.value.shape().to_vec();
            let values = if Some(i) == self.layout.embedding {
                match &self.pretrained {
                    Some(t) => t.data().to_vec(),
                    None => EmbeddingMatrix::random(shape[0], shape[1], rng.gen())
                        .into_tensor()
                        .into_vec(),
                }
            } else if shape.len() == 1 {
                vec![0.0; shape[0]]
            } else {
                let (fan_in, fan_out) = (shape[0] as f64, shape[1] as f64);
                let limit = if i == out_weight {
                    (6.0 / (fan_in + fan_out)).sqrt()
                } else {
                    (6.0 / fan_in).sqrt()
                };
                (0..shape[0] * shape[1])
                    .map(|_| rng.gen_range(-limit..limit))
                    .collect()
            };
            p.value = Tensor::new(shape, values).expect("shape preserved");
        }
        self.version += 1;
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&Tensor> {
        self.params.iter().find(|p| p.name == name).map(|p| &p.value)
    }

    /// Overwrites one parameter; the shape must match.
    pub fn set_param(&mut self, name: &str, value: Tensor) -> Result<()> {
        let p = self
            .params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Config(format!("no parameter named {name:?}")))?;
        if p.value.shape() != value.shape() {
            return Err(Error::shape("set_param", &[p.value.shape(), value.shape()]));
        }
        p.value = value;
        self.version += 1;
        Ok(())
    }

    pub(crate) fn params_mut(&mut self) -> &mut [Param] {
        &mut self.params
    }

    pub(crate) fn embedding_index(&self) -> Option<usize> {
        self.layout.embedding
    }

    pub fn parameter_count(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    /// Monotone counter identifying the current parameter values.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub(crate) fn bump_version(&mut self) {
        self.version += 1;
    }

    pub fn embeddings(&self) -> Option<&Tensor> {
        self.layout.embedding.map(|i| &self.params[i].value)
    }

    pub fn all_finite(&self) -> bool {
        self.params.iter().all(|p| p.value.all_finite())
    }

    // ---------------------------------------------------------------------
    // forward stages

    pub fn bind(&self, tape: &mut Tape, requires_grad: bool) -> Bound {
        Bound(
            self.params
                .iter()
                .map(|p| tape.leaf(p.value.clone(), requires_grad))
                .collect(),
        )
    }

    /// Token ids the network actually reads: PAD removed, then padded with
    /// PAD up to the widest filter.
    fn prepared_tokens(&self, tokens: &[usize]) -> Result<(Vec<usize>, Vec<Option<usize>>)> {
        let mut ids = Vec::with_capacity(tokens.len());
        let mut positions = Vec::with_capacity(tokens.len());
        for (j, &t) in tokens.iter().enumerate() {
            if t == PAD {
                continue;
            }
            if t >= self.config.vocab_size {
                return Err(Error::Input(format!(
                    "token id {t} outside vocabulary of {}",
                    self.config.vocab_size
                )));
            }
            ids.push(t);
            positions.push(Some(j));
        }
        if ids.is_empty() {
            return Err(Error::Input("sentence has no non-PAD tokens".into()));
        }
        if self.config.kind == ModelKind::Cnn {
            while ids.len() < self.config.min_tokens() {
                ids.push(PAD);
                positions.push(None);
            }
        }
        Ok((ids, positions))
    }

    /// Records the input. With `grad_input` the input (raw point or gathered
    /// embedding rows) becomes a leaf that requires a gradient; otherwise
    /// token inputs are gathered from the bound embedding table.
    pub fn embed(&self, tape: &mut Tape, bound: &Bound, input: Input<'_>, grad_input: bool) -> Result<Embedded> {
        match (self.config.kind, input) {
            (ModelKind::Mlp2d, Input::Point(x)) => {
                if x.len() != self.config.input_dim {
                    return Err(Error::shape("mlp2d input", &[&[x.len()], &[self.config.input_dim]]));
                }
                let t = Tensor::matrix(1, x.len(), x.to_vec())?;
                Ok(Embedded {
                    var: tape.leaf(t, grad_input),
                    positions: Vec::new(),
                })
            }
            (ModelKind::MeanPool | ModelKind::Cnn, Input::Tokens(tokens)) => {
                let (ids, positions) = self.prepared_tokens(tokens)?;
                let table_idx = self.layout.embedding.expect("text model has an embedding");
                let var = if grad_input {
                    let table = &self.params[table_idx].value;
                    let d = table.cols();
                    let mut rows = Vec::with_capacity(ids.len() * d);
                    for &i in &ids {
                        rows.extend_from_slice(table.row(i));
                    }
                    tape.leaf(Tensor::matrix(ids.len(), d, rows)?, true)
                } else {
                    tape.embedding(bound.0[table_idx], &ids)?
                };
                Ok(Embedded { var, positions })
            }
            (kind, _) => Err(Error::Input(format!("input type does not match model kind {kind}"))),
        }
    }

    fn dense(&self, tape: &mut Tape, bound: &Bound, x: Var, layer: &Layer) -> Result<Var> {
        let h = tape.matmul(x, bound.0[layer.weight])?;
        match layer.bias {
            Some(b) => tape.add_bias(h, bound.0[b]),
            None => Ok(h),
        }
    }

    /// Representation feeding the output layer, shape `[1, feature_dim]`.
    pub fn features(&self, tape: &mut Tape, bound: &Bound, x: Var) -> Result<Var> {
        let mut h = match self.config.kind {
            ModelKind::Mlp2d => x,
            ModelKind::MeanPool => {
                let m = tape.mean_rows(x)?;
                let d = tape.shape(m)[0];
                tape.reshape(m, vec![1, d])?
            }
            ModelKind::Cnn => {
                let mut pooled = Vec::with_capacity(self.layout.convs.len());
                for (k, layer) in &self.layout.convs {
                    let w = tape.windows(x, *k)?;
                    let c = self.dense(tape, bound, w, layer)?;
                    let r = tape.relu(c)?;
                    pooled.push(tape.max_pool_time(r)?);
                }
                let cat = tape.concat(&pooled)?;
                let n = tape.shape(cat)[0];
                return tape.reshape(cat, vec![1, n]);
            }
        };
        for layer in &self.layout.hidden {
            let z = self.dense(tape, bound, h, layer)?;
            h = tape.relu(z)?;
        }
        Ok(h)
    }

    /// Output logit, shape `[1, 1]`. `mask` is a binary dropout mask over the
    /// features; `None` means evaluation mode.
    pub fn head(&self, tape: &mut Tape, bound: &Bound, features: Var, mask: Option<&Tensor>) -> Result<Var> {
        let h = match mask {
            Some(m) => tape.dropout(features, m, 1.0 / (1.0 - self.config.dropout))?,
            None => features,
        };
        self.dense(tape, bound, h, &self.layout.out)
    }

    /// Draws a training-mode dropout mask (all ones when dropout is 0).
    pub fn draw_mask(&self, rng: &mut Rng) -> Tensor {
        let keep = 1.0 - self.config.dropout;
        let n = self.config.feature_dim();
        if self.config.dropout == 0.0 {
            return Tensor::vector(vec![1.0; n]);
        }
        Tensor::vector((0..n).map(|_| if rng.gen::<f64>() < keep { 1.0 } else { 0.0 }).collect())
    }

    // ---------------------------------------------------------------------
    // conveniences

    /// Scalar logit. In training mode (`rng` given) a dropout mask is drawn
    /// from `rng`; otherwise evaluation mode.
    pub fn forward(&self, input: Input<'_>, rng: Option<&mut Rng>) -> Result<f64> {
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape, false);
        let x = self.embed(&mut tape, &bound, input, false)?;
        let f = self.features(&mut tape, &bound, x.var)?;
        let mask = rng.map(|r| self.draw_mask(r));
        let y = self.head(&mut tape, &bound, f, mask.as_ref())?;
        tape.value(y).item()
    }

    pub fn logit(&self, input: Input<'_>) -> Result<f64> {
        self.forward(input, None)
    }

    pub fn probability(&self, input: Input<'_>) -> Result<f64> {
        Ok(sigmoid(self.logit(input)?))
    }

    /// Evaluation-mode features (the representation before the output layer).
    pub fn representation(&self, input: Input<'_>) -> Result<Vec<f64>> {
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape, false);
        let x = self.embed(&mut tape, &bound, input, false)?;
        let f = self.features(&mut tape, &bound, x.var)?;
        Ok(tape.value(f).data().to_vec())
    }

    /// Logit computed from given features, with an optional dropout mask.
    pub fn logit_from_features(&self, features: &[f64], mask: Option<&Tensor>) -> Result<f64> {
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape, false);
        let f = tape.constant(Tensor::matrix(1, features.len(), features.to_vec())?);
        let y = self.head(&mut tape, &bound, f, mask)?;
        tape.value(y).item()
    }

    pub fn output_weights(&self) -> &Tensor {
        &self.params[self.layout.out.weight].value
    }
}
