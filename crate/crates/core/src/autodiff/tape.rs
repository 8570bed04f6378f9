use super::Tensor;
use crate::error::{Error, Result};

/// Handle to a node recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    AddBias(Var, Var),
    Scale(Var, f64),
    Relu(Var),
    Sigmoid(Var),
    BceWithLogits { logits: Var, targets: Vec<f64> },
    SoftmaxCrossEntropy { logits: Var, targets: Vec<usize>, probs: Vec<f64> },
    MaxPoolTime { input: Var, argmax: Vec<usize> },
    Mean(Var),
    Sum(Var),
    MeanRows(Var),
    Concat(Vec<Var>),
    Dropout { input: Var, factors: Vec<f64> },
    Embedding { table: Var, ids: Vec<usize> },
    Windows { input: Var, width: usize },
    Reshape(Var),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    requires_grad: bool,
    op: Op,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Recording,
    Differentiated,
}

/// Reverse-mode gradient tape.
///
/// Nodes are stored in recording order, which is a valid topological order;
/// [`Tape::backward`] walks them in exact reverse. A tape can be
/// differentiated once; call [`Tape::clear`] (or build a new tape) before the
/// next forward pass.
#[derive(Debug)]
pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Option<Vec<f64>>>,
    state: State,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            grads: Vec::new(),
            state: State::Recording,
        }
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
        self.grads.clear();
        self.state = State::Recording;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, requires_grad: bool, op: Op) -> Var {
        self.nodes.push(Node {
            value,
            requires_grad,
            op,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    pub fn leaf(&mut self, value: Tensor, requires_grad: bool) -> Var {
        self.push(value, requires_grad, Op::Leaf)
    }

    pub fn constant(&mut self, value: Tensor) -> Var {
        self.leaf(value, false)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> &[usize] {
        self.nodes[v.0].value.shape()
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.needs(v)
    }

    /// Gradient of the differentiated output with respect to `v`.
    ///
    /// `None` before [`Tape::backward`] or when `v` does not require a
    /// gradient. Nodes that require a gradient but were not reached by the
    /// backward sweep report zeros.
    pub fn grad(&self, v: Var) -> Option<&[f64]> {
        if self.state != State::Differentiated || !self.needs(v) {
            return None;
        }
        self.grads[v.0].as_deref()
    }

    // ---------------------------------------------------------------------
    // forward primitives

    /// `[m, k] x [k, n] -> [m, n]`.
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa.len() != 2 || sb.len() != 2 || sa[1] != sb[0] {
            return Err(Error::shape("matmul", &[sa, sb]));
        }
        let (m, k, n) = (sa[0], sa[1], sb[1]);
        let (av, bv) = (self.value(a).data(), self.value(b).data());
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let x = av[i * k + p];
                if x == 0.0 {
                    continue;
                }
                let brow = &bv[p * n..(p + 1) * n];
                for (o, &w) in row.iter_mut().zip(brow) {
                    *o += x * w;
                }
            }
        }
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(Tensor::new(vec![m, n], out)?, rg, Op::MatMul(a, b)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa != sb {
            return Err(Error::shape("add", &[sa, sb]));
        }
        let shape = sa.to_vec();
        let out = self
            .value(a)
            .data()
            .iter()
            .zip(self.value(b).data())
            .map(|(x, y)| x + y)
            .collect();
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(Tensor::new(shape, out)?, rg, Op::Add(a, b)))
    }

    /// Adds a length-`n` bias to every row of `[m, n]` (or to a length-`n`
    /// vector). This is the only broadcasting the tape supports.
    pub fn add_bias(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(bias));
        let n = *sa.last().unwrap_or(&0);
        if sb.len() != 1 || sb[0] != n || sa.is_empty() || sa.len() > 2 {
            return Err(Error::shape("add_bias", &[sa, sb]));
        }
        let shape = sa.to_vec();
        let bv = self.value(bias).data();
        let out = self
            .value(a)
            .data()
            .chunks(n)
            .flat_map(|row| row.iter().zip(bv).map(|(x, b)| x + b))
            .collect();
        let rg = self.needs(a) || self.needs(bias);
        Ok(self.push(Tensor::new(shape, out)?, rg, Op::AddBias(a, bias)))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let t = self.value(a);
        let out = t.data().iter().map(|x| x * c).collect();
        let value = Tensor::new(t.shape().to_vec(), out)?;
        let rg = self.needs(a);
        Ok(self.push(value, rg, Op::Scale(a, c)))
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        let t = self.value(a);
        let out = t.data().iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect();
        let value = Tensor::new(t.shape().to_vec(), out)?;
        let rg = self.needs(a);
        Ok(self.push(value, rg, Op::Relu(a)))
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        let t = self.value(a);
        let out = t.data().iter().map(|&x| sigmoid(x)).collect();
        let value = Tensor::new(t.shape().to_vec(), out)?;
        let rg = self.needs(a);
        Ok(self.push(value, rg, Op::Sigmoid(a)))
    }

    /// Mean binary cross-entropy of `logits` against `targets` in `[0, 1]`,
    /// computed in the numerically stable log-sum-exp form.
    pub fn bce_with_logits(&mut self, logits: Var, targets: &[f64]) -> Result<Var> {
        let t = self.value(logits);
        if t.len() != targets.len() || targets.is_empty() {
            return Err(Error::shape("bce_with_logits", &[t.shape(), &[targets.len()]]));
        }
        let n = targets.len() as f64;
        let loss = t
            .data()
            .iter()
            .zip(targets)
            .map(|(&z, &y)| z.max(0.0) - z * y + (-z.abs()).exp().ln_1p())
            .sum::<f64>()
            / n;
        let rg = self.needs(logits);
        Ok(self.push(
            Tensor::scalar(loss),
            rg,
            Op::BceWithLogits {
                logits,
                targets: targets.to_vec(),
            },
        ))
    }

    /// Mean softmax cross-entropy of `[m, c]` logits against class indices.
    pub fn softmax_cross_entropy(&mut self, logits: Var, targets: &[usize]) -> Result<Var> {
        let s = self.shape(logits);
        if s.len() != 2 || s[0] != targets.len() || targets.iter().any(|&y| y >= s[1]) {
            return Err(Error::shape("softmax_cross_entropy", &[s, &[targets.len()]]));
        }
        let (m, c) = (s[0], s[1]);
        let data = self.value(logits).data();
        let mut probs = vec![0.0; m * c];
        let mut loss = 0.0;
        for i in 0..m {
            let row = &data[i * c..(i + 1) * c];
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let denom: f64 = row.iter().map(|z| (z - max).exp()).sum();
            for j in 0..c {
                probs[i * c + j] = (row[j] - max).exp() / denom;
            }
            loss -= row[targets[i]] - max - denom.ln();
        }
        let rg = self.needs(logits);
        Ok(self.push(
            Tensor::scalar(loss / m as f64),
            rg,
            Op::SoftmaxCrossEntropy {
                logits,
                targets: targets.to_vec(),
                probs,
            },
        ))
    }

    /// Column-wise max over the time (row) axis: `[t, c] -> [c]`.
    /// Ties route the gradient to the earliest row.
    pub fn max_pool_time(&mut self, a: Var) -> Result<Var> {
        let s = self.shape(a);
        if s.len() != 2 || s[0] == 0 {
            return Err(Error::shape("max_pool_time", &[s]));
        }
        let (t, c) = (s[0], s[1]);
        let data = self.value(a).data();
        let mut argmax = vec![0usize; c];
        let mut out = data[..c].to_vec();
        for r in 1..t {
            for j in 0..c {
                let v = data[r * c + j];
                if v > out[j] {
                    out[j] = v;
                    argmax[j] = r;
                }
            }
        }
        let rg = self.needs(a);
        Ok(self.push(Tensor::vector(out), rg, Op::MaxPoolTime { input: a, argmax }))
    }

    pub fn mean(&mut self, a: Var) -> Result<Var> {
        let t = self.value(a);
        if t.is_empty() {
            return Err(Error::shape("mean", &[t.shape()]));
        }
        let m = t.data().iter().sum::<f64>() / t.len() as f64;
        let rg = self.needs(a);
        Ok(self.push(Tensor::scalar(m), rg, Op::Mean(a)))
    }

    pub fn sum(&mut self, a: Var) -> Result<Var> {
        let s = self.value(a).data().iter().sum::<f64>();
        let rg = self.needs(a);
        Ok(self.push(Tensor::scalar(s), rg, Op::Sum(a)))
    }

    /// Mean over rows: `[t, c] -> [c]`.
    pub fn mean_rows(&mut self, a: Var) -> Result<Var> {
        let s = self.shape(a);
        if s.len() != 2 || s[0] == 0 {
            return Err(Error::shape("mean_rows", &[s]));
        }
        let (t, c) = (s[0], s[1]);
        let data = self.value(a).data();
        let mut out = vec![0.0; c];
        for r in 0..t {
            for (o, v) in out.iter_mut().zip(&data[r * c..(r + 1) * c]) {
                *o += v;
            }
        }
        for o in &mut out {
            *o /= t as f64;
        }
        let rg = self.needs(a);
        Ok(self.push(Tensor::vector(out), rg, Op::MeanRows(a)))
    }

    /// Flattens and concatenates the inputs into one vector.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return Err(Error::shape("concat", &[]));
        }
        let mut out = Vec::new();
        for &p in parts {
            out.extend_from_slice(self.value(p).data());
        }
        let rg = parts.iter().any(|&p| self.needs(p));
        Ok(self.push(Tensor::vector(out), rg, Op::Concat(parts.to_vec())))
    }

    /// Applies an externally drawn binary `mask` and multiplies survivors by
    /// `scale` (inverted dropout uses `1 / (1 - rate)`).
    pub fn dropout(&mut self, a: Var, mask: &Tensor, scale: f64) -> Result<Var> {
        let t = self.value(a);
        if t.len() != mask.len() {
            return Err(Error::shape("dropout", &[t.shape(), mask.shape()]));
        }
        if let Some(bad) = mask.data().iter().find(|&&m| m != 0.0 && m != 1.0) {
            return Err(Error::Input(format!("dropout mask must be binary, found {bad}")));
        }
        let factors: Vec<f64> = mask.data().iter().map(|m| m * scale).collect();
        let out = t.data().iter().zip(&factors).map(|(x, f)| x * f).collect();
        let value = Tensor::new(t.shape().to_vec(), out)?;
        let rg = self.needs(a);
        Ok(self.push(value, rg, Op::Dropout { input: a, factors }))
    }

    /// Gathers rows of a `[V, d]` table: returns `[ids.len(), d]`.
    pub fn embedding(&mut self, table: Var, ids: &[usize]) -> Result<Var> {
        let s = self.shape(table);
        if s.len() != 2 || ids.is_empty() {
            return Err(Error::shape("embedding", &[s, &[ids.len()]]));
        }
        let (v, d) = (s[0], s[1]);
        if let Some(&bad) = ids.iter().find(|&&i| i >= v) {
            return Err(Error::Input(format!("embedding id {bad} out of range for {v} rows")));
        }
        let tv = self.value(table);
        let mut out = Vec::with_capacity(ids.len() * d);
        for &i in ids {
            out.extend_from_slice(tv.row(i));
        }
        let rg = self.needs(table);
        Ok(self.push(
            Tensor::new(vec![ids.len(), d], out)?,
            rg,
            Op::Embedding {
                table,
                ids: ids.to_vec(),
            },
        ))
    }

    /// Sliding windows over rows: `[t, d] -> [t - width + 1, width * d]`,
    /// row `r` being rows `r..r + width` laid end to end. Followed by a
    /// matmul this is a 1-D convolution over time.
    pub fn windows(&mut self, a: Var, width: usize) -> Result<Var> {
        let s = self.shape(a);
        if s.len() != 2 || width == 0 || s[0] < width {
            return Err(Error::shape("windows", &[s, &[width]]));
        }
        let (t, d) = (s[0], s[1]);
        let rows = t - width + 1;
        let data = self.value(a).data();
        let mut out = Vec::with_capacity(rows * width * d);
        for r in 0..rows {
            out.extend_from_slice(&data[r * d..(r + width) * d]);
        }
        let rg = self.needs(a);
        Ok(self.push(
            Tensor::new(vec![rows, width * d], out)?,
            rg,
            Op::Windows { input: a, width },
        ))
    }

    pub fn reshape(&mut self, a: Var, shape: Vec<usize>) -> Result<Var> {
        let value = self.value(a).reshaped(shape)?;
        let rg = self.needs(a);
        Ok(self.push(value, rg, Op::Reshape(a)))
    }

    // ---------------------------------------------------------------------
    // backward

    /// Propagates d(output)/d(node) to every node that requires a gradient.
    pub fn backward(&mut self, output: Var) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyTape);
        }
        if self.state == State::Differentiated {
            return Err(Error::AlreadyDifferentiated);
        }
        if !self.value(output).is_scalar() {
            return Err(Error::NotScalar(self.shape(output).to_vec()));
        }
        self.grads = (0..self.nodes.len()).map(|_| None).collect();
        self.state = State::Differentiated;
        if self.needs(output) {
            self.grads[output.0] = Some(vec![1.0]);
            for i in (0..=output.0).rev() {
                let Some(g) = self.grads[i].take() else {
                    continue;
                };
                self.propagate(i, &g);
                self.grads[i] = Some(g);
            }
        }
        for (node, g) in self.nodes.iter().zip(self.grads.iter_mut()) {
            if node.requires_grad && g.is_none() {
                *g = Some(vec![0.0; node.value.len()]);
            }
        }
        Ok(())
    }

    fn accumulate(&mut self, v: Var, f: impl FnOnce(&mut [f64], &[Node])) {
        if !self.nodes[v.0].requires_grad {
            return;
        }
        let len = self.nodes[v.0].value.len();
        let mut buf = self.grads[v.0].take().unwrap_or_else(|| vec![0.0; len]);
        f(&mut buf, &self.nodes);
        self.grads[v.0] = Some(buf);
    }

    fn propagate(&mut self, i: usize, g: &[f64]) {
        // The op is moved out so `self` can be borrowed mutably below.
        let op = std::mem::replace(&mut self.nodes[i].op, Op::Leaf);
        match &op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (a, b) = (*a, *b);
                let (m, k) = (self.shape(a)[0], self.shape(a)[1]);
                let n = self.shape(b)[1];
                self.accumulate(a, |ga, nodes| {
                    let bv = nodes[b.0].value.data();
                    for r in 0..m {
                        let grow = &g[r * n..(r + 1) * n];
                        for p in 0..k {
                            let brow = &bv[p * n..(p + 1) * n];
                            ga[r * k + p] += dot(grow, brow);
                        }
                    }
                });
                self.accumulate(b, |gb, nodes| {
                    let av = nodes[a.0].value.data();
                    for r in 0..m {
                        let grow = &g[r * n..(r + 1) * n];
                        for p in 0..k {
                            let x = av[r * k + p];
                            if x == 0.0 {
                                continue;
                            }
                            for (o, &gg) in gb[p * n..(p + 1) * n].iter_mut().zip(grow) {
                                *o += x * gg;
                            }
                        }
                    }
                });
            }
            Op::Add(a, b) => {
                for v in [*a, *b] {
                    self.accumulate(v, |ga, _| add_into(ga, g));
                }
            }
            Op::AddBias(a, b) => {
                self.accumulate(*a, |ga, _| add_into(ga, g));
                self.accumulate(*b, |gb, _| {
                    let n = gb.len();
                    for row in g.chunks(n) {
                        add_into(gb, row);
                    }
                });
            }
            Op::Scale(a, c) => {
                let c = *c;
                self.accumulate(*a, |ga, _| {
                    for (o, x) in ga.iter_mut().zip(g) {
                        *o += c * x;
                    }
                });
            }
            Op::Relu(a) => {
                let a = *a;
                self.accumulate(a, |ga, nodes| {
                    let x = nodes[a.0].value.data();
                    for ((o, &gg), &xv) in ga.iter_mut().zip(g).zip(x) {
                        // derivative at exactly 0 is taken as 0
                        if xv > 0.0 {
                            *o += gg;
                        }
                    }
                });
            }
            Op::Sigmoid(a) => {
                let y = self.nodes[i].value.data().to_vec();
                self.accumulate(*a, |ga, _| {
                    for ((o, &gg), &s) in ga.iter_mut().zip(g).zip(&y) {
                        *o += gg * s * (1.0 - s);
                    }
                });
            }
            Op::BceWithLogits { logits, targets } => {
                let logits = *logits;
                let n = targets.len() as f64;
                self.accumulate(logits, |gl, nodes| {
                    let z = nodes[logits.0].value.data();
                    for ((o, &zv), &y) in gl.iter_mut().zip(z).zip(targets) {
                        *o += g[0] * (sigmoid(zv) - y) / n;
                    }
                });
            }
            Op::SoftmaxCrossEntropy {
                logits,
                targets,
                probs,
            } => {
                let m = targets.len();
                let c = probs.len() / m;
                self.accumulate(*logits, |gl, _| {
                    for r in 0..m {
                        for j in 0..c {
                            let ind = if targets[r] == j { 1.0 } else { 0.0 };
                            gl[r * c + j] += g[0] * (probs[r * c + j] - ind) / m as f64;
                        }
                    }
                });
            }
            Op::MaxPoolTime { input, argmax } => {
                let c = argmax.len();
                self.accumulate(*input, |ga, _| {
                    for (j, &r) in argmax.iter().enumerate() {
                        ga[r * c + j] += g[j];
                    }
                });
            }
            Op::Mean(a) => {
                let n = self.value(*a).len() as f64;
                self.accumulate(*a, |ga, _| {
                    for o in ga.iter_mut() {
                        *o += g[0] / n;
                    }
                });
            }
            Op::Sum(a) => {
                self.accumulate(*a, |ga, _| {
                    for o in ga.iter_mut() {
                        *o += g[0];
                    }
                });
            }
            Op::MeanRows(a) => {
                let t = self.shape(*a)[0] as f64;
                self.accumulate(*a, |ga, _| {
                    let c = g.len();
                    for row in ga.chunks_mut(c) {
                        for (o, gg) in row.iter_mut().zip(g) {
                            *o += gg / t;
                        }
                    }
                });
            }
            Op::Concat(parts) => {
                let mut offset = 0;
                for &p in parts {
                    let len = self.value(p).len();
                    let slice = &g[offset..offset + len];
                    self.accumulate(p, |gp, _| add_into(gp, slice));
                    offset += len;
                }
            }
            Op::Dropout { input, factors } => {
                self.accumulate(*input, |ga, _| {
                    for ((o, gg), f) in ga.iter_mut().zip(g).zip(factors) {
                        *o += gg * f;
                    }
                });
            }
            Op::Embedding { table, ids } => {
                let d = self.shape(*table)[1];
                self.accumulate(*table, |gt, _| {
                    for (r, &id) in ids.iter().enumerate() {
                        add_into(&mut gt[id * d..(id + 1) * d], &g[r * d..(r + 1) * d]);
                    }
                });
            }
            Op::Windows { input, width } => {
                let width = *width;
                let d = self.shape(*input)[1];
                let span = width * d;
                self.accumulate(*input, |ga, _| {
                    for (r, row) in g.chunks(span).enumerate() {
                        add_into(&mut ga[r * d..r * d + span], row);
                    }
                });
            }
            Op::Reshape(a) => {
                self.accumulate(*a, |ga, _| add_into(ga, g));
            }
        }
        self.nodes[i].op = op;
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (o, x) in dst.iter_mut().zip(src) {
        *o += x;
    }
}
