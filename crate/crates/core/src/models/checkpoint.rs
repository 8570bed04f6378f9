//! Model checkpoints: one text header line, then every parameter as raw
//! little-endian `f64` in header order.
//!
//! ```text
//! alden-model v1 kind=cnn hidden=100 hidden_layers=0 filters=3,4,5 dropout=0.5 embedding_dim=100 vocab=1234 input_dim=0 bias=1 params=embedding:1234x100;conv3.weight:300x100;...
//! ```

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::config::ModelConfig;
use super::model::Model;
use crate::autodiff::Tensor;
use crate::error::{Error, Result};

const MAGIC: &str = "alden-model v1";

fn header(model: &Model) -> String {
    let c = model.config();
    let filters: Vec<String> = c.filter_sizes.iter().map(|k| k.to_string()).collect();
    let params: Vec<String> = model
        .params()
        .iter()
        .map(|p| {
            let dims: Vec<String> = p.value.shape().iter().map(|d| d.to_string()).collect();
            format!("{}:{}", p.name, dims.join("x"))
        })
        .collect();
    format!(
        "{MAGIC} kind={} hidden={} hidden_layers={} filters={} dropout={} embedding_dim={} vocab={} input_dim={} bias={} params={}",
        c.kind,
        c.hidden,
        c.hidden_layers,
        filters.join(","),
        c.dropout,
        c.embedding_dim,
        c.vocab_size,
        c.input_dim,
        u8::from(c.bias),
        params.join(";"),
    )
}

pub fn to_bytes(model: &Model) -> Vec<u8> {
    let mut out = header(model).into_bytes();
    out.push(b'\n');
    for p in model.params() {
        for v in p.value.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<Model> {
    let bad = |m: &str| Error::Input(format!("checkpoint: {m}"));
    let nl = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| bad("missing header"))?;
    let head = std::str::from_utf8(&bytes[..nl]).map_err(|_| bad("header is not UTF-8"))?;
    let rest = head.strip_prefix(MAGIC).ok_or_else(|| bad("unrecognized header"))?;
    let fields: HashMap<&str, &str> = rest.split_whitespace().filter_map(|kv| kv.split_once('=')).collect();
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(&format!("missing field {k}")));
    let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(&format!("bad field {k}"))) };
    let filters = get("filters")?;
    let config = ModelConfig {
        kind: get("kind")?.parse()?,
        hidden: num("hidden")?,
        hidden_layers: num("hidden_layers")?,
        filter_sizes: if filters.is_empty() {
            Vec::new()
        } else {
            filters
                .split(',')
                .map(|k| k.parse().map_err(|_| bad("bad filter width")))
                .collect::<Result<_>>()?
        },
        dropout: get("dropout")?.parse().map_err(|_| bad("bad dropout"))?,
        embedding_dim: num("embedding_dim")?,
        vocab_size: num("vocab")?,
        input_dim: num("input_dim")?,
        bias: get("bias")? == "1",
    };
    let mut model = Model::new(config, 0)?;
    let declared = get("params")?;
    let expected: Vec<String> = header(&model)
        .rsplit_once("params=")
        .map(|(_, p)| p.to_string())
        .unwrap_or_default()
        .split(';')
        .map(str::to_string)
        .collect();
    if declared.split(';').collect::<Vec<_>>() != expected {
        return Err(bad("parameter layout does not match the configuration"));
    }
    let body = &bytes[nl + 1..];
    if body.len() != model.parameter_count() * 8 {
        return Err(bad("payload length does not match the parameter layout"));
    }
    let mut values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let names: Vec<(String, Vec<usize>)> = model
        .params()
        .iter()
        .map(|p| (p.name.clone(), p.value.shape().to_vec()))
        .collect();
    for (name, shape) in names {
        let n = shape.iter().product();
        let data: Vec<f64> = values.by_ref().take(n).collect();
        model.set_param(&name, Tensor::new(shape, data)?)?;
    }
    Ok(model)
}

/// Writes atomically: the file is either complete or absent.
pub fn save(model: &Model, path: &Path) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(&to_bytes(model)).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Model> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
