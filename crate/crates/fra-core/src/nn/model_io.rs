//! Model file format.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! magic "FRAM" | version u16
//! | architecture name (u16 len + utf8)
//! | width count u16 | widths u32 each
//! | dropout count u16 | dropout layer indices u16 each | dropout rate f32
//! | input scale f32 | connection u8 (0 none, 1 EE, 2 CIW)
//! | class count u16 | class names (u16 len + utf8) each
//! | per layer: weights row-major f32, then bias f32
//! ```
//!
//! The file is self-describing: everything needed to rebuild the spec,
//! the label scheme, and the preprocessing constant rides along with the
//! tensors.

use std::fs;
use std::path::Path;

use super::mat::Mat;
use super::model::{DenseLayer, ModelParams, ModelSpec};
use crate::data::{Connection, LabelScheme};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"FRAM";
pub const MODEL_VERSION: u16 = 1;

/// Raw dB inputs are divided by this before entering the first layer.
pub const DEFAULT_INPUT_SCALE: f32 = 100.0;

/// Descriptive header accompanying the tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub architecture: String,
    pub class_names: Vec<String>,
    /// The connection whose data the model was trained on, if any.
    pub connection: Option<Connection>,
    pub input_scale: f32,
}

/// A trained model plus everything needed to use it.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub spec: ModelSpec,
    pub params: ModelParams<f32>,
    pub meta: ModelMeta,
}

impl SavedModel {
    pub fn new(spec: ModelSpec, params: ModelParams<f32>, meta: ModelMeta) -> Result<Self> {
        if !params.matches_spec(&spec) {
            return Err(Error::domain("parameters do not match the model spec"));
        }
        if meta.class_names.len() != spec.output_width() {
            return Err(Error::domain(format!(
                "{} class names for an output width of {}",
                meta.class_names.len(),
                spec.output_width()
            )));
        }
        Ok(SavedModel { spec, params, meta })
    }

    /// The label scheme this model was trained for.
    pub fn scheme(&self) -> Result<LabelScheme> {
        LabelScheme::from_class_names(&self.meta.class_names)
    }
}

fn push_str(out: &mut Vec<u8>, s: &str) {
    let bytes = s.as_bytes();
    out.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
    out.extend_from_slice(bytes);
}

pub fn model_to_bytes(model: &SavedModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    push_str(&mut out, &model.meta.architecture);
    let widths = model.spec.widths();
    out.extend_from_slice(&(widths.len() as u16).to_le_bytes());
    for &w in widths {
        out.extend_from_slice(&(w as u32).to_le_bytes());
    }
    let dropout = model.spec.dropout_after();
    out.extend_from_slice(&(dropout.len() as u16).to_le_bytes());
    for &d in dropout {
        out.extend_from_slice(&(d as u16).to_le_bytes());
    }
    out.extend_from_slice(&(model.spec.dropout_rate() as f32).to_le_bytes());
    out.extend_from_slice(&model.meta.input_scale.to_le_bytes());
    out.push(match model.meta.connection {
        None => 0,
        Some(Connection::Ee) => 1,
        Some(Connection::Ciw) => 2,
    });
    out.extend_from_slice(&(model.meta.class_names.len() as u16).to_le_bytes());
    for name in &model.meta.class_names {
        push_str(&mut out, name);
    }
    for layer in &model.params.layers {
        for v in layer.weights.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &layer.bias {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn save_model(model: &SavedModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_bytes(model))?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::format(
                self.pos as u64,
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let len = self.u16(what)? as usize;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::format(self.pos as u64, format!("{what} is not UTF-8")))
    }
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<SavedModel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != MODEL_MAGIC {
        return Err(Error::format(0, format!("bad magic {magic:02x?}")));
    }
    let version = r.u16("version")?;
    if version != MODEL_VERSION {
        return Err(Error::format(
            r.pos as u64,
            format!("unsupported version {version}"),
        ));
    }
    let architecture = r.string("architecture name")?;
    let width_count = r.u16("width count")? as usize;
    let mut widths = Vec::with_capacity(width_count);
    for _ in 0..width_count {
        widths.push(r.u32("width")? as usize);
    }
    let dropout_count = r.u16("dropout count")? as usize;
    let mut dropout_after = Vec::with_capacity(dropout_count);
    for _ in 0..dropout_count {
        dropout_after.push(r.u16("dropout index")? as usize);
    }
    let dropout_rate = r.f32("dropout rate")? as f64;
    let input_scale = r.f32("input scale")?;
    let connection = match r.u8("connection")? {
        0 => None,
        1 => Some(Connection::Ee),
        2 => Some(Connection::Ciw),
        c => return Err(Error::format(r.pos as u64 - 1, format!("bad connection tag {c}"))),
    };
    let class_count = r.u16("class count")? as usize;
    let mut class_names = Vec::with_capacity(class_count);
    for _ in 0..class_count {
        class_names.push(r.string("class name")?);
    }
    let spec = ModelSpec::new(widths, dropout_after, dropout_rate)
        .map_err(|e| Error::format(r.pos as u64, e.to_string()))?;
    let mut layers = Vec::with_capacity(spec.depth());
    for w in spec.widths().windows(2).collect::<Vec<_>>() {
        let (fan_in, fan_out) = (w[0], w[1]);
        let mut weights = Vec::with_capacity(fan_in * fan_out);
        for _ in 0..fan_in * fan_out {
            weights.push(r.f32("weights")?);
        }
        let mut bias = Vec::with_capacity(fan_out);
        for _ in 0..fan_out {
            bias.push(r.f32("bias")?);
        }
        layers.push(DenseLayer {
            weights: Mat::from_vec(fan_out, fan_in, weights),
            bias,
        });
    }
    if r.pos != bytes.len() {
        return Err(Error::format(
            r.pos as u64,
            format!("{} trailing bytes", bytes.len() - r.pos),
        ));
    }
    let meta = ModelMeta {
        architecture,
        class_names,
        connection,
        input_scale,
    };
    SavedModel::new(spec, ModelParams { layers }, meta)
        .map_err(|e| Error::format(bytes.len() as u64, e.to_string()))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    let bytes = fs::read(path)?;
    model_from_bytes(&bytes)
}

/// Loads a model and checks its class list against the scheme the caller
/// intends to use it with.
pub fn load_model_for_scheme(path: impl AsRef<Path>, scheme: &LabelScheme) -> Result<SavedModel> {
    let model = load_model(path)?;
    if model.meta.class_names != scheme.class_names() {
        return Err(Error::format(
            0,
            format!(
                "model class list {:?} disagrees with the requested scheme {:?}",
                model.meta.class_names,
                scheme.class_names()
            ),
        ));
    }
    Ok(model)
}
