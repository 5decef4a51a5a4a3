//! Versioned binary container for trained models.
//!
//! All integers and floats are little-endian; floats are stored as raw IEEE-754
//! bits, so a round trip is bit-exact.
//!
//! ```text
//! offset  size  field
//! 0       8     magic "OSELMMDL"
//! 8       4     format version (u32), currently 1
//! 12      8     payload length P (u64)
//! 20      P     payload
//! 20+P    32    SHA-256 of the payload
//! ```
//!
//! Payload, version 1:
//!
//! ```text
//! u8      activation (0 sigmoid, 1 tanh, 2 hardlimit, 3 sine)
//! u64     input_dim n
//! u64     output_dim L
//! u64     n_hidden K
//! f64     ridge
//! u64     seed
//! u64     samples_seen
//! u8      declared type (0 none, 1 binary, 2 multiclass, 3 multilabel)
//! L x     label name: u32 byte length, UTF-8 bytes
//! u8      normalizer present (0/1); if 1: n f64 minima, n f64 maxima
//! K*n     f64 input weights, row-major (one row per neuron)
//! K       f64 biases
//! K*L     f64 output weights beta, row-major
//! K*K     f64 RLS state matrix M, row-major
//! ```

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use crate::classifier::{classify_batch, FallbackPolicy, Prediction};
use crate::data::Normalizer;
use crate::elm::{Activation, HiddenLayer, NetworkConfig, OnlineModel};
use crate::error::{Error, Result};
use crate::types::{feature_matrix, ClassificationType, Sample};

pub const MAGIC: &[u8; 8] = b"OSELMMDL";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;
const DIGEST_LEN: usize = 32;

/// A trained model plus what is needed to apply it to raw files.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub model: OnlineModel,
    pub normalizer: Option<Normalizer>,
    pub declared_type: Option<ClassificationType>,
    pub label_names: Vec<String>,
}

impl SavedModel {
    pub fn new(model: OnlineModel) -> Self {
        let l = model.config().output_dim;
        Self {
            model,
            normalizer: None,
            declared_type: None,
            label_names: (0..l).map(|j| j.to_string()).collect(),
        }
    }

    /// Normalizes raw feature rows with the stored normalizer, if any, and classifies them.
    pub fn predict(&self, samples: &[Sample], policy: FallbackPolicy) -> Result<Vec<Prediction>> {
        let mut x = feature_matrix(samples);
        if let Some(norm) = &self.normalizer {
            for mut row in x.row_iter_mut() {
                let mut v: Vec<f64> = row.iter().copied().collect();
                norm.apply_features(&mut v);
                row.copy_from_slice(&v);
            }
        }
        classify_batch(&self.model, &x, policy, self.declared_type)
    }
}

pub fn save_model(saved: &SavedModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_bytes(saved)?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    from_bytes(&std::fs::read(path)?)
}

pub fn to_bytes(saved: &SavedModel) -> Result<Vec<u8>> {
    let model = &saved.model;
    let cfg = model.config();
    if saved.label_names.len() != cfg.output_dim {
        return Err(Error::shape(format!(
            "{} label names for {} outputs",
            saved.label_names.len(),
            cfg.output_dim
        )));
    }
    let mut p = Vec::new();
    p.push(cfg.activation.code());
    put_u64(&mut p, cfg.input_dim as u64);
    put_u64(&mut p, cfg.output_dim as u64);
    put_u64(&mut p, cfg.n_hidden as u64);
    put_f64(&mut p, cfg.ridge);
    put_u64(&mut p, cfg.seed);
    put_u64(&mut p, model.samples_seen());
    p.push(match saved.declared_type {
        None => 0,
        Some(ClassificationType::Binary) => 1,
        Some(ClassificationType::MultiClass) => 2,
        Some(ClassificationType::MultiLabel) => 3,
    });
    for name in &saved.label_names {
        p.extend_from_slice(&(name.len() as u32).to_le_bytes());
        p.extend_from_slice(name.as_bytes());
    }
    match &saved.normalizer {
        Some(norm) => {
            if norm.dim() != cfg.input_dim {
                return Err(Error::shape(format!(
                    "normalizer covers {} features, model expects {}",
                    norm.dim(),
                    cfg.input_dim
                )));
            }
            p.push(1);
            norm.mins().iter().for_each(|&v| put_f64(&mut p, v));
            norm.maxs().iter().for_each(|&v| put_f64(&mut p, v));
        }
        None => p.push(0),
    }
    put_matrix(&mut p, model.layer().weights());
    model
        .layer()
        .biases()
        .iter()
        .for_each(|&v| put_f64(&mut p, v));
    put_matrix(&mut p, model.beta());
    put_matrix(&mut p, model.state_matrix());

    let mut out = Vec::with_capacity(HEADER_LEN + p.len() + DIGEST_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    put_u64(&mut out, p.len() as u64);
    out.extend_from_slice(&p);
    out.extend_from_slice(&Sha256::digest(&p));
    Ok(out)
}

pub fn from_bytes(bytes: &[u8]) -> Result<SavedModel> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Integrity(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Integrity("not a model file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    let expected_total = (HEADER_LEN as u64)
        .checked_add(len)
        .and_then(|v| v.checked_add(DIGEST_LEN as u64));
    if expected_total != Some(bytes.len() as u64) {
        return Err(Error::Integrity(format!(
            "payload length {len} does not match file size {}",
            bytes.len()
        )));
    }
    let payload = &bytes[HEADER_LEN..HEADER_LEN + len as usize];
    let digest = &bytes[HEADER_LEN + len as usize..];
    if Sha256::digest(payload).as_slice() != digest {
        return Err(Error::Integrity("checksum mismatch".into()));
    }
    decode_payload(payload)
}

fn decode_payload(payload: &[u8]) -> Result<SavedModel> {
    let mut r = Reader {
        buf: payload,
        pos: 0,
    };
    let activation = Activation::from_code(r.u8()?)
        .ok_or_else(|| Error::Integrity("unknown activation code".into()))?;
    let input_dim = r.usize()?;
    let output_dim = r.usize()?;
    let n_hidden = r.usize()?;
    let ridge = r.f64()?;
    let seed = r.u64()?;
    let samples_seen = r.u64()?;
    let declared_type = match r.u8()? {
        0 => None,
        1 => Some(ClassificationType::Binary),
        2 => Some(ClassificationType::MultiClass),
        3 => Some(ClassificationType::MultiLabel),
        other => return Err(Error::Integrity(format!("unknown type code {other}"))),
    };
    let config = NetworkConfig {
        n_hidden,
        activation,
        input_dim,
        output_dim,
        ridge,
        seed,
    };
    config
        .validate()
        .map_err(|e| Error::Integrity(format!("stored configuration invalid: {e}")))?;

    let mut label_names = Vec::with_capacity(output_dim);
    for _ in 0..output_dim {
        let n = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes")) as usize;
        let name = std::str::from_utf8(r.take(n)?)
            .map_err(|_| Error::Integrity("label name is not UTF-8".into()))?;
        label_names.push(name.to_string());
    }
    let normalizer = match r.u8()? {
        0 => None,
        1 => {
            let mins = r.f64s(input_dim)?;
            let maxs = r.f64s(input_dim)?;
            Some(Normalizer::from_bounds(mins, maxs).map_err(|e| Error::Integrity(e.to_string()))?)
        }
        other => return Err(Error::Integrity(format!("bad normalizer flag {other}"))),
    };
    let weights = r.matrix(n_hidden, input_dim)?;
    let biases = DVector::from_vec(r.f64s(n_hidden)?);
    let beta = r.matrix(n_hidden, output_dim)?;
    let m = r.matrix(n_hidden, n_hidden)?;
    if r.pos != payload.len() {
        return Err(Error::Integrity(format!(
            "{} unexpected trailing payload bytes",
            payload.len() - r.pos
        )));
    }
    let layer = HiddenLayer::from_parts(config, weights, biases)?;
    Ok(SavedModel {
        model: OnlineModel::from_parts(layer, beta, m, samples_seen)?,
        normalizer,
        declared_type,
        label_names,
    })
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_bits().to_le_bytes());
}

fn put_matrix(out: &mut Vec<u8>, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            put_f64(out, m[(i, j)]);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Integrity("payload ends early".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?)
            .map_err(|_| Error::Integrity("dimension overflows usize".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = n
            .checked_mul(8)
            .ok_or_else(|| Error::Integrity("dimension overflows usize".into()))?;
        Ok(self
            .take(bytes)?
            .chunks_exact(8)
            .map(|c| f64::from_bits(u64::from_le_bytes(c.try_into().expect("8 bytes"))))
            .collect())
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Integrity("dimension overflows usize".into()))?;
        Ok(DMatrix::from_row_slice(rows, cols, &self.f64s(n)?))
    }
}
