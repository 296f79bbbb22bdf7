//! Binary model container.
//!
//! | field | encoding |
//! |---|---|
//! | magic | `MLNNMODL` |
//! | version | u32 |
//! | D, F, L | u64 each |
//! | hidden activation, loss kind, label weighting | u8 each |
//! | W1, b1, W2, b2 | f64 blocks in [`NetworkParams`] layout |
//! | threshold flag | u8, 0 or 1 |
//! | λ, intercept, D weights | f64, only when the flag is 1 |
//!
//! All integers and floats are little-endian.

use std::path::Path;

use mlnn_core::network::{
    Activation, Block, Dims, LabelWeighting, LossConfig, LossKind, NetworkParams,
};
use mlnn_core::threshold::ThresholdModel;
use mlnn_core::train::Model;

use crate::FormatError;

pub const MAGIC: &[u8; 8] = b"MLNNMODL";
pub const VERSION: u32 = 1;

fn activation_code(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::Tanh => 1,
        Activation::Sigmoid => 2,
    }
}

fn loss_code(k: LossKind) -> u8 {
    match k {
        LossKind::CrossEntropy => 0,
        LossKind::Pairwise => 1,
    }
}

fn weighting_code(w: LabelWeighting) -> u8 {
    match w {
        LabelWeighting::Unit => 0,
        LabelWeighting::InverseCardinality => 1,
    }
}

pub fn encode(model: &Model) -> Vec<u8> {
    let dims = model.params.dims();
    let mut out = Vec::with_capacity(64 + 8 * dims.param_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for n in [dims.input, dims.hidden, dims.labels] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    out.push(activation_code(model.hidden_activation));
    out.push(loss_code(model.loss.kind));
    out.push(weighting_code(model.loss.weighting));
    let mut floats = |xs: &[f64]| {
        for x in xs {
            out.extend_from_slice(&x.to_le_bytes());
        }
    };
    for b in Block::ALL {
        floats(model.params.block(b));
    }
    match &model.threshold {
        None => out.push(0),
        Some(t) => {
            out.push(1);
            out.extend_from_slice(&t.lambda.to_le_bytes());
            out.extend_from_slice(&t.intercept.to_le_bytes());
            for w in &t.weights {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    rest: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.rest.len() < n {
            return Err(FormatError::Truncated);
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, FormatError> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| FormatError::Invalid(format!("dimension {v} too large")))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, FormatError> {
        let bytes = n
            .checked_mul(8)
            .filter(|&b| b <= self.rest.len())
            .ok_or(FormatError::Truncated)?;
        Ok(self
            .take(bytes)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

fn bad_enum(what: &str, code: u8) -> FormatError {
    FormatError::Invalid(format!("unknown {what} code {code}"))
}

pub fn decode(bytes: &[u8]) -> Result<Model, FormatError> {
    let mut r = Reader { rest: bytes };
    if r.take(MAGIC.len()).map_err(|_| FormatError::BadMagic)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let dims = Dims::new(r.len()?, r.len()?, r.len()?);
    let hidden_activation = match r.u8()? {
        0 => Activation::Relu,
        1 => Activation::Tanh,
        2 => Activation::Sigmoid,
        c => return Err(bad_enum("activation", c)),
    };
    let kind = match r.u8()? {
        0 => LossKind::CrossEntropy,
        1 => LossKind::Pairwise,
        c => return Err(bad_enum("loss", c)),
    };
    let weighting = match r.u8()? {
        0 => LabelWeighting::Unit,
        1 => LabelWeighting::InverseCardinality,
        c => return Err(bad_enum("label weighting", c)),
    };
    let w1 = r.f64s(dims.block_len(Block::W1))?;
    let b1 = r.f64s(dims.block_len(Block::B1))?;
    let w2 = r.f64s(dims.block_len(Block::W2))?;
    let b2 = r.f64s(dims.block_len(Block::B2))?;
    let params = NetworkParams::from_blocks(dims, w1, b1, w2, b2)?;
    let threshold = match r.u8()? {
        0 => None,
        1 => {
            let lambda = r.f64()?;
            let intercept = r.f64()?;
            let weights = r.f64s(dims.input)?;
            Some(ThresholdModel {
                weights,
                intercept,
                lambda,
            })
        }
        c => return Err(bad_enum("threshold flag", c)),
    };
    if !r.rest.is_empty() {
        return Err(FormatError::TrailingBytes(r.rest.len()));
    }
    Ok(Model {
        params,
        hidden_activation,
        loss: LossConfig { kind, weighting },
        threshold,
    })
}

pub fn save(path: &Path, model: &Model) -> Result<(), FormatError> {
    Ok(std::fs::write(path, encode(model))?)
}

pub fn load(path: &Path) -> Result<Model, FormatError> {
    decode(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(threshold: bool) -> Model {
        let dims = Dims::new(3, 2, 4);
        Model {
            params: NetworkParams::init(dims, 7),
            hidden_activation: Activation::Tanh,
            loss: LossConfig::pairwise(),
            threshold: threshold.then(|| ThresholdModel {
                weights: vec![0.25, -1.5, 1e-300],
                intercept: 0.125,
                lambda: 1.0,
            }),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        for t in [false, true] {
            let m = model(t);
            let bytes = encode(&m);
            let back = decode(&bytes).unwrap();
            assert_eq!(back, m);
            assert_eq!(encode(&back), bytes);
        }
    }

    #[test]
    fn layout_size() {
        let bytes = encode(&model(true));
        let params = 3 * 2 + 2 + 4 * 2 + 4;
        assert_eq!(bytes.len(), 8 + 4 + 24 + 3 + 8 * params + 1 + 8 * (2 + 3));
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode(&model(true));
        assert!(matches!(decode(b"nope"), Err(FormatError::BadMagic)));
        let mut v = bytes.clone();
        v[8] = 9;
        assert!(matches!(
            decode(&v),
            Err(FormatError::UnsupportedVersion(9))
        ));
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(FormatError::Truncated)
        ));
        let mut v = bytes.clone();
        v.push(0);
        assert!(matches!(decode(&v), Err(FormatError::TrailingBytes(1))));
        let mut v = bytes.clone();
        v[36] = 5;
        assert!(matches!(decode(&v), Err(FormatError::Invalid(_))));
    }
}
