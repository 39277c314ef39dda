//! Little-endian binary model format; see `docs/model-format.md`.

use std::path::Path;

use byteorder::{ByteOrder, LittleEndian};
use ndarray::{Array1, Array2};

use super::{Activation, AeConfig, AeModel, Layer, Optimizer};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DIAE";
pub const VERSION: u32 = 1;

const OPT_SGD: u8 = 0;
const OPT_ADAM: u8 = 1;

impl AeModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = self.config();
        let mut out = Vec::with_capacity(128 + 8 * self.parameter_count());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(c.layer_sizes.len() as u32).to_le_bytes());
        for &s in &c.layer_sizes {
            out.extend_from_slice(&(s as u32).to_le_bytes());
        }
        out.extend(c.activations.iter().map(|a| a.code()));
        out.extend_from_slice(&c.lambda.to_le_bytes());
        out.extend_from_slice(&c.learning_rate.to_le_bytes());
        out.extend_from_slice(&(c.epochs as u64).to_le_bytes());
        out.extend_from_slice(&(c.batch_size as u64).to_le_bytes());
        out.extend_from_slice(&c.seed.to_le_bytes());
        out.extend_from_slice(&c.init_scale.to_le_bytes());
        match c.optimizer {
            Optimizer::Sgd => out.push(OPT_SGD),
            Optimizer::Adam { beta1, beta2, epsilon } => {
                out.push(OPT_ADAM);
                for v in [beta1, beta2, epsilon] {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        for layer in self.layers() {
            for &v in layer.weights.iter().chain(layer.biases.iter()) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let history = self.training_history();
        out.extend_from_slice(&(history.len() as u64).to_le_bytes());
        for &v in history {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Decodes [`AeModel::to_bytes`] output. Never panics on malformed input.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::format(0, "bad magic, expected DIAE"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::format(4, format!("unsupported version {version}")));
        }
        let count = r.count(4)?;
        let mut layer_sizes = Vec::with_capacity(count);
        for _ in 0..count {
            layer_sizes.push(r.u32()? as usize);
        }
        if count < 2 {
            return Err(Error::format(r.pos, "need at least two layer sizes"));
        }
        let mut activations = Vec::with_capacity(count - 1);
        for _ in 1..count {
            let at = r.pos;
            let code = r.u8()?;
            activations.push(
                Activation::from_code(code)
                    .ok_or_else(|| Error::format(at, format!("unknown activation code {code}")))?,
            );
        }
        let lambda = r.f64()?;
        let learning_rate = r.f64()?;
        let epochs = r.usize()?;
        let batch_size = r.usize()?;
        let seed = r.u64()?;
        let init_scale = r.f64()?;
        let at = r.pos;
        let optimizer = match r.u8()? {
            OPT_SGD => Optimizer::Sgd,
            OPT_ADAM => Optimizer::Adam {
                beta1: r.f64()?,
                beta2: r.f64()?,
                epsilon: r.f64()?,
            },
            other => return Err(Error::format(at, format!("unknown optimizer code {other}"))),
        };
        let config = AeConfig {
            layer_sizes,
            activations,
            lambda,
            learning_rate,
            epochs,
            batch_size,
            seed,
            init_scale,
            optimizer,
        };
        let config_end = r.pos;
        config
            .validate()
            .map_err(|e| Error::format(config_end, format!("invalid config: {e}")))?;

        let mut layers = Vec::with_capacity(count - 1);
        for w in config.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let n = fan_in
                .checked_mul(fan_out)
                .ok_or_else(|| Error::format(r.pos, "layer size overflow"))?;
            let weights = Array2::from_shape_vec((fan_out, fan_in), r.f64s(n)?)
                .expect("length matches shape");
            let biases = Array1::from(r.f64s(fan_out)?);
            layers.push(Layer { weights, biases });
        }
        let len = r.count(8)?;
        let history = r.f64s(len)?;
        if r.pos != bytes.len() {
            return Err(Error::format(r.pos, "trailing bytes after model"));
        }
        let end = r.pos;
        AeModel::from_parts(config, layers, history).map_err(|e| Error::format(end, e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::format(self.pos, format!("need {n} more bytes")))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(LittleEndian::read_u32(self.take(4)?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(LittleEndian::read_u64(self.take(8)?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(LittleEndian::read_f64(self.take(8)?))
    }

    fn usize(&mut self) -> Result<usize> {
        let at = self.pos;
        usize::try_from(self.u64()?).map_err(|_| Error::format(at, "value exceeds usize"))
    }

    /// Reads an element count, rejecting counts the remaining bytes cannot hold.
    fn count(&mut self, elem_size: usize) -> Result<usize> {
        let at = self.pos;
        let n = if elem_size == 4 { self.u32()? as usize } else { self.usize()? };
        let remaining = self.bytes.len() - self.pos;
        if n > remaining / elem_size {
            return Err(Error::format(at, format!("count {n} exceeds remaining {remaining} bytes")));
        }
        Ok(n)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| Error::format(self.pos, "length overflow"))?;
        let raw = self.take(len)?;
        Ok(raw.chunks_exact(8).map(LittleEndian::read_f64).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AeModel {
        let mut c = AeConfig::five_layer(6, Activation::Tanh);
        c.layer_sizes = vec![6, 5, 2, 5, 6];
        c.activations = vec![Activation::Relu, Activation::Identity, Activation::Sigmoid, Activation::Tanh];
        c.seed = 9;
        let mut m = AeModel::init(&c).unwrap();
        m.push_history(1.5);
        m.push_history(0.25);
        m
    }

    #[test]
    fn round_trip_is_exact() {
        let m = small();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], MAGIC);
        assert_eq!(AeModel::from_bytes(&bytes).unwrap(), m);
        let mut sgd = m.config().clone();
        sgd.optimizer = Optimizer::Sgd;
        let m2 = AeModel::from_parts(sgd, m.layers().to_vec(), vec![]).unwrap();
        assert_eq!(AeModel::from_bytes(&m2.to_bytes()).unwrap(), m2);
    }

    #[test]
    fn every_truncation_is_a_format_error() {
        let bytes = small().to_bytes();
        for cut in 0..bytes.len() {
            assert!(
                matches!(AeModel::from_bytes(&bytes[..cut]), Err(Error::Format { .. })),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn corrupt_header_fields() {
        let good = small().to_bytes();
        let mut b = good.clone();
        b[0] = b'X';
        assert!(matches!(AeModel::from_bytes(&b), Err(Error::Format { offset: 0, .. })));
        let mut b = good.clone();
        b[4] = 2;
        assert!(matches!(AeModel::from_bytes(&b), Err(Error::Format { offset: 4, .. })));
        let mut b = good.clone();
        b[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(AeModel::from_bytes(&b), Err(Error::Format { offset: 8, .. })));
        let mut b = good;
        b.push(0);
        assert!(matches!(AeModel::from_bytes(&b), Err(Error::Format { .. })));
    }
}
