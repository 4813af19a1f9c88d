//! Self-describing binary model files.
//!
//! Layout, all integers and floats little-endian:
//!
//! | offset | type        | field                                 |
//! |--------|-------------|---------------------------------------|
//! | 0      | `[u8; 8]`   | magic `GWSTANCE`                      |
//! | 8      | `u32`       | format version                        |
//! | 12     | `u64`       | total file length in bytes            |
//! | 20     | `u32`       | scalar width of the saved model (bits)|
//! | 24     | `u32` x 4   | input_dim, window_len, units, hidden  |
//! | 40     | `f64`       | sample rate (Hz)                      |
//! | 48     | `f64`       | training noise sigma                  |
//! | 56     | `f64` x d   | channel means                         |
//! |        | `f64` x d   | channel standard deviations           |
//! |        | `f64` x P   | parameters in [`crate::nn::Params::tensors`] order |
//! | end-4  | `u32`       | CRC-32 of every preceding byte        |

use std::fs;
use std::path::Path;

use crate::error::{ModelFileError, Result};
use crate::nn::{ModelConfig, StanceModel};
use crate::Scalar;

pub const MAGIC: [u8; 8] = *b"GWSTANCE";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 56;
const PREFIX_LEN: usize = 20;

fn scalar_bits<T: Scalar>() -> u32 {
    (std::mem::size_of::<T>() * 8) as u32
}

pub fn model_to_bytes<T: Scalar>(model: &StanceModel<T>) -> Vec<u8> {
    let c = &model.config;
    let n_floats = 2 * c.input_dim + model.params.num_params();
    let total = HEADER_LEN + 8 * n_floats + 4;
    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(total as u64).to_le_bytes());
    out.extend_from_slice(&scalar_bits::<T>().to_le_bytes());
    for dim in [c.input_dim, c.window_len, c.lstm_units, c.hidden_width] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    out.extend_from_slice(&c.sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&c.noise_sigma.to_le_bytes());
    let values = model
        .channel_mean
        .iter()
        .chain(&model.channel_std)
        .copied()
        .chain(model.params.iter());
    for v in values {
        out.extend_from_slice(&v.to_f64_exact().to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    debug_assert_eq!(out.len(), total);
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out = self.bytes[self.pos..self.pos + N].try_into().expect("length checked");
        self.pos += N;
        out
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub fn model_from_bytes<T: Scalar>(bytes: &[u8]) -> Result<StanceModel<T>, ModelFileError> {
    if bytes.len() < PREFIX_LEN {
        return Err(ModelFileError::Truncated {
            needed: PREFIX_LEN,
            available: bytes.len(),
        });
    }
    if bytes[..8] != MAGIC {
        return Err(ModelFileError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(ModelFileError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let declared = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    if (bytes.len() as u64) < declared {
        return Err(ModelFileError::Truncated {
            needed: declared as usize,
            available: bytes.len(),
        });
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(ModelFileError::Truncated {
            needed: HEADER_LEN + 4,
            available: bytes.len(),
        });
    }
    let body_end = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(ModelFileError::Checksum { stored, computed });
    }
    if declared != bytes.len() as u64 {
        return Err(ModelFileError::BadHeader(format!(
            "declared length {declared} but file has {} bytes",
            bytes.len()
        )));
    }

    let mut cur = Cursor { bytes, pos: PREFIX_LEN };
    let bits = cur.u32();
    if bits != scalar_bits::<T>() {
        return Err(ModelFileError::BadHeader(format!(
            "model was saved with {bits}-bit scalars, loading as {}-bit",
            scalar_bits::<T>()
        )));
    }
    let dims: [usize; 4] = std::array::from_fn(|_| cur.u32() as usize);
    let config = ModelConfig {
        input_dim: dims[0],
        window_len: dims[1],
        lstm_units: dims[2],
        hidden_width: dims[3],
        sample_rate_hz: cur.f64(),
        noise_sigma: cur.f64(),
    };
    let mut model = StanceModel::<T>::zeroed(config).map_err(|e| ModelFileError::BadHeader(e.to_string()))?;
    let n_floats = 2 * config.input_dim + model.params.num_params();
    if HEADER_LEN + 8 * n_floats + 4 != bytes.len() {
        return Err(ModelFileError::BadHeader(format!(
            "dimensions imply {} bytes, file has {}",
            HEADER_LEN + 8 * n_floats + 4,
            bytes.len()
        )));
    }
    let mut read = |dst: &mut [T]| dst.iter_mut().for_each(|v| *v = T::from_f64_lossy(cur.f64()));
    read(&mut model.channel_mean);
    read(&mut model.channel_std);
    for tensor in model.params.tensors_mut() {
        read(tensor);
    }
    model.validate().map_err(|e| ModelFileError::BadHeader(e.to_string()))?;
    Ok(model)
}

pub fn save_model<T: Scalar>(model: &StanceModel<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_bytes(model))?;
    Ok(())
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<StanceModel<T>> {
    let bytes = fs::read(path)?;
    Ok(model_from_bytes(&bytes)?)
}
