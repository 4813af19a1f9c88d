use rand::Rng;

use crate::error::{Error, Result};
use crate::Scalar;

/// Number of LSTM gates; packed in the order input, forget, cell candidate, output.
pub const GATES: usize = 4;

/// Parameters of a single LSTM layer.
///
/// `kernel` is `(input_dim x 4*units)` and `recurrent` is `(units x 4*units)`, both
/// row-major. Columns are grouped by gate `[i | f | g | o]`, `units` columns each.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams<T> {
    pub input_dim: usize,
    pub units: usize,
    pub kernel: Vec<T>,
    pub recurrent: Vec<T>,
    pub bias: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sigmoid,
}

/// Fully connected layer, `weight` is `(n_in x n_out)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams<T> {
    pub n_in: usize,
    pub n_out: usize,
    pub weight: Vec<T>,
    pub bias: Vec<T>,
    pub activation: Activation,
}

/// Every learnable tensor of the network. Gradients share this layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    pub lstm: LstmParams<T>,
    pub hidden: DenseParams<T>,
    pub output: DenseParams<T>,
}

pub type Gradients<T> = Params<T>;

fn glorot_uniform<T: Scalar, R: Rng>(rng: &mut R, fan_in: usize, fan_out: usize, n: usize) -> Vec<T> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..n)
        .map(|_| T::from_f64_lossy(rng.gen_range(-limit..limit)))
        .collect()
}

impl<T: Scalar> LstmParams<T> {
    pub fn zeros(input_dim: usize, units: usize) -> Self {
        Self {
            input_dim,
            units,
            kernel: vec![T::zero(); input_dim * GATES * units],
            recurrent: vec![T::zero(); units * GATES * units],
            bias: vec![T::zero(); GATES * units],
        }
    }

    /// Glorot-uniform kernels, zero biases except the forget gate at 1.
    pub fn init<R: Rng>(input_dim: usize, units: usize, rng: &mut R) -> Self {
        let width = GATES * units;
        let mut bias = vec![T::zero(); width];
        bias[units..2 * units].iter_mut().for_each(|b| *b = T::one());
        Self {
            input_dim,
            units,
            kernel: glorot_uniform(rng, input_dim, width, input_dim * width),
            recurrent: glorot_uniform(rng, units, width, units * width),
            bias,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let width = GATES * self.units;
        if self.units == 0 || self.input_dim == 0 {
            return Err(Error::Config("LSTM dimensions must be non-zero".into()));
        }
        if self.kernel.len() != self.input_dim * width
            || self.recurrent.len() != self.units * width
            || self.bias.len() != width
        {
            return Err(Error::Config(format!(
                "LSTM tensor shapes do not match input_dim={} units={}",
                self.input_dim, self.units
            )));
        }
        Ok(())
    }
}

impl<T: Scalar> DenseParams<T> {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            weight: vec![T::zero(); n_in * n_out],
            bias: vec![T::zero(); n_out],
            activation: Activation::Sigmoid,
        }
    }

    pub fn init<R: Rng>(n_in: usize, n_out: usize, rng: &mut R) -> Self {
        Self {
            weight: glorot_uniform(rng, n_in, n_out, n_in * n_out),
            ..Self::zeros(n_in, n_out)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_in == 0 || self.n_out == 0 {
            return Err(Error::Config("dense dimensions must be non-zero".into()));
        }
        if self.weight.len() != self.n_in * self.n_out || self.bias.len() != self.n_out {
            return Err(Error::Config(format!(
                "dense tensor shapes do not match ({} -> {})",
                self.n_in, self.n_out
            )));
        }
        Ok(())
    }

    /// `out = act(input * W + b)`, also returning the pre-activation when `pre` is given.
    #[inline]
    pub(crate) fn forward_into(&self, input: &[T], pre: Option<&mut [T]>, out: &mut [T]) {
        out.copy_from_slice(&self.bias);
        for (k, &x) in input.iter().enumerate() {
            let row = &self.weight[k * self.n_out..(k + 1) * self.n_out];
            for (o, &w) in out.iter_mut().zip(row) {
                *o = *o + x * w;
            }
        }
        if let Some(pre) = pre {
            pre.copy_from_slice(out);
        }
        match self.activation {
            Activation::Sigmoid => out.iter_mut().for_each(|o| *o = o.sigmoid()),
        }
    }
}

impl<T: Scalar> Params<T> {
    pub fn zeros(input_dim: usize, units: usize, hidden_width: usize) -> Self {
        Self {
            lstm: LstmParams::zeros(input_dim, units),
            hidden: DenseParams::zeros(units, hidden_width),
            output: DenseParams::zeros(hidden_width, 1),
        }
    }

    pub fn init<R: Rng>(input_dim: usize, units: usize, hidden_width: usize, rng: &mut R) -> Self {
        Self {
            lstm: LstmParams::init(input_dim, units, rng),
            hidden: DenseParams::init(units, hidden_width, rng),
            output: DenseParams::init(hidden_width, 1, rng),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.lstm.input_dim, self.lstm.units, self.hidden.n_out)
    }

    pub fn validate(&self) -> Result<()> {
        self.lstm.validate()?;
        self.hidden.validate()?;
        self.output.validate()?;
        if self.hidden.n_in != self.lstm.units || self.output.n_in != self.hidden.n_out {
            return Err(Error::Config("layer widths do not chain".into()));
        }
        if self.output.n_out != 1 {
            return Err(Error::Config("output layer must have exactly one unit".into()));
        }
        Ok(())
    }

    /// Tensors in their fixed serialization order.
    pub fn tensors(&self) -> [&[T]; 7] {
        [
            &self.lstm.kernel,
            &self.lstm.recurrent,
            &self.lstm.bias,
            &self.hidden.weight,
            &self.hidden.bias,
            &self.output.weight,
            &self.output.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [T]; 7] {
        [
            &mut self.lstm.kernel,
            &mut self.lstm.recurrent,
            &mut self.lstm.bias,
            &mut self.hidden.weight,
            &mut self.hidden.bias,
            &mut self.output.weight,
            &mut self.output.bias,
        ]
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.tensors().into_iter().flat_map(|t| t.iter().copied())
    }

    /// Mutable access to the `index`-th scalar in serialization order.
    pub fn get_mut(&mut self, mut index: usize) -> Option<&mut T> {
        for t in self.tensors_mut() {
            if index < t.len() {
                return Some(&mut t[index]);
            }
            index -= t.len();
        }
        None
    }

    pub fn fill(&mut self, value: T) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v = value);
        }
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &Self, scale: T) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = *d + scale * s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}
