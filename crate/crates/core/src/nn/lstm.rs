use crate::error::{Error, Result};
use crate::nn::params::{LstmParams, GATES};
use crate::nn::window::WindowView;
use crate::Scalar;

/// Everything backpropagation through time needs from one forward pass.
///
/// Per-step buffers are row-major with one row per time step. `gates` holds the
/// activated gate values in `[i | f | g | o]` order.
#[derive(Debug, Clone, Default)]
pub struct ForwardCache<T> {
    pub(crate) steps: usize,
    pub(crate) input_dim: usize,
    pub(crate) units: usize,
    /// Input actually fed to the recurrence (after noise, if any).
    pub(crate) input: Vec<T>,
    pub(crate) noised: bool,
    pub(crate) gates: Vec<T>,
    pub(crate) cells: Vec<T>,
    pub(crate) cells_tanh: Vec<T>,
    pub(crate) hidden: Vec<T>,
    pub(crate) dense_pre: Vec<T>,
    pub(crate) dense_act: Vec<T>,
    pub(crate) out_pre: T,
    pub(crate) alpha: T,
}

impl<T: Scalar> ForwardCache<T> {
    pub fn len(&self) -> usize {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }

    pub fn gates(&self, step: usize) -> &[T] {
        let w = GATES * self.units;
        &self.gates[step * w..(step + 1) * w]
    }

    pub fn cell(&self, step: usize) -> &[T] {
        &self.cells[step * self.units..(step + 1) * self.units]
    }

    pub fn cell_tanh(&self, step: usize) -> &[T] {
        &self.cells_tanh[step * self.units..(step + 1) * self.units]
    }

    pub fn hidden(&self, step: usize) -> &[T] {
        &self.hidden[step * self.units..(step + 1) * self.units]
    }

    pub fn input(&self) -> &[T] {
        &self.input
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub(crate) fn resize(&mut self, steps: usize, input_dim: usize, units: usize, hidden_width: usize) {
        self.steps = steps;
        self.input_dim = input_dim;
        self.units = units;
        self.input.resize(steps * input_dim, T::zero());
        self.gates.resize(steps * GATES * units, T::zero());
        self.cells.resize(steps * units, T::zero());
        self.cells_tanh.resize(steps * units, T::zero());
        self.hidden.resize(steps * units, T::zero());
        self.dense_pre.resize(hidden_width, T::zero());
        self.dense_act.resize(hidden_width, T::zero());
    }
}

/// One LSTM step. `z` receives the activated gates, `c` and `h` the new state.
///
/// Shared by the cached training path and the allocation-free inference path so
/// both produce bit-identical results.
#[inline]
pub(crate) fn cell_step<T: Scalar>(
    p: &LstmParams<T>,
    x: &[T],
    h_prev: &[T],
    c_prev: &[T],
    z: &mut [T],
    c: &mut [T],
    c_tanh: &mut [T],
    h: &mut [T],
) {
    let n = p.units;
    let width = GATES * n;
    z.copy_from_slice(&p.bias);
    for (k, &xk) in x.iter().enumerate() {
        let row = &p.kernel[k * width..(k + 1) * width];
        for (zj, &w) in z.iter_mut().zip(row) {
            *zj = *zj + xk * w;
        }
    }
    for (k, &hk) in h_prev.iter().enumerate() {
        let row = &p.recurrent[k * width..(k + 1) * width];
        for (zj, &u) in z.iter_mut().zip(row) {
            *zj = *zj + hk * u;
        }
    }
    let (ifg, o) = z.split_at_mut(3 * n);
    let (i_f, g) = ifg.split_at_mut(2 * n);
    i_f.iter_mut().for_each(|v| *v = v.sigmoid());
    g.iter_mut().for_each(|v| *v = v.tanh());
    o.iter_mut().for_each(|v| *v = v.sigmoid());
    let (i, f) = i_f.split_at(n);
    for u in 0..n {
        let cu = f[u] * c_prev[u] + i[u] * g[u];
        let tu = cu.tanh();
        c[u] = cu;
        c_tanh[u] = tu;
        h[u] = o[u] * tu;
    }
}

pub(crate) fn check_input<T: Scalar>(x: &WindowView<'_, T>, p: &LstmParams<T>) -> Result<()> {
    if x.cols() != p.input_dim {
        return Err(Error::Config(format!(
            "window has {} channels, LSTM expects {}",
            x.cols(),
            p.input_dim
        )));
    }
    p.validate()
}

/// Runs the recurrence from zero state over `cache.input`, filling the per-step buffers.
pub(crate) fn forward_cached<T: Scalar>(p: &LstmParams<T>, cache: &mut ForwardCache<T>) {
    let n = p.units;
    let width = GATES * n;
    let d = p.input_dim;
    let zeros = vec![T::zero(); n];
    for t in 0..cache.steps {
        let x = &cache.input[t * d..(t + 1) * d];
        let (h_done, h_rest) = cache.hidden.split_at_mut(t * n);
        let (c_done, c_rest) = cache.cells.split_at_mut(t * n);
        let (h_prev, c_prev) = if t == 0 {
            (&zeros[..], &zeros[..])
        } else {
            (&h_done[(t - 1) * n..], &c_done[(t - 1) * n..])
        };
        cell_step(
            p,
            x,
            h_prev,
            c_prev,
            &mut cache.gates[t * width..(t + 1) * width],
            &mut c_rest[..n],
            &mut cache.cells_tanh[t * n..(t + 1) * n],
            &mut h_rest[..n],
        );
    }
}

/// Standard LSTM over the whole window from `h_0 = c_0 = 0`.
///
/// Returns the hidden state after the last row together with the per-step cache
/// (dense-layer fields of the cache are left empty).
pub fn lstm_forward<T: Scalar>(
    x: &WindowView<'_, T>,
    p: &LstmParams<T>,
) -> Result<(Vec<T>, ForwardCache<T>)> {
    check_input(x, p)?;
    let mut cache = ForwardCache::default();
    cache.resize(x.rows(), p.input_dim, p.units, 0);
    cache.input.copy_from_slice(x.as_slice());
    forward_cached(p, &mut cache);
    let h_final = cache.hidden(cache.steps - 1).to_vec();
    Ok((h_final, cache))
}

/// Reusable buffers for the inference-only recurrence.
#[derive(Debug, Clone)]
pub struct LstmScratch<T> {
    pub(crate) z: Vec<T>,
    pub(crate) h: [Vec<T>; 2],
    pub(crate) c: [Vec<T>; 2],
    pub(crate) c_tanh: Vec<T>,
}

impl<T: Scalar> LstmScratch<T> {
    pub fn new(units: usize) -> Self {
        Self {
            z: vec![T::zero(); GATES * units],
            h: [vec![T::zero(); units], vec![T::zero(); units]],
            c: [vec![T::zero(); units], vec![T::zero(); units]],
            c_tanh: vec![T::zero(); units],
        }
    }

    /// Runs the recurrence without recording history; returns the final hidden state.
    pub(crate) fn run<'s>(&'s mut self, p: &LstmParams<T>, x: &WindowView<'_, T>) -> &'s [T] {
        for buf in self.h.iter_mut().chain(self.c.iter_mut()) {
            buf.iter_mut().for_each(|v| *v = T::zero());
        }
        let mut cur = 0;
        for t in 0..x.rows() {
            let next = 1 - cur;
            let [h0, h1] = &mut self.h;
            let [c0, c1] = &mut self.c;
            let (h_prev, h_next) = if cur == 0 { (&*h0, h1) } else { (&*h1, h0) };
            let (c_prev, c_next) = if cur == 0 { (&*c0, c1) } else { (&*c1, c0) };
            cell_step(p, x.row(t), h_prev, c_prev, &mut self.z, c_next, &mut self.c_tanh, h_next);
            cur = next;
        }
        &self.h[cur]
    }
}
