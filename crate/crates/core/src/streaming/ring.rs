use crate::data::KinematicSample;
use crate::error::{Error, Result};
use crate::nn::{StanceModel, WindowView, Workspace};
use crate::Scalar;

/// Fixed-capacity window of standardized samples.
///
/// Every row is written twice, at `cursor` and `cursor + capacity`, so the most
/// recent `capacity` rows are always one contiguous, oldest-first slice and no
/// copying is needed to hand the window to the model.
#[derive(Debug, Clone)]
pub struct RingWindow<T> {
    buf: Vec<T>,
    capacity: usize,
    cols: usize,
    cursor: usize,
    filled: usize,
}

impl<T: Scalar> RingWindow<T> {
    pub fn new(capacity: usize, cols: usize) -> Self {
        assert!(capacity > 0 && cols > 0, "ring window needs a non-zero shape");
        Self {
            buf: vec![T::zero(); 2 * capacity * cols],
            capacity,
            cols,
            cursor: 0,
            filled: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of rows pushed so far, saturating at capacity.
    pub fn len(&self) -> usize {
        self.filled
    }

    pub fn is_empty(&self) -> bool {
        self.filled == 0
    }

    pub fn is_full(&self) -> bool {
        self.filled == self.capacity
    }

    pub fn clear(&mut self) {
        self.cursor = 0;
        self.filled = 0;
    }

    /// Appends one row, evicting the oldest once full.
    pub fn push_row(&mut self, row: &[T]) {
        debug_assert_eq!(row.len(), self.cols);
        let c = self.cols;
        let lo = self.cursor * c;
        let hi = (self.cursor + self.capacity) * c;
        self.buf[lo..lo + c].copy_from_slice(row);
        self.buf[hi..hi + c].copy_from_slice(row);
        self.cursor = (self.cursor + 1) % self.capacity;
        self.filled = (self.filled + 1).min(self.capacity);
    }

    /// Standardizes a raw sample with the model statistics and appends it.
    fn push_standardized(&mut self, theta: &[f64], model: &StanceModel<T>) {
        let c = self.cols;
        let lo = self.cursor * c;
        let hi = (self.cursor + self.capacity) * c;
        model.standardize_into(theta, &mut self.buf[lo..lo + c]);
        self.buf.copy_within(lo..lo + c, hi);
        self.cursor = (self.cursor + 1) % self.capacity;
        self.filled = (self.filled + 1).min(self.capacity);
    }

    /// The last `capacity` rows, oldest first; `None` until full.
    pub fn view(&self) -> Option<WindowView<'_, T>> {
        if !self.is_full() {
            return None;
        }
        let start = self.cursor * self.cols;
        let data = &self.buf[start..start + self.capacity * self.cols];
        Some(WindowView::new(data, self.capacity, self.cols).expect("ring shape is consistent"))
    }
}

/// Buffers one sample and, once the window is full, returns the inference-mode
/// prediction for the current window. Non-finite samples are rejected and
/// leave the buffer untouched.
pub fn push_sample<T: Scalar>(
    rw: &mut RingWindow<T>,
    sample: &KinematicSample,
    model: &StanceModel<T>,
    ws: &mut Workspace<T>,
) -> Result<Option<T>> {
    if rw.capacity != model.window_len() || rw.cols != model.config.input_dim {
        return Err(Error::Config("ring window shape does not match the model".into()));
    }
    if !sample.theta.iter().all(|v| v.is_finite()) {
        return Err(Error::DataIntegrity(format!("non-finite kinematic sample at t={}", sample.t)));
    }
    rw.push_standardized(&sample.theta, model);
    Ok(rw.view().map(|view| model.predict_with(&view, ws)))
}

/// Owns the window and workspace for one model; one producer pushes samples.
#[derive(Debug, Clone)]
pub struct StreamingEstimator<'m, T> {
    model: &'m StanceModel<T>,
    ring: RingWindow<T>,
    ws: Workspace<T>,
}

impl<'m, T: Scalar> StreamingEstimator<'m, T> {
    pub fn new(model: &'m StanceModel<T>) -> Self {
        Self {
            model,
            ring: RingWindow::new(model.window_len(), model.config.input_dim),
            ws: Workspace::new(model),
        }
    }

    pub fn push(&mut self, sample: &KinematicSample) -> Result<Option<T>> {
        push_sample(&mut self.ring, sample, self.model, &mut self.ws)
    }

    pub fn ring(&self) -> &RingWindow<T> {
        &self.ring
    }

    pub fn reset(&mut self) {
        self.ring.clear();
    }
}
