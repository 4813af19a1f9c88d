use crate::error::{Error, Result};
use crate::Scalar;

/// Number of kinematic channels: left hip, right hip, left knee, right knee, backpack pitch.
pub const CHANNELS: usize = 5;

/// Window length for the 300 ms history at 333 Hz.
pub const WINDOW_LEN: usize = 99;

/// Borrowed, row-major `(rows x cols)` window, oldest row first.
#[derive(Debug, Clone, Copy)]
pub struct WindowView<'a, T> {
    data: &'a [T],
    rows: usize,
    cols: usize,
}

impl<'a, T: Scalar> WindowView<'a, T> {
    pub fn new(data: &'a [T], rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Config(format!(
                "window buffer of length {} does not match shape ({rows}, {cols})",
                data.len()
            )));
        }
        Ok(Self { data, rows, cols })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &'a [T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn as_slice(&self) -> &'a [T] {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Owned window of standardized kinematics; the last row is the current sample.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowMatrix<T> {
    data: Vec<T>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> WindowMatrix<T> {
    pub fn from_vec(data: Vec<T>, rows: usize, cols: usize) -> Result<Self> {
        WindowView::new(&data, rows, cols)?;
        Ok(Self { data, rows, cols })
    }

    pub fn from_rows(rows: &[[T; CHANNELS]]) -> Result<Self> {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(data, rows.len(), CHANNELS)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: vec![T::zero(); rows * cols],
            rows,
            cols,
        }
    }

    #[inline]
    pub fn view(&self) -> WindowView<'_, T> {
        WindowView {
            data: &self.data,
            rows: self.rows,
            cols: self.cols,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }
}
