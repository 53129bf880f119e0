//! Thin wrappers around a thread-local `rustfft` planner.
//!
//! Forward transforms use the kernel `e^{-2πi jn/L}`; inverse transforms use
//! `e^{+2πi jn/L}`. Neither direction is normalized.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn forward(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

pub fn inverse(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

/// Signed frequency index of DFT bin `j` for a transform of length `n`
/// (the `fftfreq` convention: the Nyquist bin maps to `-n/2`).
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n.div_ceil(2) {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Two-dimensional transform of a row-major `rows × cols` array.
pub fn forward_2d(data: &mut [Complex64], rows: usize, cols: usize) {
    transform_2d(data, rows, cols, forward);
}

pub fn inverse_2d(data: &mut [Complex64], rows: usize, cols: usize) {
    transform_2d(data, rows, cols, inverse);
}

fn transform_2d(data: &mut [Complex64], rows: usize, cols: usize, op: fn(&mut [Complex64])) {
    assert_eq!(data.len(), rows * cols);
    for r in 0..rows {
        op(&mut data[r * cols..(r + 1) * cols]);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        op(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}
