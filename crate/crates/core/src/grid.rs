use crate::error::{invalid, Result};

/// Uniform, strictly increasing sample axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(invalid("len", format!("an axis needs at least 2 points, got {len}")));
        }
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(invalid("step", format!("{step} must be positive and finite")));
        }
        Ok(Self { start, step, len })
    }

    /// `len` points spanning [−half_width, half_width]; odd `len` puts a
    /// node at zero.
    pub fn symmetric(half_width: f64, len: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(invalid("half_width", format!("{half_width} must be positive")));
        }
        if len < 2 {
            return Err(invalid("len", format!("an axis needs at least 2 points, got {len}")));
        }
        Self::new(-half_width, 2.0 * half_width / (len - 1) as f64, len)
    }

    pub fn from_range(min: f64, max: f64, len: usize) -> Result<Self> {
        if !(max > min) {
            return Err(invalid("range", format!("[{min}, {max}] is empty")));
        }
        if len < 2 {
            return Err(invalid("len", format!("an axis needs at least 2 points, got {len}")));
        }
        Self::new(min, (max - min) / (len - 1) as f64, len)
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.step; self.len];
        w[0] *= 0.5;
        w[self.len - 1] *= 0.5;
        w
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len);
        self.weights().iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Largest |x| on the axis.
    pub fn max_abs(&self) -> f64 {
        self.start.abs().max(self.end().abs())
    }
}

/// Mean and standard deviation of a sampled non-negative density.
pub fn moments(axis: &Axis, density: &[f64]) -> (f64, f64) {
    let norm = axis.integrate(density);
    let xs = axis.points();
    let first: Vec<f64> = xs.iter().zip(density).map(|(x, d)| x * d).collect();
    let mean = axis.integrate(&first) / norm;
    let second: Vec<f64> = xs
        .iter()
        .zip(density)
        .map(|(x, d)| (x - mean).powi(2) * d)
        .collect();
    (mean, (axis.integrate(&second) / norm).sqrt())
}

/// Full width at half maximum of a sampled single-peaked curve, with linear
/// interpolation at both crossings.
pub fn fwhm(axis: &Axis, values: &[f64]) -> Option<f64> {
    let (peak_idx, peak) = values
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    let half = 0.5 * peak;
    let crossing = |i: usize, j: usize| {
        let (vi, vj) = (values[i], values[j]);
        axis.at(i) + (half - vi) / (vj - vi) * (axis.at(j) - axis.at(i))
    };
    let left = (1..=peak_idx).rev().find(|&i| values[i - 1] < half)?;
    let right = (peak_idx..values.len() - 1).find(|&i| values[i + 1] < half)?;
    Some(crossing(right, right + 1) - crossing(left - 1, left))
}
