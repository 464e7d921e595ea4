use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack (in units of the step) when matching times to nodes.
const NODE_SLACK: f64 = 1e-9;

/// Uniform time grid over `[a, b]` with symmetric padding.
///
/// The padding is stored as a whole number of steps, so the represented
/// domain is `[a - pad_steps*h, b + pad_steps*h]`. Node `k` of the padded
/// grid sits at `a + (k - pad_steps) * h`, computed from the index and never
/// by accumulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    a: f64,
    b: f64,
    n: usize,
    pad_steps: usize,
}

impl TimeGrid {
    /// Builds a grid with `n` steps over `[a, b]`; `pad` is rounded to the
    /// nearest multiple of the step (halves round up).
    pub fn new(a: f64, b: f64, n: usize, pad: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && pad.is_finite()) {
            return Err(Error::InvalidGrid("grid parameters must be finite".into()));
        }
        if a >= b {
            return Err(Error::InvalidGrid(format!("need a < b, got a = {a}, b = {b}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 steps, got {n}")));
        }
        if pad < 0.0 {
            return Err(Error::InvalidGrid(format!("padding must be non-negative, got {pad}")));
        }
        let h = (b - a) / n as f64;
        let pad_steps = (pad / h).round() as usize;
        Ok(Self { a, b, n, pad_steps })
    }

    /// Builds a grid whose padding is given directly as a step count.
    pub fn with_pad_steps(a: f64, b: f64, n: usize, pad_steps: usize) -> Result<Self> {
        let mut grid = Self::new(a, b, n, 0.0)?;
        grid.pad_steps = pad_steps;
        Ok(grid)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of steps across `[a, b]`.
    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn pad_steps(&self) -> usize {
        self.pad_steps
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn pad(&self) -> f64 {
        self.pad_steps as f64 * self.step()
    }

    /// Total number of nodes including padding.
    pub fn len(&self) -> usize {
        self.n + 1 + 2 * self.pad_steps
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        let offset = k as i64 - self.pad_steps as i64;
        self.a + offset as f64 * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }

    /// Indices of the nodes lying in `[a, b]`.
    pub fn core(&self) -> RangeInclusive<usize> {
        self.pad_steps..=self.pad_steps + self.n
    }

    /// Indices of the nodes in `[a + m*h, b - m*h]`.
    pub fn interior(&self, m: usize) -> RangeInclusive<usize> {
        self.pad_steps + m..=self.pad_steps + self.n - m.min(self.n)
    }

    /// The represented closed domain `[a - pad, b + pad]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.node(0), self.node(self.len() - 1))
    }

    /// Index of the node at time `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        let h = self.step();
        if !(t >= lo - NODE_SLACK * h && t <= hi + NODE_SLACK * h) {
            return Err(Error::OutOfDomain { t, lo, hi });
        }
        let k = ((t - lo) / h).round() as usize;
        if (t - self.node(k)).abs() > NODE_SLACK * h {
            return Err(Error::OffNode { t });
        }
        Ok(k)
    }

    /// Number of steps spanned by `epsilon`; it must be a positive integer
    /// multiple of the step.
    pub fn epsilon_steps(&self, epsilon: f64) -> Result<usize> {
        let h = self.step();
        let m = (epsilon / h).round();
        if !(m >= 1.0) || (epsilon - m * h).abs() > NODE_SLACK * h {
            return Err(Error::NonMultipleEpsilon { epsilon, step: h });
        }
        Ok(m as usize)
    }

    /// Fails unless the padding covers a reach of `needed` time units.
    pub fn require_pad(&self, needed: f64) -> Result<()> {
        let pad = self.pad();
        if pad + NODE_SLACK * self.step() < needed {
            return Err(Error::PadDeficit { pad, needed });
        }
        Ok(())
    }

    /// The same grid with `m` fewer padding steps on each side.
    pub fn shrink(&self, m: usize) -> Result<Self> {
        if m > self.pad_steps {
            return Err(Error::PadDeficit { pad: self.pad(), needed: m as f64 * self.step() });
        }
        Ok(Self { pad_steps: self.pad_steps - m, ..*self })
    }

    /// The same grid without padding.
    pub fn unpadded(&self) -> Self {
        Self { pad_steps: 0, ..*self }
    }
}
