use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::TimeGrid;
use crate::error::{invalid, Error, Result};
use crate::CVector;

type Evaluator = Arc<dyn Fn(f64) -> CVector + Send + Sync>;

#[derive(Clone)]
enum Backing {
    Analytic { eval: Evaluator, domain: (f64, f64) },
    Sampled { grid: TimeGrid, columns: Vec<Vec<Complex64>> },
}

/// A `d`-dimensional complex-valued function of time.
///
/// Analytic paths evaluate anywhere in their domain; sampled paths only at
/// the nodes of their grid. Sampled data is stored per component.
#[derive(Clone)]
pub struct Path {
    dim: usize,
    label: String,
    holder_exponent: Option<f64>,
    backing: Backing,
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Path");
        s.field("dim", &self.dim).field("label", &self.label);
        match &self.backing {
            Backing::Analytic { domain, .. } => s.field("domain", domain),
            Backing::Sampled { grid, .. } => s.field("grid", grid),
        };
        s.finish()
    }
}

impl Path {
    /// Analytic path over the whole real line.
    pub fn analytic<F>(dim: usize, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> CVector + Send + Sync + 'static,
    {
        assert!(dim > 0, "path dimension must be positive");
        Self {
            dim,
            label: label.into(),
            holder_exponent: None,
            backing: Backing::Analytic { eval: Arc::new(eval), domain: (f64::NEG_INFINITY, f64::INFINITY) },
        }
    }

    /// One-dimensional real analytic path.
    pub fn real<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::analytic(1, label, move |t| vec![Complex64::new(f(t), 0.0)])
    }

    /// One-dimensional complex analytic path.
    pub fn complex<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::analytic(1, label, move |t| vec![f(t)])
    }

    /// Sampled path from per-node rows.
    pub fn sampled(grid: TimeGrid, label: impl Into<String>, rows: Vec<CVector>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(invalid("rows", "sampled path needs at least one component"));
        }
        if rows.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: rows.len() });
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); dim];
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            for (col, z) in columns.iter_mut().zip(row) {
                if !is_finite(z) {
                    return Err(Error::NonFinite { t: grid.node(k) });
                }
                col.push(z);
            }
        }
        Ok(Self::from_columns_unchecked(grid, label.into(), columns))
    }

    /// Sampled path from per-component columns.
    pub fn from_columns(grid: TimeGrid, label: impl Into<String>, columns: Vec<Vec<Complex64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(invalid("columns", "sampled path needs at least one component"));
        }
        for col in &columns {
            if col.len() != grid.len() {
                return Err(Error::DimensionMismatch { expected: grid.len(), got: col.len() });
            }
            if let Some(k) = col.iter().position(|z| !is_finite(*z)) {
                return Err(Error::NonFinite { t: grid.node(k) });
            }
        }
        Ok(Self::from_columns_unchecked(grid, label.into(), columns))
    }

    pub(crate) fn from_columns_unchecked(grid: TimeGrid, label: String, columns: Vec<Vec<Complex64>>) -> Self {
        Self { dim: columns.len(), label, holder_exponent: None, backing: Backing::Sampled { grid, columns } }
    }

    /// Restricts the evaluation domain of an analytic path to `[lo, hi]`.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid("domain", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        match &mut self.backing {
            Backing::Analytic { domain, .. } => *domain = (lo, hi),
            Backing::Sampled { .. } => return Err(Error::NotAnalytic),
        }
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_holder_exponent(mut self, alpha: f64) -> Self {
        self.holder_exponent = Some(alpha);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Theoretical Hölder exponent, when the generator knows it.
    pub fn holder_exponent(&self) -> Option<f64> {
        self.holder_exponent
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.backing, Backing::Sampled { .. })
    }

    pub fn grid(&self) -> Option<&TimeGrid> {
        match &self.backing {
            Backing::Sampled { grid, .. } => Some(grid),
            Backing::Analytic { .. } => None,
        }
    }

    /// Closed evaluation domain.
    pub fn domain(&self) -> (f64, f64) {
        match &self.backing {
            Backing::Analytic { domain, .. } => *domain,
            Backing::Sampled { grid, .. } => grid.domain(),
        }
    }

    /// Samples of component `k` (sampled paths only).
    pub fn column(&self, k: usize) -> Option<&[Complex64]> {
        match &self.backing {
            Backing::Sampled { columns, .. } => columns.get(k).map(Vec::as_slice),
            Backing::Analytic { .. } => None,
        }
    }

    pub(crate) fn columns(&self) -> Option<&[Vec<Complex64>]> {
        match &self.backing {
            Backing::Sampled { columns, .. } => Some(columns),
            Backing::Analytic { .. } => None,
        }
    }

    /// Value at node `k` of a sampled path.
    pub fn at_node(&self, k: usize) -> Option<CVector> {
        self.columns().and_then(|cols| cols.iter().map(|c| c.get(k).copied()).collect())
    }

    /// Evaluates the path at `t`.
    ///
    /// Sampled paths accept node times only; there is no interpolation.
    pub fn eval(&self, t: f64) -> Result<CVector> {
        match &self.backing {
            Backing::Analytic { eval, domain } => {
                if !(t >= domain.0 && t <= domain.1) {
                    return Err(Error::OutOfDomain { t, lo: domain.0, hi: domain.1 });
                }
                let v = eval(t);
                if v.len() != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
                }
                if !v.iter().all(|z| is_finite(*z)) {
                    return Err(Error::NonFinite { t });
                }
                Ok(v)
            }
            Backing::Sampled { grid, columns } => {
                let k = grid.index_of(t)?;
                Ok(columns.iter().map(|c| c[k]).collect())
            }
        }
    }

    /// Samples the path at every node of `grid`.
    ///
    /// A sampled path can only be re-sampled onto its own grid.
    pub fn sample(&self, grid: &TimeGrid) -> Result<Path> {
        match &self.backing {
            Backing::Sampled { grid: own, .. } => {
                if own != grid {
                    return Err(Error::GridMismatch);
                }
                Ok(self.clone())
            }
            Backing::Analytic { .. } => {
                let rows =
                    (0..grid.len()).into_par_iter().map(|k| self.eval(grid.node(k))).collect::<Result<Vec<_>>>()?;
                let mut columns = vec![Vec::with_capacity(rows.len()); self.dim];
                for row in rows {
                    for (col, z) in columns.iter_mut().zip(row) {
                        col.push(z);
                    }
                }
                let mut out = Self::from_columns_unchecked(*grid, self.label.clone(), columns);
                out.holder_exponent = self.holder_exponent;
                Ok(out)
            }
        }
    }

    /// Drops padding from a sampled path, keeping `pad_steps` nodes on each
    /// side of `[a, b]`.
    pub fn trim_pad(&self, pad_steps: usize) -> Result<Path> {
        let (grid, columns) = match &self.backing {
            Backing::Sampled { grid, columns } => (grid, columns),
            Backing::Analytic { .. } => return Err(Error::NotSampled),
        };
        let drop = grid
            .pad_steps()
            .checked_sub(pad_steps)
            .ok_or(Error::PadDeficit { pad: grid.pad(), needed: pad_steps as f64 * grid.step() })?;
        let new_grid = grid.shrink(drop)?;
        let columns = columns.iter().map(|c| c[drop..c.len() - drop].to_vec()).collect();
        let mut out = Self::from_columns_unchecked(new_grid, self.label.clone(), columns);
        out.holder_exponent = self.holder_exponent;
        Ok(out)
    }

    /// Per-node rows of a sampled path.
    pub fn rows(&self) -> Option<Vec<CVector>> {
        let grid = self.grid()?;
        (0..grid.len()).map(|k| self.at_node(k)).collect()
    }
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
