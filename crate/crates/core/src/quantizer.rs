//! Scalar quantizers applied elementwise to pre-quantization values.
//!
//! All quantizers share one cell structure: cells are indexed by integers,
//! cell `c` maps to the level value `q_c`, and the boundary between cells
//! `c - 1` and `c` is the threshold `b_c`. A value sitting exactly on a
//! threshold belongs to the upper cell, so `sign(0) = +1`.

use crate::error::{QcsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerKind {
    Sign,
    Uniform,
    SaturatedUniform,
    GeneralLevels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerSpec {
    kind: QuantizerKind,
    resolution: f64,
    delta: f64,
    thresholds: Vec<f64>,
    level_values: Vec<f64>,
}

impl QuantizerSpec {
    /// The 1-bit quantizer with levels {-1, +1}.
    pub fn sign() -> Self {
        Self {
            kind: QuantizerKind::Sign,
            resolution: 2.0,
            delta: 2.0,
            thresholds: vec![0.0],
            level_values: vec![-1.0, 1.0],
        }
    }

    /// `Q(a) = delta * (floor(a / delta) + 1/2)`, unbounded range.
    pub fn uniform(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self {
            kind: QuantizerKind::Uniform,
            resolution: delta,
            delta,
            thresholds: Vec::new(),
            level_values: Vec::new(),
        })
    }

    /// Uniform quantizer clamped to `L` levels `±(L-1)delta/2`. Thresholds
    /// sit at `j * delta` for `|j| <= L/2 - 1`, so `L` must be even.
    pub fn saturated(delta: f64, levels: usize) -> Result<Self> {
        check_delta(delta)?;
        if levels < 2 || !levels.is_multiple_of(2) {
            return Err(QcsError::InvalidParameter(format!(
                "saturated quantizer needs an even level count >= 2, got {levels}"
            )));
        }
        let half = (levels / 2) as i64;
        let thresholds = (1 - half..half).map(|j| j as f64 * delta).collect();
        let level_values = (0..levels as i64).map(|i| delta * ((i - half) as f64 + 0.5)).collect();
        Ok(Self { kind: QuantizerKind::SaturatedUniform, resolution: delta, delta, thresholds, level_values })
    }

    /// Arbitrary thresholds `b_1 < ... < b_{L-1}` with levels
    /// `first_level + i * resolution`.
    pub fn general(thresholds: Vec<f64>, first_level: f64, resolution: f64) -> Result<Self> {
        check_delta(resolution)?;
        if thresholds.is_empty() {
            return Err(QcsError::InvalidParameter("at least one threshold is required".into()));
        }
        if !first_level.is_finite() || thresholds.iter().any(|b| !b.is_finite()) {
            return Err(QcsError::NonFinite);
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QcsError::InvalidParameter("thresholds must be strictly increasing".into()));
        }
        let level_values = (0..=thresholds.len()).map(|i| first_level + i as f64 * resolution).collect();
        Ok(Self { kind: QuantizerKind::GeneralLevels, resolution, delta: resolution, thresholds, level_values })
    }

    pub fn kind(&self) -> QuantizerKind {
        self.kind
    }

    /// Gap `Δ` between consecutive level values.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Bin width `δ`. Equals the resolution for every kind.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of levels, `None` for the unbounded uniform quantizer.
    pub fn levels(&self) -> Option<usize> {
        match self.kind {
            QuantizerKind::Uniform => None,
            _ => Some(self.level_values.len()),
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn level_values(&self) -> &[f64] {
        &self.level_values
    }

    /// Inclusive range of valid cell indices, `None` when unbounded.
    pub fn cell_range(&self) -> Option<(i64, i64)> {
        self.levels().map(|l| (0, l as i64 - 1))
    }

    /// Index of the cell containing `t`.
    #[inline]
    pub fn cell_index(&self, t: f64) -> i64 {
        match self.kind {
            QuantizerKind::Sign => i64::from(t >= 0.0),
            QuantizerKind::Uniform => (t / self.delta).floor() as i64,
            QuantizerKind::SaturatedUniform => {
                let l = self.level_values.len() as i64;
                ((t / self.delta).floor() as i64 + l / 2).clamp(0, l - 1)
            }
            QuantizerKind::GeneralLevels => self.thresholds.partition_point(|&b| b <= t) as i64,
        }
    }

    /// Level value of cell `c`. `c` must be inside [`Self::cell_range`].
    #[inline]
    pub fn cell_value(&self, c: i64) -> f64 {
        match self.kind {
            QuantizerKind::Uniform => self.delta * (c as f64 + 0.5),
            _ => self.level_values[c as usize],
        }
    }

    /// Threshold separating cell `c - 1` from cell `c`.
    pub fn boundary(&self, c: i64) -> f64 {
        match self.kind {
            QuantizerKind::Uniform => c as f64 * self.delta,
            _ => self.thresholds[(c - 1) as usize],
        }
    }

    /// Recovers the cell index of a level value, rejecting anything that is
    /// not a level of this quantizer.
    pub fn level_index(&self, y: f64) -> Result<i64> {
        if !y.is_finite() {
            return Err(QcsError::NonFinite);
        }
        let c = match self.kind {
            QuantizerKind::Uniform => (y / self.delta - 0.5).round() as i64,
            _ => ((y - self.level_values[0]) / self.resolution).round() as i64,
        };
        if let Some((lo, hi)) = self.cell_range() {
            if c < lo || c > hi {
                return Err(QcsError::InvalidLevel(y));
            }
        }
        let tol = 1e-9 * self.resolution.max(y.abs());
        if (self.cell_value(c) - y).abs() > tol {
            return Err(QcsError::InvalidLevel(y));
        }
        Ok(c)
    }

    pub fn quantize(&self, value: f64) -> Result<f64> {
        if !value.is_finite() {
            return Err(QcsError::NonFinite);
        }
        Ok(self.cell_value(self.cell_index(value)))
    }

    pub fn quantize_vec(&self, values: &[f64]) -> Result<Vec<f64>> {
        values.iter().map(|&v| self.quantize(v)).collect()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(QcsError::InvalidParameter(format!("resolution must be positive, got {delta}")))
    }
}
