//! Sensing ensembles `(A, τ)`, quantized measurements and corruption.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, QcsError, Result};
use crate::quantizer::QuantizerSpec;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Gaussian,
    Rademacher,
    /// Supplied by the caller rather than sampled.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DitherKind {
    Zero,
    /// i.i.d. uniform on `[-level, level]`.
    UniformSymmetric(f64),
    Explicit,
}

impl DitherKind {
    fn validate(&self) -> Result<()> {
        match *self {
            DitherKind::UniformSymmetric(l) if !(l.is_finite() && l >= 0.0) => {
                Err(QcsError::InvalidParameter(format!("dither level must be >= 0, got {l}")))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            DitherKind::UniformSymmetric(l) if l > 0.0 => rng.gen_range(-l..=l),
            _ => 0.0,
        }
    }
}

impl MatrixKind {
    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            MatrixKind::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => rng.sample(StandardNormal),
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_len(cols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`, switching to a support-only loop when `x` is sparse.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] != 0.0).collect();
        if support.len() * 4 < self.cols {
            (0..self.rows)
                .map(|i| {
                    let row = self.row(i);
                    support.iter().map(|&j| row[j] * x[j]).sum()
                })
                .collect()
        } else {
            (0..self.rows).map(|i| dot(self.row(i), x)).collect()
        }
    }

    /// `Aᵀ w`, skipping zero weights.
    pub fn mul_transpose(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &wi) in w.iter().enumerate() {
            if wi != 0.0 {
                axpy(wi, self.row(i), &mut out);
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorizes
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingInstance {
    matrix: DenseMatrix,
    dither: Vec<f64>,
    matrix_kind: MatrixKind,
    dither_kind: DitherKind,
    seed: u64,
}

impl SensingInstance {
    /// Draws `A` and `τ` from independent streams keyed by `seed`.
    pub fn sample(matrix_kind: MatrixKind, dither_kind: DitherKind, m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(QcsError::InvalidParameter(format!("m and n must be >= 1, got m={m} n={n}")));
        }
        if matrix_kind == MatrixKind::Explicit || dither_kind == DitherKind::Explicit {
            return Err(QcsError::InvalidParameter("explicit ensembles cannot be sampled".into()));
        }
        dither_kind.validate()?;
        let mut mrng = stream_rng(seed, Stream::Matrix);
        let data = (0..m * n).map(|_| matrix_kind.sample(&mut mrng)).collect();
        let mut drng = stream_rng(seed, Stream::Dither);
        let dither = (0..m).map(|_| dither_kind.sample(&mut drng)).collect();
        Ok(Self { matrix: DenseMatrix { rows: m, cols: n, data }, dither, matrix_kind, dither_kind, seed })
    }

    pub fn from_parts(matrix: DenseMatrix, dither: Vec<f64>) -> Result<Self> {
        check_len(matrix.rows(), dither.len())?;
        if matrix.as_slice().iter().chain(&dither).any(|v| !v.is_finite()) {
            return Err(QcsError::NonFinite);
        }
        Ok(Self { matrix, dither, matrix_kind: MatrixKind::Explicit, dither_kind: DitherKind::Explicit, seed: 0 })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn dither(&self) -> &[f64] {
        &self.dither
    }

    pub fn matrix_kind(&self) -> MatrixKind {
        self.matrix_kind
    }

    pub fn dither_kind(&self) -> DitherKind {
        self.dither_kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn m(&self) -> usize {
        self.matrix.rows
    }

    pub fn n(&self) -> usize {
        self.matrix.cols
    }

    /// `A x - τ`.
    pub fn pre_quantization(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        let mut t = self.matrix.mul_vec(x);
        for (ti, tau) in t.iter_mut().zip(&self.dither) {
            *ti -= tau;
        }
        Ok(t)
    }

    /// `y = Q(A x - τ)`.
    pub fn measure(&self, spec: &QuantizerSpec, x: &[f64]) -> Result<Vec<f64>> {
        spec.quantize_vec(&self.pre_quantization(x)?)
    }
}

/// Alters exactly `floor(zeta * m)` randomly chosen entries of `y` by one
/// level step in a random direction, reversing the direction when the step
/// would leave the level range. Sign measurements are therefore negated.
pub fn corrupt(y: &[f64], spec: &QuantizerSpec, zeta: f64, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(QcsError::InvalidParameter(format!("zeta must lie in [0, 1], got {zeta}")));
    }
    let cells = y.iter().map(|&v| spec.level_index(v)).collect::<Result<Vec<_>>>()?;
    let count = (zeta * y.len() as f64).floor() as usize;
    let mut out = y.to_vec();
    if count == 0 {
        return Ok(out);
    }
    let mut rng = stream_rng(seed, Stream::Corruption);
    for i in index::sample(&mut rng, y.len(), count) {
        let step: i64 = if rng.gen::<bool>() { 1 } else { -1 };
        let mut c = cells[i] + step;
        if let Some((lo, hi)) = spec.cell_range() {
            if c < lo || c > hi {
                c = cells[i] - step;
            }
        }
        out[i] = spec.cell_value(c);
    }
    Ok(out)
}

/// Number of coordinates where `u` and `v` differ.
pub fn hamming(u: &[f64], v: &[f64]) -> Result<usize> {
    check_len(u.len(), v.len())?;
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}
