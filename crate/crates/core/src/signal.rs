//! Structure sets `K`, the norm annulus, projections, signal generators and
//! restricted dual norms.
//!
//! Matrices are handled in vectorized column-major form; the shape lives in
//! [`Structure::LowRank`].

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, QcsError, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Structure {
    /// k-sparse vectors in R^n.
    Sparse { k: usize, n: usize },
    /// n1 x n2 matrices of rank at most `rank`.
    LowRank { rank: usize, n1: usize, n2: usize },
    /// The ℓ1 ball of radius `sqrt(k)` in R^n (effectively k-sparse signals).
    L1Ball { k: f64, n: usize },
}

impl Structure {
    pub fn dim(&self) -> usize {
        match *self {
            Structure::Sparse { n, .. } | Structure::L1Ball { n, .. } => n,
            Structure::LowRank { n1, n2, .. } => n1 * n2,
        }
    }

    /// Sparsity or rank parameter.
    pub fn complexity(&self) -> f64 {
        match *self {
            Structure::Sparse { k, .. } => k as f64,
            Structure::LowRank { rank, .. } => rank as f64,
            Structure::L1Ball { k, .. } => k,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Structure::Sparse { k, n } => k >= 1 && k <= n,
            Structure::LowRank { rank, n1, n2 } => rank >= 1 && rank <= n1.min(n2),
            Structure::L1Ball { k, n } => k.is_finite() && k > 0.0 && n >= 1 && k <= n as f64,
        };
        if ok {
            Ok(())
        } else {
            Err(QcsError::InvalidParameter(format!("invalid structure {self:?}")))
        }
    }
}

/// `K ∩ {u : alpha <= ‖u‖₂ <= beta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalModel {
    pub structure: Structure,
    pub alpha: f64,
    pub beta: f64,
}

impl SignalModel {
    pub fn new(structure: Structure, alpha: f64, beta: f64) -> Result<Self> {
        structure.validate()?;
        check_annulus(alpha, beta)?;
        Ok(Self { structure, alpha, beta })
    }

    /// Unit sphere constraint, used without dithering.
    pub fn sphere(structure: Structure) -> Result<Self> {
        Self::new(structure, 1.0, 1.0)
    }

    /// Unit ball constraint, used with dithering.
    pub fn ball(structure: Structure) -> Result<Self> {
        Self::new(structure, 0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.structure.validate()?;
        check_annulus(self.alpha, self.beta)
    }

    /// Euclidean projection onto `K`.
    pub fn project_structure(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), u.len())?;
        Ok(match self.structure {
            Structure::Sparse { k, .. } => hard_threshold(u, k),
            Structure::LowRank { rank, n1, n2 } => truncate_rank(u, n1, n2, rank),
            Structure::L1Ball { k, .. } => project_l1_ball(u, k.sqrt()),
        })
    }

    /// Projection onto `K` followed by projection onto the annulus.
    pub fn project(&self, u: &[f64]) -> Result<Vec<f64>> {
        project_norm(self.alpha, self.beta, &self.project_structure(u)?)
    }

    /// Membership in `K ∩ 𝔸` up to `tol`.
    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        if u.len() != self.dim() {
            return false;
        }
        let norm = l2_norm(u);
        if norm < self.alpha - tol || norm > self.beta + tol {
            return false;
        }
        match self.structure {
            Structure::Sparse { k, .. } => u.iter().filter(|v| v.abs() > tol).count() <= k,
            Structure::LowRank { rank, n1, n2 } => {
                let sv = singular_values(u, n1, n2);
                sv.iter().skip(rank).all(|s| *s <= tol.max(1e-10 * sv[0]))
            }
            Structure::L1Ball { k, .. } => u.iter().map(|v| v.abs()).sum::<f64>() <= k.sqrt() + tol,
        }
    }

    /// Draws a test signal from the stream keyed by `seed`.
    pub fn gen_signal(&self, seed: u64) -> Vec<f64> {
        self.gen_signal_with(&mut stream_rng(seed, Stream::Signal))
    }

    /// Unit-norm structured signal, then scaled to norm `beta` on a sphere
    /// (`alpha == beta`) or to a norm drawn uniformly from `[alpha, beta]`.
    pub fn gen_signal_with<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut x = match self.structure {
            Structure::Sparse { k, n } => {
                let mut x = vec![0.0; n];
                for j in index::sample(rng, n, k) {
                    x[j] = rng.sample(StandardNormal);
                }
                x
            }
            Structure::LowRank { rank, n1, n2 } => {
                let g: Vec<f64> = (0..n1 * n2).map(|_| rng.sample(StandardNormal)).collect();
                truncate_rank(&g, n1, n2, rank)
            }
            Structure::L1Ball { k, n } => effectively_sparse(k, n, rng),
        };
        let norm = l2_norm(&x);
        let target = if self.alpha == self.beta { self.beta } else { rng.gen_range(self.alpha..=self.beta) };
        if norm > 0.0 {
            scale(&mut x, target / norm);
        }
        x
    }

    /// `sup { <w, z> : w ∈ (K - K), ‖w‖₂ <= phi }`.
    pub fn restricted_dual_norm(&self, z: &[f64], phi: f64) -> Result<f64> {
        check_len(self.dim(), z.len())?;
        if !(phi.is_finite() && phi > 0.0) {
            return Err(QcsError::InvalidParameter(format!("phi must be positive, got {phi}")));
        }
        match self.structure {
            Structure::Sparse { k, .. } => {
                let top = hard_threshold(z, (2 * k).min(z.len()));
                Ok(phi * l2_norm(&top))
            }
            Structure::LowRank { rank, n1, n2 } => {
                let sv = singular_values(z, n1, n2);
                Ok(phi * sv.iter().take(2 * rank).map(|s| s * s).sum::<f64>().sqrt())
            }
            Structure::L1Ball { .. } => {
                Err(QcsError::UnsupportedModel("no closed-form restricted dual norm for the l1 ball"))
            }
        }
    }
}

fn check_annulus(alpha: f64, beta: f64) -> Result<()> {
    if alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && alpha <= beta {
        Ok(())
    } else {
        Err(QcsError::InvalidParameter(format!("need 0 <= alpha <= beta, got ({alpha}, {beta})")))
    }
}

/// Euclidean projection onto `{u : alpha <= ‖u‖₂ <= beta}`. The origin maps
/// to `alpha * e_1` when `alpha > 0`.
pub fn project_norm(alpha: f64, beta: f64, u: &[f64]) -> Result<Vec<f64>> {
    check_annulus(alpha, beta)?;
    let norm = l2_norm(u);
    let mut out = u.to_vec();
    if norm > beta {
        scale(&mut out, beta / norm);
    } else if norm < alpha {
        if norm > 0.0 {
            scale(&mut out, alpha / norm);
        } else if let Some(first) = out.first_mut() {
            *first = alpha;
        }
    }
    Ok(out)
}

pub fn l2_norm(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn scale(u: &mut [f64], s: f64) {
    u.iter_mut().for_each(|v| *v *= s);
}

/// Indices of the `k` largest magnitudes; ties go to the lower index.
fn top_k_indices(u: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    let cmp = |a: &usize, b: &usize| u[*b].abs().total_cmp(&u[*a].abs()).then(a.cmp(b));
    if k < idx.len() {
        idx.select_nth_unstable_by(k, cmp);
        idx.truncate(k);
    }
    idx
}

/// Keeps the `k` largest-magnitude entries.
pub fn hard_threshold(u: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    for j in top_k_indices(u, k) {
        out[j] = u[j];
    }
    out
}

/// Sort-based projection onto the ℓ1 ball of the given radius.
pub fn project_l1_ball(u: &[f64], radius: f64) -> Vec<f64> {
    let l1: f64 = u.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return u.to_vec();
    }
    let mut mags: Vec<f64> = u.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &mu) in mags.iter().enumerate() {
        cumsum += mu;
        let t = (cumsum - radius) / (j + 1) as f64;
        if mu - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    u.iter().map(|&v| v.signum() * (v.abs() - theta).max(0.0)).collect()
}

fn to_matrix(u: &[f64], n1: usize, n2: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(n1, n2, u)
}

/// Singular values in descending order.
pub(crate) fn singular_values(u: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    let mut sv: Vec<f64> = to_matrix(u, n1, n2).singular_values().iter().copied().collect();
    sv.sort_unstable_by(|a, b| b.total_cmp(a));
    sv
}

/// Best rank-`rank` approximation of the column-major `n1 x n2` matrix `u`.
pub fn truncate_rank(u: &[f64], n1: usize, n2: usize, rank: usize) -> Vec<f64> {
    // The top right (or left) singular subspace comes from the eigenvectors
    // of the smaller Gram matrix. nalgebra's SVD returns inaccurate singular
    // vectors for rank-deficient inputs, so it is not used here.
    let m = to_matrix(u, n1, n2);
    let tall = n1 >= n2;
    let gram = if tall { m.transpose() * &m } else { &m * m.transpose() };
    let d = gram.nrows();
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut proj = DMatrix::<f64>::zeros(d, d);
    for &i in order.iter().take(rank) {
        let v = eig.eigenvectors.column(i);
        proj += v * v.transpose();
    }
    let out = if tall { &m * proj } else { proj * &m };
    out.as_slice().to_vec()
}

/// `c` entries of magnitude `a` followed by `n - c` entries of magnitude `b`,
/// random signs, with `‖x‖₂ = 1` and `‖x‖₁ = sqrt(k)`.
fn effectively_sparse<R: Rng>(k: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let nf = n as f64;
    let cmax = ((0.6 * k).ceil() as usize).clamp(1, n);
    let mut head = None;
    for _ in 0..64 {
        let c = rng.gen_range(1..=cmax);
        if let Some((a, b)) = effectively_sparse_magnitudes(k, nf, c) {
            head = Some((c, a, b));
            break;
        }
    }
    let flat = 1.0 / nf.sqrt();
    let (c, a, b) = head.unwrap_or((n, flat, flat));
    (0..n)
        .map(|j| {
            let mag = if j < c { a } else { b };
            if rng.gen::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

/// Magnitudes `(a, b)` for a given head length `c`; `None` when the formula
/// would give a negative tail magnitude.
pub(crate) fn effectively_sparse_magnitudes(k: f64, n: f64, c: usize) -> Option<(f64, f64)> {
    let cf = c as f64;
    let disc = k + n * (n - k - cf) / cf;
    if disc < 0.0 {
        return None;
    }
    let a = (k.sqrt() + disc.sqrt()) / n;
    if cf >= n {
        return None;
    }
    let mut b = (k.sqrt() - cf * a) / (n - cf);
    if b < 0.0 && b > -1e-12 {
        b = 0.0;
    }
    (b >= 0.0).then_some((a, b))
}
