//! Projected gradient descent on the one-sided ℓ1 loss.
//!
//! Each iteration takes a step along `h(x, x*) = (1/m) Aᵀ (Q(Ax - τ) - y)`,
//! which only needs the observed `y`, then projects onto the structure set
//! and the norm annulus in turn. With a sparse structure, the unit sphere and
//! sign measurements this is normalized binary iterative hard thresholding.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, QcsError, Result};
use crate::quantizer::QuantizerSpec;
use crate::rng::{stream_rng, Stream};
use crate::sensing::SensingInstance;
use crate::signal::SignalModel;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Zero,
    Given(Vec<f64>),
    /// A draw from the model's signal generator.
    RandomInModel(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgdConfig {
    pub eta: f64,
    pub iterations: usize,
    pub init: Init,
    pub record_trajectory: bool,
}

impl PgdConfig {
    pub const DEFAULT_ITERATIONS: usize = 100;

    pub fn new(eta: f64) -> Self {
        Self { eta, iterations: Self::DEFAULT_ITERATIONS, init: Init::Zero, record_trajectory: false }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_trajectory(mut self, record: bool) -> Self {
        self.record_trajectory = record;
        self
    }

    fn validate(&self, model: &SignalModel) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(QcsError::InvalidParameter(format!("step size must be positive, got {}", self.eta)));
        }
        if self.iterations == 0 {
            return Err(QcsError::InvalidParameter("iterations must be >= 1".into()));
        }
        if let Init::Given(x0) = &self.init {
            check_len(model.dim(), x0.len())?;
            if !model.contains(x0, 1e-9) {
                return Err(QcsError::InvalidParameter("initial point lies outside the signal set".into()));
            }
        }
        Ok(())
    }
}

/// Constants of the restricted approximate invertibility condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaicParams {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub phi: f64,
}

impl RaicParams {
    /// Right-hand side `mu1 d + sqrt(mu2 d) + mu3` at distance `d`.
    pub fn bound(&self, distance: f64) -> f64 {
        self.mu1 * distance + (self.mu2 * distance).sqrt() + self.mu3
    }

    pub fn applies(&self, distance: f64) -> bool {
        self.mu4 > 0.0 && distance <= self.mu4
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub estimate: Vec<f64>,
    /// Iterates `x^(1) ..= x^(T)` when requested.
    pub trajectory: Option<Vec<Vec<f64>>>,
    /// `‖x^(t) - x‖₂` for `t = 1..=T` when the truth was supplied.
    pub errors: Option<Vec<f64>>,
}

fn level_indices(spec: &QuantizerSpec, y: &[f64]) -> Result<Vec<i64>> {
    y.iter().map(|&v| spec.level_index(v)).collect()
}

fn check_dims(instance: &SensingInstance, y: &[f64], u: &[f64]) -> Result<()> {
    check_len(instance.m(), y.len())?;
    check_len(instance.n(), u.len())
}

/// `(Δ/m) Σ_i Σ_j max{-y_ij (<a_i,u> - τ_i - b_j), 0}`.
///
/// Only thresholds lying between the cell of `<a_i,u> - τ_i` and the cell
/// of `y_i` contribute, so the sum is finite for the unbounded quantizer too.
pub fn one_sided_l1_loss(spec: &QuantizerSpec, instance: &SensingInstance, y: &[f64], u: &[f64]) -> Result<f64> {
    check_dims(instance, y, u)?;
    let cells = level_indices(spec, y)?;
    let t = instance.pre_quantization(u)?;
    let mut total = 0.0;
    for (&ti, &cy) in t.iter().zip(&cells) {
        let ct = spec.cell_index(ti);
        // boundaries c in (ct, cy] sit above t but below y's cell
        for c in ct + 1..=cy {
            total += (spec.boundary(c) - ti).max(0.0);
        }
        for c in cy + 1..=ct {
            total += (ti - spec.boundary(c)).max(0.0);
        }
    }
    Ok(spec.resolution() * total / instance.m() as f64)
}

/// `(1/m) Aᵀ (Q(Au - τ) - y)`.
pub fn gradient(spec: &QuantizerSpec, instance: &SensingInstance, y: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    check_dims(instance, y, u)?;
    let cells = level_indices(spec, y)?;
    let t = instance.pre_quantization(u)?;
    Ok(residual_gradient(spec, instance, &t, &cells))
}

fn residual_gradient(spec: &QuantizerSpec, instance: &SensingInstance, t: &[f64], y_cells: &[i64]) -> Vec<f64> {
    let inv_m = 1.0 / instance.m() as f64;
    let delta = spec.resolution();
    let weights: Vec<f64> =
        t.iter().zip(y_cells).map(|(&ti, &cy)| (spec.cell_index(ti) - cy) as f64 * delta * inv_m).collect();
    instance.matrix().mul_transpose(&weights)
}

/// Subgradient written over the binary decomposition,
/// `(Δ/2m) Σ_i Σ_j (sign(<a_i,u> - τ_i - b_j) - y_ij) a_i`.
///
/// Independent of [`gradient`]: it compares against every threshold
/// explicitly instead of working with level differences.
pub fn threshold_subgradient(
    spec: &QuantizerSpec,
    instance: &SensingInstance,
    y: &[f64],
    u: &[f64],
) -> Result<Vec<f64>> {
    check_dims(instance, y, u)?;
    let cells = level_indices(spec, y)?;
    let t = instance.pre_quantization(u)?;
    let sgn = |v: f64| if v >= 0.0 { 1.0 } else { -1.0 };
    let weights: Vec<f64> = t
        .iter()
        .zip(&cells)
        .map(|(&ti, &cy)| {
            let (lo, hi) = match spec.cell_range() {
                Some((lo, hi)) => (lo + 1, hi),
                // the unbounded grid only differs near t and y
                None => {
                    let ct = spec.cell_index(ti);
                    (ct.min(cy) - 1, ct.max(cy) + 1)
                }
            };
            let mut s = 0.0;
            for c in lo..=hi {
                let y_bit = if c <= cy { 1.0 } else { -1.0 };
                s += sgn(ti - spec.boundary(c)) - y_bit;
            }
            s * spec.resolution() / (2.0 * instance.m() as f64)
        })
        .collect();
    Ok(instance.matrix().mul_transpose(&weights))
}

/// `h(u, v) = (1/m) Aᵀ (Q(Au - τ) - Q(Av - τ))`.
pub fn full_gradient(spec: &QuantizerSpec, instance: &SensingInstance, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len(instance.n(), u.len())?;
    check_len(instance.n(), v.len())?;
    let tv = instance.pre_quantization(v)?;
    let cells: Vec<i64> = tv.iter().map(|&t| spec.cell_index(t)).collect();
    let tu = instance.pre_quantization(u)?;
    Ok(residual_gradient(spec, instance, &tu, &cells))
}

/// `ĥ(u, v) = (Δ/m) Σ_{i ∈ R} sign(<a_i, u - v>) a_i` over rows whose
/// quantized values differ.
pub fn clipped_gradient(spec: &QuantizerSpec, instance: &SensingInstance, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len(instance.n(), u.len())?;
    check_len(instance.n(), v.len())?;
    let tu = instance.pre_quantization(u)?;
    let tv = instance.pre_quantization(v)?;
    let w = spec.resolution() / instance.m() as f64;
    let weights: Vec<f64> = tu
        .iter()
        .zip(&tv)
        .map(|(&a, &b)| match spec.cell_index(a).cmp(&spec.cell_index(b)) {
            std::cmp::Ordering::Equal => 0.0,
            // Q is monotone, so the order of cells is the sign of <a_i, u - v>
            std::cmp::Ordering::Greater => w,
            std::cmp::Ordering::Less => -w,
        })
        .collect();
    Ok(instance.matrix().mul_transpose(&weights))
}

fn initial_point(config: &PgdConfig, model: &SignalModel) -> Vec<f64> {
    match &config.init {
        Init::Zero => vec![0.0; model.dim()],
        Init::Given(x0) => x0.clone(),
        Init::RandomInModel(seed) => model.gen_signal_with(&mut stream_rng(*seed, Stream::Init)),
    }
}

/// Runs `T` iterations of
/// `x^(t) = P_annulus(P_K(x^(t-1) - eta * h(x^(t-1), x)))`.
///
/// `truth` is experiment instrumentation only; it fills `errors` and never
/// enters the update.
pub fn pgd_recover(
    config: &PgdConfig,
    model: &SignalModel,
    spec: &QuantizerSpec,
    instance: &SensingInstance,
    y: &[f64],
    truth: Option<&[f64]>,
) -> Result<Recovery> {
    model.validate()?;
    config.validate(model)?;
    check_len(model.dim(), instance.n())?;
    check_len(instance.m(), y.len())?;
    if let Some(x) = truth {
        check_len(model.dim(), x.len())?;
    }
    let cells = level_indices(spec, y)?;
    let mut x = initial_point(config, model);
    let mut trajectory = config.record_trajectory.then(|| Vec::with_capacity(config.iterations));
    let mut errors = truth.map(|_| Vec::with_capacity(config.iterations));
    for _ in 0..config.iterations {
        let t = instance.pre_quantization(&x)?;
        let grad = residual_gradient(spec, instance, &t, &cells);
        let step: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - config.eta * gi).collect();
        x = model.project(&step)?;
        if let (Some(errs), Some(truth)) = (errors.as_mut(), truth) {
            errs.push(distance(&x, truth));
        }
        if let Some(traj) = trajectory.as_mut() {
            traj.push(x.clone());
        }
    }
    Ok(Recovery { estimate: x, trajectory, errors })
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// Sign measurements, Gaussian matrix, no dither.
    OneBitGaussian,
    /// Sign measurements with uniform dither on `[-Λ, Λ]`.
    DitheredOneBit(f64),
    /// Saturated uniform quantizer with dither on `[-δ/2, δ/2]`.
    DitheredMultiBit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitPolicy {
    /// Any point of `K ∩ 𝔸`.
    AnyInModel,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDefaults {
    pub eta: f64,
    pub init: InitPolicy,
}

pub fn default_step_size(family: ModelFamily) -> Result<StepDefaults> {
    Ok(match family {
        ModelFamily::OneBitGaussian => {
            StepDefaults { eta: (std::f64::consts::PI / 2.0).sqrt(), init: InitPolicy::AnyInModel }
        }
        ModelFamily::DitheredOneBit(lambda) => {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(QcsError::InvalidParameter(format!("dither level must be positive, got {lambda}")));
            }
            StepDefaults { eta: lambda, init: InitPolicy::Zero }
        }
        ModelFamily::DitheredMultiBit => StepDefaults { eta: 1.0, init: InitPolicy::Zero },
    })
}

/// `‖u - v - eta h(u, v)‖` in the dual norm of `(K - K) ∩ phi B₂`.
pub fn raic_residual(
    model: &SignalModel,
    spec: &QuantizerSpec,
    instance: &SensingInstance,
    eta: f64,
    phi: f64,
    u: &[f64],
    v: &[f64],
) -> Result<f64> {
    let h = full_gradient(spec, instance, u, v)?;
    let z: Vec<f64> = u.iter().zip(v).zip(&h).map(|((a, b), g)| a - b - eta * g).collect();
    model.restricted_dual_norm(&z, phi)
}

/// Smallest `C >= 0` such that `residual/phi <= slope d + coeff sqrt(r d) + C r`
/// holds for every `(distance, residual/phi)` pair.
pub fn fit_raic_offset(samples: &[(f64, f64)], slope: f64, coeff: f64, r: f64) -> f64 {
    samples.iter().map(|&(d, res)| (res - slope * d - coeff * (r * d).sqrt()) / r).fold(0.0, f64::max)
}
