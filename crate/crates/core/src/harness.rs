//! Seeded Monte-Carlo sweeps over measurement counts.
//!
//! Every trial regenerates its signal, ensemble and corruption from a seed
//! derived as `hash(master_seed, cell, trial)`, so records are identical for
//! any worker count. Records are assembled in `(cell, trial)` order before
//! aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QcsError, Result};
use crate::pgd::{default_step_size, distance, pgd_recover, Init, InitPolicy, ModelFamily, PgdConfig};
use crate::quantizer::QuantizerSpec;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::sensing::{corrupt, DitherKind, MatrixKind, SensingInstance};
use crate::signal::{SignalModel, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(alias = "1bcs")]
    OneBitGaussian,
    #[serde(alias = "d1bcs")]
    DitheredOneBit,
    #[serde(alias = "dmbcs")]
    DitheredMultiBit,
}

impl Family {
    pub fn short_name(&self) -> &'static str {
        match self {
            Family::OneBitGaussian => "1bcs",
            Family::DitheredOneBit => "d1bcs",
            Family::DitheredMultiBit => "dmbcs",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1bcs" | "one_bit_gaussian" => Ok(Family::OneBitGaussian),
            "d1bcs" | "dithered_one_bit" => Ok(Family::DitheredOneBit),
            "dmbcs" | "dithered_multi_bit" => Ok(Family::DitheredMultiBit),
            other => Err(QcsError::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }

    fn default_annulus(&self) -> (f64, f64) {
        match self {
            Family::OneBitGaussian => (1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRule {
    Fixed(f64),
    /// `δ = 5 / L`, i.e. `Lδ = 5`.
    FiveOverL,
}

impl DeltaRule {
    pub fn resolve(&self, levels: usize) -> f64 {
        match *self {
            DeltaRule::Fixed(d) => d,
            DeltaRule::FiveOverL => 5.0 / levels as f64,
        }
    }
}

fn default_trials() -> usize {
    50
}
fn default_iterations() -> usize {
    PgdConfig::DEFAULT_ITERATIONS
}
fn default_levels() -> usize {
    2
}
fn default_max_work() -> f64 {
    1e11
}

/// One JSON document per plan; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub family: Family,
    /// Structure set; the norm annulus follows the family unless
    /// `alpha`/`beta` are given.
    pub model: Structure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub m_grid: Vec<usize>,
    #[serde(rename = "L", default = "default_levels")]
    pub levels: usize,
    /// Multi-bit only; defaults to [`DeltaRule::FiveOverL`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_rule: Option<DeltaRule>,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub corruption_zeta: f64,
    #[serde(default)]
    pub record_trajectory: bool,
    /// Cap on `Σ m · n · trials` over the grid.
    #[serde(default = "default_max_work")]
    pub max_work: f64,
}

impl ExperimentPlan {
    pub fn new(family: Family, model: Structure, m_grid: Vec<usize>) -> Self {
        Self {
            family,
            model,
            alpha: None,
            beta: None,
            m_grid,
            levels: default_levels(),
            delta_rule: None,
            lambda: 0.0,
            trials: default_trials(),
            iterations: default_iterations(),
            master_seed: 0,
            corruption_zeta: 0.0,
            record_trajectory: false,
            max_work: default_max_work(),
        }
    }

    pub fn from_json(text: &str) -> Result<Vec<Self>> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum OneOrMany {
            One(Box<ExperimentPlan>),
            Many(Vec<ExperimentPlan>),
        }
        let plans = match serde_json::from_str::<OneOrMany>(text) {
            Ok(OneOrMany::One(p)) => vec![*p],
            Ok(OneOrMany::Many(ps)) => ps,
            // untagged errors are uninformative; retry as a single plan
            Err(_) => vec![serde_json::from_str::<ExperimentPlan>(text).map_err(|e| QcsError::Config(e.to_string()))?],
        };
        for p in &plans {
            p.validate()?;
        }
        Ok(plans)
    }

    pub fn signal_model(&self) -> Result<SignalModel> {
        let (a, b) = self.family.default_annulus();
        SignalModel::new(self.model, self.alpha.unwrap_or(a), self.beta.unwrap_or(b))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QcsError::Config(msg));
        self.signal_model()?;
        if self.m_grid.is_empty() || self.m_grid.contains(&0) {
            return bad("m_grid must be nonempty with positive entries".into());
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("m_grid must be strictly ascending".into());
        }
        if self.trials == 0 || self.iterations == 0 {
            return bad("trials and iterations must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.corruption_zeta) {
            return bad(format!("corruption_zeta must lie in [0, 1], got {}", self.corruption_zeta));
        }
        match self.family {
            Family::DitheredMultiBit => {
                QuantizerSpec::saturated(self.delta(), self.levels)?;
            }
            _ => {
                if self.levels != 2 || self.delta_rule.is_some() {
                    return bad("L and delta_rule apply to the dithered multi-bit family only".into());
                }
            }
        }
        if self.family == Family::DitheredOneBit && !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("dithered 1-bit plans need lambda > 0, got {}", self.lambda));
        }
        if self.max_work.is_nan() || self.max_work <= 0.0 {
            return bad("max_work must be positive".into());
        }
        Ok(())
    }

    /// Bin width of the multi-bit quantizer.
    pub fn delta(&self) -> f64 {
        self.delta_rule.unwrap_or(DeltaRule::FiveOverL).resolve(self.levels)
    }

    fn work(&self) -> f64 {
        let n = self.model.dim() as f64;
        self.m_grid.iter().map(|&m| m as f64 * n * self.trials as f64).sum()
    }

    pub fn resolved_cells(&self) -> Result<Vec<CellParams>> {
        let model = self.signal_model()?;
        self.m_grid
            .iter()
            .map(|&m| {
                let (spec, dither, lambda) = match self.family {
                    Family::OneBitGaussian => (QuantizerSpec::sign(), DitherKind::Zero, 0.0),
                    Family::DitheredOneBit => {
                        (QuantizerSpec::sign(), DitherKind::UniformSymmetric(self.lambda), self.lambda)
                    }
                    Family::DitheredMultiBit => {
                        let delta = self.delta();
                        let spec = QuantizerSpec::saturated(delta, self.levels)?;
                        (spec, DitherKind::UniformSymmetric(delta / 2.0), delta / 2.0)
                    }
                };
                Ok(CellParams {
                    family: self.family,
                    model,
                    m,
                    levels: spec.levels().unwrap_or(0),
                    delta: spec.delta(),
                    lambda,
                    zeta: self.corruption_zeta,
                    spec,
                    dither,
                })
            })
            .collect()
    }
}

/// Fully resolved parameters of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellParams {
    pub family: Family,
    pub model: SignalModel,
    pub m: usize,
    pub levels: usize,
    pub delta: f64,
    pub lambda: f64,
    pub zeta: f64,
    pub spec: QuantizerSpec,
    pub dither: DitherKind,
}

impl CellParams {
    pub fn n(&self) -> usize {
        self.model.dim()
    }

    pub fn k_or_r(&self) -> f64 {
        self.model.structure.complexity()
    }

    pub fn matrix_kind(&self) -> MatrixKind {
        match self.family {
            Family::OneBitGaussian => MatrixKind::Gaussian,
            _ => MatrixKind::Rademacher,
        }
    }

    pub fn model_family(&self) -> ModelFamily {
        match self.family {
            Family::OneBitGaussian => ModelFamily::OneBitGaussian,
            Family::DitheredOneBit => ModelFamily::DitheredOneBit(self.lambda),
            Family::DitheredMultiBit => ModelFamily::DitheredMultiBit,
        }
    }

    /// Curve identifier: every cell parameter except `m`.
    pub fn slope_group(&self) -> String {
        format!(
            "{}/n{}/k{}/L{}/lam{}/z{}",
            self.family.short_name(),
            self.n(),
            self.k_or_r(),
            self.levels,
            self.lambda,
            self.zeta
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub cell: CellParams,
    pub cell_index: usize,
    pub trial_index: usize,
    pub seed: u64,
    pub final_error: f64,
    /// `‖y_corrupted - y‖₂`, zero without corruption.
    pub corruption_norm: f64,
    pub per_iterate_errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: CellParams,
    pub cell_index: usize,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub cells: Vec<CellSummary>,
}

impl ExperimentResult {
    /// Log-log slope per curve, for curves with at least three cells.
    pub fn slopes(&self) -> Vec<(String, SlopeFit)> {
        let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for c in &self.cells {
            let g = c.cell.slope_group();
            let pt = (c.cell.m as f64, c.mean_error);
            match groups.iter_mut().find(|(name, _)| *name == g) {
                Some((_, pts)) => pts.push(pt),
                None => groups.push((g, vec![pt])),
            }
        }
        groups.into_iter().filter_map(|(g, pts)| fit_slope(&pts).ok().map(|f| (g, f))).collect()
    }
}

/// Runs one trial of a cell.
pub fn run_trial(
    cell: &CellParams,
    iterations: usize,
    seed: u64,
    record_trajectory: bool,
) -> Result<(f64, f64, Option<Vec<f64>>)> {
    let x = cell.model.gen_signal_with(&mut stream_rng(seed, Stream::Signal));
    let instance = SensingInstance::sample(cell.matrix_kind(), cell.dither, cell.m, cell.n(), seed)?;
    let clean = instance.measure(&cell.spec, &x)?;
    let y = if cell.zeta > 0.0 { corrupt(&clean, &cell.spec, cell.zeta, seed)? } else { clean.clone() };
    let corruption_norm = distance(&clean, &y);
    let defaults = default_step_size(cell.model_family())?;
    let init = match defaults.init {
        InitPolicy::AnyInModel => Init::RandomInModel(seed),
        InitPolicy::Zero => Init::Zero,
    };
    let config = PgdConfig::new(defaults.eta).with_iterations(iterations).with_init(init);
    let rec = pgd_recover(&config, &cell.model, &cell.spec, &instance, &y, Some(&x))?;
    let errors = rec.errors.expect("truth supplied");
    let final_error = distance(&rec.estimate, &x);
    Ok((final_error, corruption_norm, record_trajectory.then_some(errors)))
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    run_experiments(std::slice::from_ref(plan))
}

/// Runs several plans; cell indices continue across plans while seeds use
/// each plan's own `(master_seed, local cell, trial)`.
pub fn run_experiments(plans: &[ExperimentPlan]) -> Result<ExperimentResult> {
    let mut jobs = Vec::new();
    let mut cells = Vec::new();
    for plan in plans {
        plan.validate()?;
        if plan.work() > plan.max_work {
            return Err(QcsError::SizeLimit(format!(
                "plan needs {:.3e} matrix entries over all trials, cap is {:.3e}",
                plan.work(),
                plan.max_work
            )));
        }
        for (local, cell) in plan.resolved_cells()?.into_iter().enumerate() {
            let cell_index = cells.len();
            for trial in 0..plan.trials {
                let seed = derive_seed(plan.master_seed, &[local as u64, trial as u64]);
                jobs.push((cell_index, trial, seed, plan.iterations, plan.record_trajectory));
            }
            cells.push((cell, plan.trials));
        }
    }
    let mut records = jobs
        .par_iter()
        .map(|&(ci, trial, seed, iters, traj)| {
            let cell = &cells[ci].0;
            let (final_error, corruption_norm, per_iterate_errors) = run_trial(cell, iters, seed, traj)?;
            Ok(TrialRecord {
                cell: cell.clone(),
                cell_index: ci,
                trial_index: trial,
                seed,
                final_error,
                corruption_norm,
                per_iterate_errors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.cell_index, r.trial_index));
    let summaries = cells
        .into_iter()
        .enumerate()
        .map(|(ci, (cell, trials))| {
            let errs: Vec<f64> = records.iter().filter(|r| r.cell_index == ci).map(|r| r.final_error).collect();
            let (mean_error, std_error) = mean_and_stderr(&errs);
            CellSummary { cell, cell_index: ci, trials, mean_error, std_error }
        })
        .collect();
    Ok(ExperimentResult { records, cells: summaries })
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares of `log10(error)` on `log10(m)`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(QcsError::InvalidParameter(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(m, e)| !(m > 0.0 && e > 0.0 && m.is_finite() && e.is_finite())) {
        return Err(QcsError::InvalidParameter("slope fit needs positive values".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(QcsError::InvalidParameter("slope fit needs distinct m values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r2 })
}
