//! Oracle suites behind the `verify` subcommand.
//!
//! Each suite compares the library against an independent route: brute-force
//! enumeration, convex duality, finite differences or Monte-Carlo sampling.
//! Sample sizes are chosen so a suite finishes in a few seconds.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::oracles::{enumerate_net, estimate_puv, geodesic_puv, hdm_decode, random_unit};
use crate::pgd::{
    self, distance, fit_raic_offset, one_sided_l1_loss, pgd_recover, raic_residual, threshold_subgradient, Init,
    PgdConfig,
};
use crate::quantizer::QuantizerSpec;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::sensing::{DitherKind, MatrixKind, SensingInstance};
use crate::signal::{l2_norm, project_norm, SignalModel, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Quantizer,
    Projection,
    Gradient,
    Puv,
    Hdm,
    Raic,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Quantizer, Suite::Projection, Suite::Gradient, Suite::Puv, Suite::Hdm, Suite::Raic];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Quantizer => "quantizer",
            Suite::Projection => "projection",
            Suite::Gradient => "gradient",
            Suite::Puv => "puv",
            Suite::Hdm => "hdm",
            Suite::Raic => "raic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Quantizer => quantizer_suite(),
        Suite::Projection => projection_suite(),
        Suite::Gradient => gradient_suite(),
        Suite::Puv => puv_suite(),
        Suite::Hdm => hdm_suite(),
        Suite::Raic => raic_suite(),
    }
}

fn rng(tag: u64) -> ChaCha8Rng {
    stream_rng(derive_seed(0x7665_7269_6679, &[tag]), Stream::Sampling)
}

/// Counts violations of
/// `||Q(a) - Q(b)| - δ| · 1(Q(a) != Q(b)) <= |a - b| · 1(|a - b| >= δ)`
/// for the saturated quantizer.
pub fn level_gap_violations(tuples: usize, seed: u64) -> Result<usize> {
    let mut r = stream_rng(seed, Stream::Sampling);
    let mut violations = 0;
    for _ in 0..tuples {
        let delta = r.gen_range(0.01..2.0);
        let levels = 2 * r.gen_range(1..=16);
        let spec = QuantizerSpec::saturated(delta, levels)?;
        let span = levels as f64 * delta;
        let a = r.gen_range(-span..span);
        let b = if r.gen::<bool>() { a + r.gen_range(-2.0 * delta..2.0 * delta) } else { r.gen_range(-span..span) };
        let (qa, qb) = (spec.quantize(a)?, spec.quantize(b)?);
        let lhs = if qa != qb { ((qa - qb).abs() - delta).abs() } else { 0.0 };
        let rhs = if (a - b).abs() >= delta { (a - b).abs() } else { 0.0 };
        // level values carry one rounding each
        if lhs > rhs + 1e-12 * span {
            violations += 1;
        }
    }
    Ok(violations)
}

fn quantizer_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let v = level_gap_violations(100_000, 1)?;
    checks.push(Check::new("level-gap inequality", v == 0, format!("{v} violations in 1e5 tuples")));

    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut saturation = true;
    for _ in 0..20_000 {
        let delta = r.gen_range(0.01..3.0);
        let levels = 2 * r.gen_range(1..=10);
        let uni = QuantizerSpec::uniform(delta)?;
        let sat = QuantizerSpec::saturated(delta, levels)?;
        let a: f64 = r.gen_range(-20.0..20.0);
        let b: f64 = r.gen_range(-20.0..20.0);
        worst = worst.max((uni.quantize(a)? - a).abs() / delta);
        for q in [&uni, &sat] {
            if (a <= b) != (q.quantize(a)? <= q.quantize(b)?) && q.quantize(a)? != q.quantize(b)? {
                monotone = false;
            }
        }
        let inside = a.abs() < levels as f64 * delta / 2.0;
        let qa = sat.quantize(a)?;
        let edge = (levels as f64 - 1.0) * delta / 2.0;
        if (inside && qa != uni.quantize(a)?) || (!inside && (qa.abs() - edge).abs() > 1e-12 * edge) {
            saturation = false;
        }
    }
    checks.push(Check::new("uniform error <= δ/2", worst <= 0.5 + 1e-12, format!("max |Q(a)-a|/δ = {worst:.6}")));
    checks.push(Check::new("monotone", monotone, String::new()));
    checks.push(Check::new("saturation agrees with uniform", saturation, String::new()));
    Ok(checks)
}

/// Exhaustive best `k`-support projection, returned as the squared distance.
pub fn brute_force_sparse_distance(u: &[f64], k: usize) -> f64 {
    fn rec(u: &[f64], k: usize, start: usize, kept: f64, best: &mut f64) {
        if k == 0 {
            *best = best.max(kept);
            return;
        }
        for j in start..=u.len() - k {
            rec(u, k - 1, j + 1, kept + u[j] * u[j], best);
        }
    }
    let mut best = 0.0;
    rec(u, k, 0, 0.0, &mut best);
    u.iter().map(|v| v * v).sum::<f64>() - best
}

/// Feasibility violation and duality gap of a candidate ℓ1-ball projection.
pub fn l1_projection_certificate(u: &[f64], x: &[f64], radius: f64) -> (f64, f64) {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let infeasible = (l1 - radius).max(0.0);
    // multiplier read off the shrinkage amount of any nonzero coordinate
    let theta =
        u.iter().zip(x).filter(|(_, xi)| **xi != 0.0).map(|(ui, xi)| ui.abs() - xi.abs()).fold(0.0f64, f64::max);
    let primal: f64 = 0.5 * u.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let dual: f64 = u
        .iter()
        .map(|&ui| if ui.abs() > theta { theta * ui.abs() - 0.5 * theta * theta } else { 0.5 * ui * ui })
        .sum::<f64>()
        - theta * radius;
    (infeasible, primal - dual)
}

fn projection_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut r = rng(2);
    let mut worst_sparse = 0.0f64;
    let mut worst_cone = 0.0f64;
    let mut idempotent = true;
    for _ in 0..1000 {
        let n = r.gen_range(1..=10);
        let k = r.gen_range(1..=n);
        let u: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
        let model = SignalModel::sphere(Structure::Sparse { k, n })?;
        let p = model.project_structure(&u)?;
        let d_lib = u.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        worst_sparse = worst_sparse.max((d_lib - brute_force_sparse_distance(&u, k)).abs());
        idempotent &= model.project_structure(&p)? == p;
        // Σ_k ∩ S: distance² to u_S/‖u_S‖ is ‖u‖² - 2‖u_S‖ + 1
        let both = model.project(&u)?;
        let d_two_stage = distance(&both, &u).powi(2);
        let best_kept = u.iter().map(|v| v * v).sum::<f64>() - brute_force_sparse_distance(&u, k);
        let d_direct = u.iter().map(|v| v * v).sum::<f64>() - 2.0 * best_kept.sqrt() + 1.0;
        worst_cone = worst_cone.max((d_two_stage - d_direct).abs());
    }
    checks.push(Check::new(
        "hard threshold = exhaustive supports",
        worst_sparse <= 1e-10,
        format!("max gap {worst_sparse:.2e}"),
    ));
    checks.push(Check::new("two-stage projection on a cone", worst_cone <= 1e-10, format!("max gap {worst_cone:.2e}")));
    checks.push(Check::new("idempotent", idempotent, String::new()));

    let (mut worst_feas, mut worst_gap) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let n = r.gen_range(1..=40);
        let radius = r.gen_range(0.1..5.0f64.min((n as f64).sqrt()));
        let scale = r.gen_range(0.1..5.0);
        let u: Vec<f64> = (0..n).map(|_| scale * r.sample::<f64, _>(StandardNormal)).collect();
        let model = SignalModel::sphere(Structure::L1Ball { k: radius * radius, n })?;
        let x = model.project_structure(&u)?;
        let (feas, gap) = l1_projection_certificate(&u, &x, radius);
        worst_feas = worst_feas.max(feas);
        worst_gap = worst_gap.max(gap.abs());
    }
    checks.push(Check::new("l1 projection feasible", worst_feas <= 1e-10, format!("max excess {worst_feas:.2e}")));
    checks.push(Check::new("l1 projection duality gap", worst_gap <= 1e-8, format!("max gap {worst_gap:.2e}")));

    let mut annulus = true;
    for _ in 0..1000 {
        let alpha = r.gen_range(0.0..1.0);
        let beta = alpha + r.gen_range(0.0..1.0);
        let u: Vec<f64> = (0..5).map(|_| r.gen_range(-2.0..2.0) * r.gen::<f64>()).collect();
        let p = project_norm(alpha, beta, &u)?;
        let nrm = l2_norm(&p);
        annulus &= nrm >= alpha - 1e-12 && nrm <= beta + 1e-12;
    }
    checks.push(Check::new("annulus projection lands in [α, β]", annulus, String::new()));
    Ok(checks)
}

/// Random small configuration for gradient checks.
pub struct GradientCase {
    pub spec: QuantizerSpec,
    pub instance: SensingInstance,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn random_gradient_case(r: &mut ChaCha8Rng, seed: u64) -> Result<GradientCase> {
    let spec = match r.gen_range(0..4) {
        0 => QuantizerSpec::sign(),
        1 => QuantizerSpec::uniform(r.gen_range(0.2..1.5))?,
        2 => QuantizerSpec::saturated(r.gen_range(0.2..1.5), 2 * r.gen_range(1..=6))?,
        _ => {
            let mut b: Vec<f64> = (0..r.gen_range(1..6)).map(|_| r.gen_range(-2.0..2.0)).collect();
            b.sort_by(f64::total_cmp);
            b.dedup();
            QuantizerSpec::general(b, r.gen_range(-1.0..1.0), r.gen_range(0.1..2.0))?
        }
    };
    let n = r.gen_range(2..=6);
    let m = r.gen_range(5..=30);
    let kind = if r.gen::<bool>() { MatrixKind::Gaussian } else { MatrixKind::Rademacher };
    let dither = DitherKind::UniformSymmetric(r.gen_range(0.0..1.0));
    let instance = SensingInstance::sample(kind, dither, m, n, seed)?;
    let x: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let y = instance.measure(&spec, &x)?;
    // keep every pre-quantization value 1e-6 away from thresholds
    loop {
        let u: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
        let t = instance.pre_quantization(&u)?;
        let clear = t.iter().all(|&ti| {
            let c = spec.cell_index(ti);
            let near = |cc: i64| match spec.cell_range() {
                Some((lo, hi)) if cc <= lo || cc > hi => false,
                _ => (ti - spec.boundary(cc)).abs() < 1e-6,
            };
            !near(c) && !near(c + 1)
        });
        if clear {
            return Ok(GradientCase { spec, instance, y, u });
        }
    }
}

/// Central finite-difference gradient of the one-sided loss.
pub fn finite_difference_gradient(case: &GradientCase, h: f64) -> Result<Vec<f64>> {
    (0..case.u.len())
        .map(|j| {
            let mut up = case.u.clone();
            let mut dn = case.u.clone();
            up[j] += h;
            dn[j] -= h;
            let lu = one_sided_l1_loss(&case.spec, &case.instance, &case.y, &up)?;
            let ld = one_sided_l1_loss(&case.spec, &case.instance, &case.y, &dn)?;
            Ok((lu - ld) / (2.0 * h))
        })
        .collect()
}

fn gradient_suite() -> Result<Vec<Check>> {
    let mut r = rng(3);
    let (mut worst_id, mut worst_fd) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let case = random_gradient_case(&mut r, i)?;
        let g = pgd::gradient(&case.spec, &case.instance, &case.y, &case.u)?;
        let g2 = threshold_subgradient(&case.spec, &case.instance, &case.y, &case.u)?;
        worst_id = worst_id.max(distance(&g, &g2));
        let fd = finite_difference_gradient(&case, 1e-7)?;
        let scale = l2_norm(&g).max(1e-3);
        worst_fd = worst_fd.max(distance(&g, &fd) / scale);
    }
    Ok(vec![
        Check::new("two gradient forms agree", worst_id <= 1e-12, format!("max diff {worst_id:.2e}")),
        Check::new("finite differences", worst_fd <= 1e-6, format!("max relative error {worst_fd:.2e}")),
    ])
}

fn puv_suite() -> Result<Vec<Check>> {
    let mut r = rng(4);
    let sign = QuantizerSpec::sign();
    let mut within = 0;
    for i in 0..10 {
        let n = r.gen_range(2..8);
        let u = random_unit(n, &mut r);
        let v = random_unit(n, &mut r);
        let est = estimate_puv(&sign, MatrixKind::Gaussian, DitherKind::Zero, &u, &v, 20_000, i)?;
        let exact = geodesic_puv(&u, &v)?;
        if (est.p - exact).abs() <= 3.0 * est.stderr.max(1e-12) {
            within += 1;
        }
    }
    let mut bound_ok = true;
    for _ in 0..10_000 {
        let n = r.gen_range(2..10);
        let u = random_unit(n, &mut r);
        let v = random_unit(n, &mut r);
        let d = distance(&u, &v);
        let p = geodesic_puv(&u, &v)?;
        bound_ok &= d / std::f64::consts::PI <= p + 1e-12 && p <= d / 2.0 + 1e-12;
    }
    let mut dithered_ok = true;
    let mut multibit_ok = true;
    let ball = SignalModel::ball(Structure::Sparse { k: 4, n: 4 })?;
    for i in 0..5 {
        let u = ball.gen_signal(100 + i);
        let v = ball.gen_signal(200 + i);
        let d = distance(&u, &v);
        let lambda = 5.0;
        let est = estimate_puv(&sign, MatrixKind::Rademacher, DitherKind::UniformSymmetric(lambda), &u, &v, 20_000, i)?;
        dithered_ok &= est.p <= d / (2.0 * lambda) + 3.0 * est.stderr + 1e-12;
        let delta = 0.5;
        let spec = QuantizerSpec::saturated(delta, 8)?;
        let est =
            estimate_puv(&spec, MatrixKind::Rademacher, DitherKind::UniformSymmetric(delta / 2.0), &u, &v, 20_000, i)?;
        multibit_ok &= est.p <= d / delta + 3.0 * est.stderr + 1e-12;
    }
    Ok(vec![
        Check::new("geodesic closed form", within >= 9, format!("{within}/10 within 3 stderr")),
        Check::new("two-sided geodesic bound", bound_ok, String::new()),
        Check::new("dithered 1-bit upper bound", dithered_ok, String::new()),
        Check::new("multi-bit upper bound", multibit_ok, String::new()),
    ])
}

/// HDM and PGD on `n = 6`, `k = 1`, `m = 200`; returns successes of each.
pub fn hdm_vs_pgd(trials: usize, seed: u64) -> Result<(usize, usize)> {
    let model = SignalModel::sphere(Structure::Sparse { k: 1, n: 6 })?;
    let net = enumerate_net(&model, 0.05)?;
    let sign = QuantizerSpec::sign();
    let eta = pgd::default_step_size(pgd::ModelFamily::OneBitGaussian)?.eta;
    let (mut hdm_ok, mut pgd_ok) = (0, 0);
    for t in 0..trials {
        let s = derive_seed(seed, &[t as u64]);
        let x = model.gen_signal(s);
        let inst = SensingInstance::sample(MatrixKind::Gaussian, DitherKind::Zero, 200, 6, s)?;
        let y = inst.measure(&sign, &x)?;
        let hdm = hdm_decode(&net, &sign, &inst, &y)?;
        hdm_ok += usize::from(distance(&hdm.estimate, &x) <= 0.1);
        let cfg = PgdConfig::new(eta).with_init(Init::RandomInModel(s));
        let rec = pgd_recover(&cfg, &model, &sign, &inst, &y, None)?;
        pgd_ok += usize::from(distance(&rec.estimate, &x) <= 0.1);
    }
    Ok((hdm_ok, pgd_ok))
}

fn hdm_suite() -> Result<Vec<Check>> {
    let (h, p) = hdm_vs_pgd(50, 9)?;
    Ok(vec![
        Check::new("HDM within 2r", h >= 48, format!("{h}/50")),
        Check::new("PGD within 2r", p >= 48, format!("{p}/50")),
    ])
}

/// Fits the offset `C` of the contraction bound over random sparse sphere
/// pairs at radius `r = 0.05`.
pub fn raic_fit(pairs: usize, m: usize, seed: u64) -> Result<(f64, f64)> {
    let (n, k, r) = (100, 3, 0.05);
    let model = SignalModel::sphere(Structure::Sparse { k, n })?;
    let inst = SensingInstance::sample(MatrixKind::Gaussian, DitherKind::Zero, m, n, seed)?;
    let sign = QuantizerSpec::sign();
    let eta = pgd::default_step_size(pgd::ModelFamily::OneBitGaussian)?.eta;
    let mut rr = stream_rng(seed, Stream::Sampling);
    let mut samples = Vec::with_capacity(pairs);
    let mut scales: Vec<f64> = (0..pairs).map(|i| 10f64.powf(-3.0 + 3.5 * i as f64 / pairs as f64)).collect();
    scales.shuffle(&mut rr);
    for s in scales {
        let u = model.gen_signal_with(&mut rr);
        // perturb at a random scale and project back to pair nearby points
        let noise: Vec<f64> =
            u.iter().map(|ui| ui + s * rr.sample::<f64, _>(StandardNormal) / (n as f64).sqrt()).collect();
        let v = model.project(&noise)?;
        let d = distance(&u, &v);
        let res = raic_residual(&model, &sign, &inst, eta, 1.0, &u, &v)?;
        samples.push((d, res));
    }
    let c = fit_raic_offset(&samples, 0.6, 3.0, r);
    let worst_ratio =
        samples.iter().map(|&(d, res)| res / (0.6 * d + 3.0 * (r * d).sqrt() + c * r)).fold(0.0f64, f64::max);
    Ok((c, worst_ratio))
}

fn raic_suite() -> Result<Vec<Check>> {
    let (c, ratio) = raic_fit(300, 5000, 17)?;
    Ok(vec![Check::new(
        "contraction bound with fitted offset",
        c.is_finite() && ratio <= 1.0 + 1e-12,
        format!("fitted C = {c:.4}"),
    )])
}
