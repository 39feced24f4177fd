//! Brute-force and Monte-Carlo references used to check the recovery engine.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_len, QcsError, Result};
use crate::quantizer::QuantizerSpec;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::sensing::{hamming, DitherKind, MatrixKind, SensingInstance};
use crate::signal::{l2_norm, SignalModel, Structure};

/// Upper bound on the number of points in any net.
pub const MAX_NET_POINTS: usize = 2_000_000;
/// Size of the random fallback net.
pub const RANDOM_NET_POINTS: usize = 10_000;
const RANDOM_NET_SEED: u64 = 0x6e65_745f_7365_6564;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateNet {
    pub points: Vec<Vec<f64>>,
    /// Target covering radius.
    pub radius: f64,
    pub model: SignalModel,
    /// True when the covering radius is guaranteed, false for random nets.
    pub exact: bool,
}

/// Finite candidate set for the HDM decoder.
///
/// Sparse signals on the unit sphere with `k <= 2` and `n <= 12` get an
/// exact net: `±e_i` for `k = 1`, and for `k = 2` a grid of `ceil(2π/r)`
/// equally spaced angles on the unit circle of every 2-element support.
/// Everything else gets a labeled random net of [`RANDOM_NET_POINTS`] draws.
pub fn enumerate_net(model: &SignalModel, r: f64) -> Result<CandidateNet> {
    if !(r.is_finite() && r > 0.0) {
        return Err(QcsError::InvalidParameter(format!("net radius must be positive, got {r}")));
    }
    model.validate()?;
    let exact_sphere = model.alpha == 1.0 && model.beta == 1.0;
    match model.structure {
        Structure::Sparse { k, n } if exact_sphere && k <= 2 && n <= 12 => {
            let axes = || (0..n).flat_map(|i| [1.0, -1.0].map(|s| unit(n, i, s)));
            let points: Vec<Vec<f64>> = if k == 1 || r >= 2.0 {
                // every point of the sphere is within the diameter 2 of e_1
                axes().collect()
            } else {
                let steps = (2.0 * std::f64::consts::PI / r).ceil() as usize;
                let total = n * (n - 1) / 2 * steps;
                if total > MAX_NET_POINTS {
                    return Err(QcsError::SizeLimit(format!("net of {total} points")));
                }
                let mut pts = Vec::with_capacity(total);
                for i in 0..n {
                    for j in i + 1..n {
                        for s in 0..steps {
                            let theta = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
                            let mut p = vec![0.0; n];
                            p[i] = theta.cos();
                            p[j] = theta.sin();
                            pts.push(p);
                        }
                    }
                }
                pts
            };
            Ok(CandidateNet { points, radius: r, model: *model, exact: true })
        }
        _ => random_net(model, r, RANDOM_NET_POINTS, RANDOM_NET_SEED),
    }
}

/// `size` independent draws from the model's signal generator.
pub fn random_net(model: &SignalModel, r: f64, size: usize, seed: u64) -> Result<CandidateNet> {
    if size == 0 || size > MAX_NET_POINTS {
        return Err(QcsError::SizeLimit(format!("random net of {size} points")));
    }
    let points = (0..size).map(|i| model.gen_signal(derive_seed(seed, &[i as u64]))).collect();
    Ok(CandidateNet { points, radius: r, model: *model, exact: false })
}

fn unit(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = s;
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdmResult {
    pub estimate: Vec<f64>,
    pub index: usize,
    pub hamming: usize,
}

/// Net member whose quantized measurements are closest to `y` in Hamming
/// distance; the first one wins ties.
pub fn hdm_decode(
    net: &CandidateNet,
    spec: &QuantizerSpec,
    instance: &SensingInstance,
    y: &[f64],
) -> Result<HdmResult> {
    if net.points.is_empty() {
        return Err(QcsError::InvalidParameter("empty candidate net".into()));
    }
    check_len(instance.m(), y.len())?;
    let scores =
        net.points.par_iter().map(|p| hamming(&instance.measure(spec, p)?, y)).collect::<Result<Vec<usize>>>()?;
    let (index, &best) = scores.iter().enumerate().min_by_key(|&(i, &d)| (d, i)).expect("net is nonempty");
    Ok(HdmResult { estimate: net.points[index].clone(), index, hamming: best })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuvEstimate {
    pub p: f64,
    pub stderr: f64,
    pub samples: usize,
}

const PUV_CHUNK: usize = 4096;

/// Monte-Carlo frequency of `Q(<a,u> - τ) != Q(<a,v> - τ)` over fresh
/// `(a, τ)` draws. Sample `s` belongs to chunk `s / 4096`, whose stream is
/// keyed by the chunk index, so the estimate does not depend on threads.
pub fn estimate_puv(
    spec: &QuantizerSpec,
    matrix_kind: MatrixKind,
    dither_kind: DitherKind,
    u: &[f64],
    v: &[f64],
    samples: usize,
    seed: u64,
) -> Result<PuvEstimate> {
    if samples == 0 {
        return Err(QcsError::InvalidParameter("need at least one sample".into()));
    }
    check_len(u.len(), v.len())?;
    if matrix_kind == MatrixKind::Explicit || dither_kind == DitherKind::Explicit {
        return Err(QcsError::InvalidParameter("explicit ensembles cannot be sampled".into()));
    }
    if let DitherKind::UniformSymmetric(l) = dither_kind {
        if !(l.is_finite() && l >= 0.0) {
            return Err(QcsError::InvalidParameter(format!("dither level must be >= 0, got {l}")));
        }
    }
    let chunks = samples.div_ceil(PUV_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(derive_seed(seed, &[c as u64]), Stream::Sampling);
            let len = PUV_CHUNK.min(samples - c * PUV_CHUNK);
            let mut count = 0;
            for _ in 0..len {
                let (mut au, mut av) = (0.0, 0.0);
                for (ui, vi) in u.iter().zip(v) {
                    let a = matrix_kind.sample(&mut rng);
                    au += a * ui;
                    av += a * vi;
                }
                let tau = dither_kind.sample(&mut rng);
                if spec.cell_index(au - tau) != spec.cell_index(av - tau) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(PuvEstimate { p, stderr: (p * (1.0 - p) / samples as f64).sqrt(), samples })
}

/// `arccos(<u, v>) / π` for unit vectors.
pub fn geodesic_puv(u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(u.len(), v.len())?;
    for w in [u, v] {
        if (l2_norm(w) - 1.0).abs() > 1e-9 {
            return Err(QcsError::InvalidParameter("geodesic distance needs unit vectors".into()));
        }
    }
    let ip: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok(ip.clamp(-1.0, 1.0).acos() / std::f64::consts::PI)
}

/// Random unit vector, used by the property tests and verify suites.
pub fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let norm = l2_norm(&g);
        if norm > 1e-12 {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::DenseMatrix;

    fn sphere_sparse(k: usize, n: usize) -> SignalModel {
        SignalModel::sphere(Structure::Sparse { k, n }).unwrap()
    }

    #[test]
    fn net_sizes() {
        assert_eq!(enumerate_net(&sphere_sparse(1, 3), 0.1).unwrap().points.len(), 6);
        assert_eq!(enumerate_net(&sphere_sparse(2, 3), 2.5).unwrap().points.len(), 6);
        // 3 supports x ceil(2π / 0.1) = 63 angles
        let net = enumerate_net(&sphere_sparse(2, 3), 0.1).unwrap();
        assert_eq!(net.points.len(), 189);
        assert!(net.exact);
        for p in &net.points {
            assert!((l2_norm(p) - 1.0).abs() <= 1e-12);
        }
        let big = enumerate_net(&sphere_sparse(3, 20), 0.1).unwrap();
        assert!(!big.exact);
        assert_eq!(big.points.len(), RANDOM_NET_POINTS);
        assert!(matches!(enumerate_net(&sphere_sparse(2, 12), 1e-5), Err(QcsError::SizeLimit(_))));
        assert!(enumerate_net(&sphere_sparse(2, 3), 0.0).is_err());
    }

    #[test]
    fn exact_net_covers_sphere() {
        let r = 0.2;
        let model = sphere_sparse(2, 4);
        let net = enumerate_net(&model, r).unwrap();
        for seed in 0..500 {
            let x = model.gen_signal(seed);
            let best = net.points.iter().map(|p| crate::pgd::distance(p, &x)).fold(f64::INFINITY, f64::min);
            assert!(best <= r, "uncovered point at distance {best}");
        }
    }

    #[test]
    fn hdm_tiny() {
        let inst = SensingInstance::from_parts(DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap(), vec![0.0]).unwrap();
        let sign = QuantizerSpec::sign();
        let model = sphere_sparse(1, 2);
        let net = CandidateNet { points: vec![vec![1.0, 0.0], vec![-1.0, 0.0]], radius: 1.0, model, exact: true };
        let y = inst.measure(&sign, &[1.0, 0.0]).unwrap();
        let out = hdm_decode(&net, &sign, &inst, &y).unwrap();
        assert_eq!(out.estimate, vec![1.0, 0.0]);
        assert_eq!(out.hamming, 0);
        let empty = CandidateNet { points: vec![], ..net };
        assert!(hdm_decode(&empty, &sign, &inst, &y).is_err());
    }

    #[test]
    fn hdm_is_exhaustive_minimum() {
        let model = sphere_sparse(2, 5);
        let net = enumerate_net(&model, 0.3).unwrap();
        let inst = SensingInstance::sample(MatrixKind::Gaussian, DitherKind::Zero, 40, 5, 3).unwrap();
        let sign = QuantizerSpec::sign();
        let y = inst.measure(&sign, &model.gen_signal(7)).unwrap();
        let out = hdm_decode(&net, &sign, &inst, &y).unwrap();
        for (i, p) in net.points.iter().enumerate() {
            let d = hamming(&inst.measure(&sign, p).unwrap(), &y).unwrap();
            assert!(out.hamming < d || (out.hamming == d && out.index <= i));
        }
        // noiseless measurements of a member decode with Hamming distance 0
        let member = &net.points[17];
        let y = inst.measure(&sign, member).unwrap();
        assert_eq!(hdm_decode(&net, &sign, &inst, &y).unwrap().hamming, 0);
    }

    #[test]
    fn puv_closed_cases() {
        let sign = QuantizerSpec::sign();
        let u = vec![0.6, 0.8, 0.0];
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let same = estimate_puv(&sign, MatrixKind::Gaussian, DitherKind::Zero, &u, &u, 5000, 1).unwrap();
        assert_eq!(same.p, 0.0);
        let opp = estimate_puv(&sign, MatrixKind::Gaussian, DitherKind::Zero, &u, &neg, 5000, 1).unwrap();
        assert_eq!(opp.p, 1.0);
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let ortho = estimate_puv(&sign, MatrixKind::Gaussian, DitherKind::Zero, &e1, &e2, 100_000, 2).unwrap();
        assert!((ortho.p - 0.5).abs() <= 3.0 * ortho.stderr, "{ortho:?}");
        assert!(estimate_puv(&sign, MatrixKind::Gaussian, DitherKind::Zero, &e1, &e2, 0, 2).is_err());
    }

    #[test]
    fn puv_is_thread_independent() {
        let sign = QuantizerSpec::sign();
        let u = [0.6, 0.8];
        let v = [0.8, 0.6];
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a =
            estimate_puv(&sign, MatrixKind::Rademacher, DitherKind::UniformSymmetric(1.0), &u, &v, 20_000, 5).unwrap();
        let b = pool
            .install(|| {
                estimate_puv(&sign, MatrixKind::Rademacher, DitherKind::UniformSymmetric(1.0), &u, &v, 20_000, 5)
            })
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn geodesic_examples() {
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        assert_eq!(geodesic_puv(&e1, &e1).unwrap(), 0.0);
        assert_eq!(geodesic_puv(&e1, &[-1.0, 0.0]).unwrap(), 1.0);
        assert!((geodesic_puv(&e1, &e2).unwrap() - 0.5).abs() < 1e-15);
        assert!(geodesic_puv(&[2.0, 0.0], &e2).is_err());
    }
}
