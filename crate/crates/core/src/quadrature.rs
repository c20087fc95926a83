//! One-dimensional adaptive quadrature and the n-dimensional Monte Carlo
//! oracle used to validate the radial reduction.
//!
//! [`integrate`] is a globally adaptive Gauss-Kronrod (7/15) scheme in the
//! style of QUADPACK's `qag`: the panel with the largest error estimate is
//! bisected until the summed estimate meets `max(rel_tol |I|, abs_tol)`.
//! With `singular_origin` set, the interval is first mapped through
//! `r = lo + (hi - lo) e^t`, which turns an integrable power singularity
//! `(r - lo)^s`, `s > -1`, into an exponentially decaying integrand on
//! `t <= 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::{InequalityCase, Variant};
use crate::constants::unit_sphere_area;
use crate::error::{Error, Result};
use crate::radial::{RadialFunction, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub singular_origin: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_subdivisions: 1 << 16,
            singular_origin: false,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::Config(format!(
                "need rel_tol > 0 and abs_tol >= 0, got rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    pub fn with_singular_origin(mut self, on: bool) -> Self {
        self.singular_origin = on;
        self
    }
}

/// Result of a quadrature: value, error estimate and work counters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

impl Estimate {
    fn zero() -> Self {
        Estimate {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
            evaluations: 0,
        }
    }

    fn accumulate(&mut self, other: &Estimate) {
        self.value += other.value;
        self.error += other.error;
        self.subdivisions += other.subdivisions;
        self.evaluations += other.evaluations;
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (plus the centre).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by position so the refinement order is reproducible.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn eval_checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = eval_checked(f, centre)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval_checked(f, centre - dx)?;
        let f2 = eval_checked(f, centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel { lo, hi, value, error })
}

/// Globally adaptive integration over the consecutive panels defined by
/// `breaks` (sorted, at least two points).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(Error::Config("need at least two break points".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod_15(&f, w[0], w[1])?);
            evaluations += 15;
        }
    }
    let mut subdivisions = heap.len();
    let (mut value, mut error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    loop {
        let target = (spec.rel_tol * value.abs()).max(spec.abs_tol);
        if error <= target {
            // Re-sum to drop the drift of the running totals.
            let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
            return Ok(Estimate {
                value,
                error,
                subdivisions,
                evaluations,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                value,
                error,
                subdivisions,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return Ok(Estimate::zero()),
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // Panel can no longer be split in floating point.
            return Err(Error::ToleranceNotMet {
                value,
                error,
                subdivisions,
            });
        }
        let left = gauss_kronrod_15(&f, worst.lo, mid)?;
        let right = gauss_kronrod_15(&f, mid, worst.hi)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        evaluations += 30;
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        }
    }
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_m(x) and P_{m-1}(x).
            let (mut prev, mut cur) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
                prev = cur;
                cur = next;
            }
            if m == 1 {
                prev = 1.0;
            }
            dp = mf * (x * cur - prev) / (x * x - 1.0);
            let dx = cur / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

const GRADED_CHUNK: f64 = 16.0;
const GRADED_T_MIN: f64 = -740.0;

/// Integrates `f` over `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if hi < lo {
        let est = integrate(f, hi, lo, spec)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }
    if hi == lo {
        return Ok(Estimate::zero());
    }
    if !spec.singular_origin {
        return integrate_with_breaks(f, &[lo, hi], spec);
    }
    let width = hi - lo;
    let mapped = |t: f64| {
        let e = t.exp();
        let x = lo + width * e;
        if x <= lo {
            return 0.0;
        }
        f(x) * width * e
    };
    let mut total = integrate_with_breaks(mapped, &[-GRADED_CHUNK, 0.0], spec)?;
    let mut upper = -GRADED_CHUNK;
    loop {
        let lower = upper - GRADED_CHUNK;
        let chunk_spec = QuadratureSpec {
            abs_tol: (spec.rel_tol * total.value.abs()).max(spec.abs_tol) * 0.1,
            ..*spec
        };
        let chunk = integrate_with_breaks(mapped, &[lower, upper], &chunk_spec)?;
        total.accumulate(&chunk);
        let target = (spec.rel_tol * total.value.abs()).max(spec.abs_tol);
        if chunk.value.abs() <= 0.25 * target {
            total.error += chunk.value.abs();
            return Ok(total);
        }
        if lower <= GRADED_T_MIN {
            return Err(Error::ToleranceNotMet {
                value: total.value,
                error: total.error + chunk.value.abs(),
                subdivisions: total.subdivisions,
            });
        }
        upper = lower;
    }
}

/// Monte Carlo settings: uniform samples in the ball of radius `radius_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSpec {
    pub samples: u64,
    pub seed: u64,
    pub radius_cap: f64,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            samples: 1_000_000,
            seed: 0x5eed_2010,
            radius_cap: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

const MC_BATCH: u64 = 8192;

/// Volume-weighted mean of `f` over the ball of radius `spec.radius_cap` in
/// `R^n`. Each batch owns its own ChaCha stream and partial sums are
/// combined in batch order, so the result does not depend on scheduling.
pub fn monte_carlo_ball<F>(n: u32, f: F, spec: &McSpec) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n == 0 || spec.samples < 2 || !(spec.radius_cap > 0.0) {
        return Err(Error::Config(format!("invalid Monte Carlo spec {spec:?}")));
    }
    let dim = n as usize;
    let batches = spec.samples.div_ceil(MC_BATCH);
    let partials: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(batch);
            let count = MC_BATCH.min(spec.samples - batch * MC_BATCH);
            let mut x = vec![0.0; dim];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let mut norm2 = 0.0;
                for xi in x.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *xi = z;
                    norm2 += z * z;
                }
                let u: f64 = rng.random();
                let radius = spec.radius_cap * u.powf(1.0 / n as f64);
                let scale = radius / norm2.sqrt();
                x.iter_mut().for_each(|xi| *xi *= scale);
                let v = f(&x);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partials.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let count = spec.samples as f64;
    let volume = unit_sphere_area(n) * spec.radius_cap.powi(n as i32) / n as f64;
    let mean = s1 / count;
    let var = ((s2 / count - mean * mean) * count / (count - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: volume * mean,
        std_error: volume * (var / count).sqrt(),
        samples: spec.samples,
    })
}

fn gradient_norm<G: Fn(&[f64]) -> f64>(u: &G, x: &[f64], h: f64) -> f64 {
    let mut y = x.to_vec();
    let mut sum = 0.0;
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let up = u(&y);
        y[i] = x[i] - h;
        let down = u(&y);
        y[i] = x[i];
        let d = (up - down) / (2.0 * h);
        sum += d * d;
    }
    sum.sqrt()
}

fn laplacian<G: Fn(&[f64]) -> f64>(u: &G, x: &[f64], h: f64) -> f64 {
    let mut y = x.to_vec();
    let centre = u(x);
    let mut sum = 0.0;
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let up = u(&y);
        y[i] = x[i] - h;
        let down = u(&y);
        y[i] = x[i];
        sum += up - 2.0 * centre + down;
    }
    sum / (h * h)
}

/// Monte Carlo estimate of one side of an n-dimensional inequality, using
/// the full integrand in `R^n`: `u(x) = g(|x|)`, with the gradient and
/// Laplacian taken by finite differences in Cartesian coordinates. For CKN
/// cases the left side is the inner integral, before the `2/p` power.
pub fn monte_carlo_weighted<P: RadialFunction + Sync>(
    case: &InequalityCase,
    side: Side,
    profile: &P,
    spec: &McSpec,
) -> Result<McEstimate> {
    let (_, hi) = profile.support();
    if hi > spec.radius_cap {
        return Err(Error::Config(format!(
            "radius_cap {} does not cover the profile support (up to {hi})",
            spec.radius_cap
        )));
    }
    let n = case.n();
    let p = case.p();
    let u = |x: &[f64]| profile.jet(x.iter().map(|v| v * v).sum::<f64>().sqrt()).g;
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    const GRAD_H: f64 = 1e-5;
    const LAP_H: f64 = 1e-3;
    match (case.variant(), side) {
        (Variant::HardySubcritical | Variant::HardySupercritical, Side::Lhs) => {
            monte_carlo_ball(n, |x| u(x).abs().powf(p) / norm(x).powf(p), spec)
        }
        (Variant::HardySubcritical | Variant::HardySupercritical, Side::Rhs) => {
            monte_carlo_ball(n, |x| gradient_norm(&u, x, GRAD_H).powf(p), spec)
        }
        (Variant::CknEdgeBequalsAplus1 | Variant::CknEdgeBequalsA | Variant::CknInterpolated, Side::Lhs) => {
            let b = case.b().expect("CKN case");
            monte_carlo_ball(n, |x| u(x).abs().powf(p) / norm(x).powf(b * p), spec)
        }
        (Variant::CknEdgeBequalsAplus1 | Variant::CknEdgeBequalsA | Variant::CknInterpolated, Side::Rhs) => {
            let a = case.a().expect("CKN case");
            monte_carlo_ball(
                n,
                |x| gradient_norm(&u, x, GRAD_H).powi(2) / norm(x).powf(2.0 * a),
                spec,
            )
        }
        (Variant::Rellich, Side::Lhs) => monte_carlo_ball(n, |x| u(x).powi(2) / norm(x).powi(4), spec),
        (Variant::Rellich, Side::Rhs) => monte_carlo_ball(n, |x| laplacian(&u, x, LAP_H).powi(2), spec),
        (Variant::Hardy1D, _) => Err(Error::WrongVariant {
            expected: "n-dimensional",
            got: Variant::Hardy1D,
        }),
    }
}
