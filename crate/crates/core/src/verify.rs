//! Inequality verification reports, near-extremal sweeps and the pointwise
//! Young and Hölder checks.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::{two_star, InequalityCase, Variant};
use crate::constants::{sharp_constant, SharpConstant};
use crate::error::{Error, Result};
use crate::quadrature::{monte_carlo_weighted, Estimate, McEstimate, McSpec, QuadratureSpec};
use crate::radial::{functional_sides, radial_moment, Family, RadialProfile, Side};

/// Ratios above `1 + VIOLATION_SLACK` are reported as violations.
pub const VIOLATION_SLACK: f64 = 1e-9;
/// Smallest `sup_ratio` accepted as numerical evidence of sharpness.
pub const SHARPNESS_THRESHOLD: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSideCheck {
    pub monte_carlo: McEstimate,
    pub quadrature: f64,
    /// `|mc - quadrature| / std_error`.
    pub z_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCrosscheck {
    /// Left side before any outer power.
    pub lhs: McSideCheck,
    pub rhs: McSideCheck,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: InequalityCase,
    pub profile: RadialProfile,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: SharpConstant,
    /// `lhs / (constant * rhs)`.
    pub ratio: f64,
    pub margin: f64,
    pub lhs_quadrature: Estimate,
    pub rhs_quadrature: Estimate,
    pub monte_carlo: Option<McCrosscheck>,
    pub seed: Option<u64>,
    /// Only filled when timing is requested, so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
    pub violation: bool,
}

impl VerificationReport {
    /// `Err(RatioExceedsOne)` when the ratio exceeds `1 + VIOLATION_SLACK`.
    pub fn check(&self) -> Result<()> {
        if self.violation {
            Err(Error::RatioExceedsOne { ratio: self.ratio })
        } else {
            Ok(())
        }
    }
}

fn mc_side(
    case: &InequalityCase,
    side: Side,
    profile: &RadialProfile,
    quad: f64,
    spec: &McSpec,
) -> Result<McSideCheck> {
    let mc = monte_carlo_weighted(case, side, profile, spec)?;
    let z_score = if mc.std_error > 0.0 {
        (mc.estimate - quad).abs() / mc.std_error
    } else if mc.estimate == quad {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McSideCheck {
        monte_carlo: mc,
        quadrature: quad,
        z_score,
    })
}

/// Evaluates both sides, the sharp constant and the ratio; attaches a Monte
/// Carlo crosscheck of each side when `mc` is given.
pub fn verify_case(
    case: &InequalityCase,
    profile: &RadialProfile,
    quad: &QuadratureSpec,
    mc: Option<&McSpec>,
) -> Result<VerificationReport> {
    let sides = functional_sides(case, profile, quad)?;
    let constant = sharp_constant(case)?;
    let ratio = sides.lhs / (constant.value * sides.rhs);
    if !ratio.is_finite() {
        return Err(Error::NonFinite { at: ratio });
    }
    let monte_carlo = match mc {
        Some(spec) => Some(McCrosscheck {
            lhs: mc_side(case, Side::Lhs, profile, sides.lhs_integral, spec)?,
            rhs: mc_side(case, Side::Rhs, profile, sides.rhs_integral, spec)?,
            seed: spec.seed,
        }),
        None => None,
    };
    Ok(VerificationReport {
        case: *case,
        profile: *profile,
        lhs: sides.lhs,
        rhs: sides.rhs,
        constant,
        ratio,
        margin: 1.0 - ratio,
        lhs_quadrature: sides.lhs_quadrature,
        rhs_quadrature: sides.rhs_quadrature,
        monte_carlo,
        seed: mc.map(|s| s.seed),
        wall_time_ms: None,
        violation: ratio > 1.0 + VIOLATION_SLACK,
    })
}

/// [`verify_case`] with the elapsed time recorded.
pub fn verify_case_timed(
    case: &InequalityCase,
    profile: &RadialProfile,
    quad: &QuadratureSpec,
    mc: Option<&McSpec>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = verify_case(case, profile, quad, mc)?;
    report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// One entry of a sweep schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum ScheduleEntry {
    NearExtremal { eps: f64, r_in: f64, r_out: f64 },
    Mollifier { radius: f64 },
}

impl ScheduleEntry {
    pub fn profile(&self, case: &InequalityCase) -> Result<RadialProfile> {
        match *self {
            ScheduleEntry::NearExtremal { eps, r_in, r_out } => {
                RadialProfile::near_extremal_for(case, eps, r_in, r_out)
            }
            ScheduleEntry::Mollifier { radius } => RadialProfile::mollifier(radius),
        }
    }

    /// Scalar used as the abscissa of plots (`eps` or `R`).
    pub fn parameter(&self) -> f64 {
        match *self {
            ScheduleEntry::NearExtremal { eps, .. } => eps,
            ScheduleEntry::Mollifier { radius } => radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub case: InequalityCase,
    pub schedule: Vec<ScheduleEntry>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub margins: Vec<f64>,
    pub sup_ratio: f64,
}

impl SweepSeries {
    pub fn strictly_increasing(&self) -> bool {
        self.ratios.windows(2).all(|w| w[1] > w[0])
    }
}

/// Evaluates the ratio for every schedule entry. Entries run in parallel and
/// are collected in schedule order.
pub fn sweep(case: &InequalityCase, schedule: &[ScheduleEntry], quad: &QuadratureSpec) -> Result<SweepSeries> {
    if schedule.is_empty() {
        return Err(Error::Config("empty sweep schedule".into()));
    }
    let reports: Vec<VerificationReport> = schedule
        .par_iter()
        .map(|entry| verify_case(case, &entry.profile(case)?, quad, None))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    Ok(SweepSeries {
        case: *case,
        schedule: schedule.to_vec(),
        lhs: reports.iter().map(|r| r.lhs).collect(),
        rhs: reports.iter().map(|r| r.rhs).collect(),
        margins: reports.iter().map(|r| r.margin).collect(),
        sup_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ratios,
    })
}

/// Fixed window `[1e-3, 1e3]` with `eps` halving from 0.4 to 0.05.
pub fn fixed_window_schedule() -> Vec<ScheduleEntry> {
    [0.4, 0.2, 0.1, 0.05]
        .into_iter()
        .map(|eps| ScheduleEntry::NearExtremal {
            eps,
            r_in: 1e-3,
            r_out: 1e3,
        })
        .collect()
}

/// `eps` shrinking and the window `[10^-d, 10^d]` widening together. The
/// ratio deficit behaves like `c1 eps / gamma^2 + c2 / (gamma^2 ln(r_out/r_in))`,
/// so the final entries need both a tiny `eps` and hundreds of decades.
pub fn canonical_schedule() -> Vec<ScheduleEntry> {
    CANONICAL_STEPS
        .iter()
        .map(|&(eps, decades)| ScheduleEntry::NearExtremal {
            eps,
            r_in: 10f64.powi(-decades),
            r_out: 10f64.powi(decades),
        })
        .collect()
}

const CANONICAL_STEPS: [(f64, i32); 7] = [
    (0.1, 3),
    (0.03, 10),
    (1e-2, 30),
    (3e-3, 60),
    (1e-3, 120),
    (1e-4, 200),
    (1e-5, 300),
];

/// Canonical profile for a case: the mollifier bump of radius 1, except
/// where the origin must be avoided.
pub fn canonical_profile(case: &InequalityCase) -> Result<RadialProfile> {
    if case.variant() == Variant::HardySupercritical {
        RadialProfile::near_extremal_for(case, 0.1, 1e-2, 1e2)
    } else {
        RadialProfile::mollifier(1.0)
    }
}

/// The verification battery: every variant, several parameter points, both
/// profile families.
pub fn battery() -> Result<Vec<(InequalityCase, RadialProfile)>> {
    let moll = RadialProfile::mollifier(1.0)?;
    let ne = |case: &InequalityCase| RadialProfile::near_extremal_for(case, 0.1, 1e-2, 1e2);
    let mut out = Vec::new();
    let mut both = |case: InequalityCase, with_mollifier: bool| -> Result<()> {
        if with_mollifier {
            out.push((case, moll));
        }
        out.push((case, ne(&case)?));
        Ok(())
    };
    both(InequalityCase::hardy_subcritical(3, 2.0)?, true)?;
    both(InequalityCase::hardy_subcritical(3, 1.5)?, true)?;
    both(InequalityCase::hardy_subcritical(5, 2.5)?, true)?;
    both(InequalityCase::hardy_supercritical(2, 3.0)?, false)?;
    both(InequalityCase::hardy_supercritical(3, 4.5)?, false)?;
    both(InequalityCase::hardy_1d(2.0)?, true)?;
    both(InequalityCase::hardy_1d(3.0)?, true)?;
    both(InequalityCase::ckn_edge_plus1(3, 0.0)?, true)?;
    both(InequalityCase::ckn_edge_plus1(3, -0.5)?, true)?;
    both(InequalityCase::ckn_edge_plus1(5, 0.5)?, true)?;
    both(InequalityCase::ckn_edge_equal(3, 0.0)?, true)?;
    both(InequalityCase::ckn_edge_equal(3, -0.5)?, true)?;
    both(InequalityCase::ckn_edge_equal(4, 0.3)?, true)?;
    both(InequalityCase::ckn_edge_equal(5, -1.0)?, true)?;
    both(InequalityCase::ckn_edge_equal(6, 1.0)?, true)?;
    both(InequalityCase::ckn_interpolated(3, 0.0, 0.5)?, true)?;
    both(InequalityCase::ckn_interpolated(4, 0.3, 0.8)?, true)?;
    both(InequalityCase::ckn_interpolated_theta(5, -0.5, 0.25)?, true)?;
    both(InequalityCase::rellich(5)?, true)?;
    both(InequalityCase::rellich(6)?, true)?;
    both(InequalityCase::rellich(9)?, true)?;
    Ok(out)
}

/// Runs [`verify_case`] over the battery, in order.
pub fn run_battery(quad: &QuadratureSpec) -> Result<Vec<VerificationReport>> {
    battery()?
        .par_iter()
        .map(|(case, profile)| verify_case(case, profile, quad, None))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub n: u32,
    pub a: f64,
    pub theta: f64,
    pub p: f64,
    pub b: f64,
    /// `int |u|^p / |x|^{bp}`.
    pub lhs: f64,
    /// `int |u|^2 / |x|^{2(a+1)}`.
    pub first_factor: f64,
    /// `int |u|^{2*} / |x|^{2* a}`.
    pub second_factor: f64,
    /// `first^{1-theta} second^theta`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Checks the Hölder split with exponents `1/(1-theta)` and `1/theta` that
/// interpolates the weighted `L^p` norm between the two edge norms.
pub fn holder_split_check(
    n: u32,
    a: f64,
    theta: f64,
    profile: &RadialProfile,
    quad: &QuadratureSpec,
) -> Result<HolderReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    let case = InequalityCase::ckn_interpolated_theta(n, a, theta)?;
    let p = case.p();
    let b = case.b().expect("CKN case");
    let s = two_star(n);
    let lhs = radial_moment(profile, n, p, b * p, quad)?.value;
    let first = radial_moment(profile, n, 2.0, 2.0 * (a + 1.0), quad)?.value;
    let second = radial_moment(profile, n, s, s * a, quad)?.value;
    let rhs = first.powf(1.0 - theta) * second.powf(theta);
    Ok(HolderReport {
        n,
        a,
        theta,
        p,
        b,
        lhs,
        first_factor: first,
        second_factor: second,
        rhs,
        ratio: lhs / rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungReport {
    pub p: f64,
    pub samples: usize,
    /// Smallest `lambda^{-p}|V|^p/p + lambda^q|W|^q/q - V.W`.
    pub min_slack: f64,
    pub max_slack: f64,
    pub violations: usize,
}

/// Checks `V.W <= lambda^{-p}|V|^p/p + lambda^q|W|^q/q` for every pair and
/// every `lambda`.
pub fn young_pointwise_check(p: f64, pairs: &[(Vec<f64>, Vec<f64>)], lambdas: &[f64]) -> Result<YoungReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("p must exceed 1, got {p}")));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::domain(format!("lambda must be positive, got {l}")));
    }
    let q = p / (p - 1.0);
    let mut report = YoungReport {
        p,
        samples: 0,
        min_slack: f64::INFINITY,
        max_slack: f64::NEG_INFINITY,
        violations: 0,
    };
    for (v, w) in pairs {
        if v.len() != w.len() {
            return Err(Error::domain("vector pair of unequal dimension"));
        }
        let dot: f64 = v.iter().zip(w).map(|(x, y)| x * y).sum();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for &l in lambdas {
            let bound = l.powf(-p) * nv.powf(p) / p + l.powf(q) * nw.powf(q) / q;
            let slack = bound - dot;
            report.samples += 1;
            report.min_slack = report.min_slack.min(slack);
            report.max_slack = report.max_slack.max(slack);
            if slack < -1e-12 * bound.max(dot.abs()) {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

/// `count` seeded pairs of standard normal vectors in `R^n`.
pub fn seeded_vector_pairs(n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(rng)).collect() };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

/// Plot-ready description of a profile family parameter set.
pub fn describe_profile(profile: &RadialProfile) -> String {
    match profile.family {
        Family::Mollifier { radius } => format!("mollifier(R={radius})"),
        Family::NearExtremal {
            eps,
            r_in,
            r_out,
            gamma,
        } => {
            format!("near-extremal(eps={eps}, r_in={r_in:e}, r_out={r_out:e}, gamma={gamma})")
        }
    }
}
