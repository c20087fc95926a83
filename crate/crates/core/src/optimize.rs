//! Young-parameter objectives and their minimization.
//!
//! Each inequality's constant arises as the minimum over a free Young
//! parameter of a closed-form bound. The objectives are built here, minimized
//! numerically (Brent for one variable, multistart Nelder-Mead in log
//! coordinates for two) and compared against the printed minimizers.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::{InequalityCase, Variant};
use crate::constants::sobolev_sharp_constant;
use crate::error::{Error, Result};

/// Default absolute tolerance on the argmin.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Objective evaluations allowed per local minimization.
pub const EVALUATION_BUDGET: usize = 10_000;

/// Prefactor of the two-parameter Rellich bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RellichVariant {
    /// `M lambda^2 / 2`, the form obtained by collecting the Young terms.
    #[default]
    Squared,
    /// `M lambda / 2`, as printed.
    Literal,
}

type Custom = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Hardy { kappa: f64, p: f64, q: f64 },
    Hardy1D { p: f64, q: f64 },
    CknPlus1 { kappa: f64 },
    CknEqual { k_squared: f64, c: f64, a: f64 },
    Rellich { m: f64, variant: RellichVariant },
    Custom { arity: usize, f: Custom },
}

/// A closed-form bound as a function of one or two positive parameters.
///
/// `evaluate` returns `f64::INFINITY` exactly when the bound is vacuous, i.e.
/// its denominator is not positive, or when a parameter is not positive.
#[derive(Clone)]
pub struct Objective {
    kind: Kind,
    pub feasible_region: String,
    pub params: Option<InequalityCase>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("arity", &self.arity())
            .field("feasible_region", &self.feasible_region)
            .field("params", &self.params)
            .finish()
    }
}

impl Objective {
    /// Wraps an arbitrary function of one positive variable.
    pub fn univariate<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Objective {
            kind: Kind::Custom {
                arity: 1,
                f: Arc::new(move |x| f(x[0])),
            },
            feasible_region: "x > 0".into(),
            params: None,
        }
    }

    /// Wraps an arbitrary function of two positive variables.
    pub fn bivariate<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Objective {
            kind: Kind::Custom {
                arity: 2,
                f: Arc::new(move |x| f(x[0], x[1])),
            },
            feasible_region: "x > 0, y > 0".into(),
            params: None,
        }
    }

    pub fn arity(&self) -> usize {
        match &self.kind {
            Kind::Rellich { .. } => 2,
            Kind::Custom { arity, .. } => *arity,
            _ => 1,
        }
    }

    pub fn rellich_variant(&self) -> Option<RellichVariant> {
        match self.kind {
            Kind::Rellich { variant, .. } => Some(variant),
            _ => None,
        }
    }

    /// Evaluates at `x`, whose length must equal [`Objective::arity`].
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.arity(), "objective arity mismatch");
        if let Kind::Custom { f, .. } = &self.kind {
            return f(x);
        }
        if x.iter().any(|&v| !(v > 0.0)) {
            return f64::INFINITY;
        }
        match self.kind {
            Kind::Hardy { kappa, p, q } => {
                let lambda = x[0];
                let d = kappa - p * lambda.powf(q);
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                kappa / (lambda.powf(p) * d)
            }
            Kind::Hardy1D { p, q } => {
                let lambda = x[0];
                let d = (p - 1.0) * lambda.powf(p) * (1.0 - lambda.powf(q));
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                1.0 / d
            }
            Kind::CknPlus1 { kappa } => {
                let alpha2 = x[0] * x[0];
                let d = alpha2 * kappa - alpha2 * alpha2;
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                kappa / d
            }
            Kind::CknEqual { k_squared, c, a } => {
                let l2 = x[0] * x[0];
                let young = l2 * c + 1.0 / l2;
                if a >= 0.0 {
                    k_squared * (1.0 + a * a * c + a * young)
                } else {
                    k_squared * (1.0 + a * a * c - a * young)
                }
            }
            Kind::Rellich { m, variant } => {
                let (lambda, mu) = (x[0], x[1]);
                let mu2 = mu * mu;
                let d = 1.0 - m / (2.0 * lambda * lambda) - m / mu2 - mu2;
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                let num = match variant {
                    RellichVariant::Squared => m * lambda * lambda / 2.0,
                    RellichVariant::Literal => m * lambda / 2.0,
                };
                num / d
            }
            Kind::Custom { .. } => unreachable!(),
        }
    }

    fn eval1(&self, x: f64) -> f64 {
        self.evaluate(&[x])
    }
}

/// Objective for `case`; Rellich uses the [`RellichVariant::Squared`] form.
pub fn make_objective(case: &InequalityCase) -> Result<Objective> {
    make_objective_with(case, RellichVariant::default())
}

pub fn make_objective_with(case: &InequalityCase, variant: RellichVariant) -> Result<Objective> {
    let n = case.n() as f64;
    let p = case.p();
    let q = case.q();
    let (kind, region) = match case.variant() {
        Variant::HardySubcritical | Variant::HardySupercritical => {
            let kappa = q * (n - p).abs().powf(q);
            (
                Kind::Hardy { kappa, p, q },
                format!("0 < lambda < {}", (kappa / p).powf(1.0 / q)),
            )
        }
        Variant::Hardy1D => (Kind::Hardy1D { p, q }, "0 < lambda < 1".into()),
        Variant::CknEdgeBequalsAplus1 => {
            let d = n - 2.0 - 2.0 * case.a().expect("CKN case");
            let kappa = d * d;
            (Kind::CknPlus1 { kappa }, format!("0 < alpha < {}", kappa.sqrt()))
        }
        Variant::CknEdgeBequalsA => {
            let a = case.a().expect("CKN case");
            let d = n - 2.0 - 2.0 * a;
            let k = sobolev_sharp_constant(case.n(), 2.0)?;
            (
                Kind::CknEqual {
                    k_squared: k * k,
                    c: 4.0 / (d * d),
                    a,
                },
                "lambda > 0".into(),
            )
        }
        Variant::Rellich => {
            let m = 4.0 / ((n - 4.0) * (n - 4.0));
            (
                Kind::Rellich { m, variant },
                format!("lambda, mu > 0 with 1 - {m}/(2 lambda^2) - {m}/mu^2 - mu^2 > 0"),
            )
        }
        Variant::CknInterpolated => {
            return Err(Error::WrongVariant {
                expected: "non-interpolated",
                got: case.variant(),
            })
        }
    };
    Ok(Objective {
        kind,
        feasible_region: region,
        params: Some(*case),
    })
}

/// Finite-difference Hessian at the bivariate argmin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianSpectrum {
    pub entries: [[f64; 2]; 2],
    pub determinant: f64,
    /// Ascending.
    pub eigenvalues: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub argmin: Vec<f64>,
    pub min_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub closed_form_argmin: Option<Vec<f64>>,
    pub closed_form_value: Option<f64>,
    pub discrepancy: Option<String>,
    /// `f(x+h) - 2 f(x) + f(x-h)` at the scalar argmin, `h = 1e-3 x`.
    pub second_difference: Option<f64>,
    pub hessian: Option<HessianSpectrum>,
}

struct Counted<'a> {
    objective: &'a Objective,
    count: Cell<usize>,
}

impl Counted<'_> {
    fn f(&self, x: f64) -> f64 {
        self.count.set(self.count.get() + 1);
        self.objective.eval1(x)
    }
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;
const SCAN_RANGE: i32 = 40;

// Brent's parabolic/golden minimizer on [lo, hi] started from x0.
fn brent(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, x0: f64, tol: f64, budget: usize) -> Result<(f64, f64, usize)> {
    let rel = f64::EPSILON.sqrt();
    let (mut a, mut b) = (lo, hi);
    let mut x = x0;
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut evals = 1;
    let (mut d, mut e) = (0.0f64, 0.0f64);
    while evals < budget {
        let xm = 0.5 * (a + b);
        let tol1 = rel * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, fx, evals));
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.is_finite() && q.is_finite() && p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x)
            {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        evals += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::NonConvergence { evaluations: evals })
}

// Newton steps on 5-point derivative estimates; Brent alone stalls near
// sqrt(eps) relative accuracy in the argmin because f is flat there.
fn polish(f: &dyn Fn(f64) -> f64, x0: f64, f0: f64, lo: f64, hi: f64) -> (f64, f64, usize) {
    let (mut x, mut fx) = (x0, f0);
    let mut evals = 0;
    for _ in 0..6 {
        let h = 1e-3 * x.abs().max(1e-300);
        let fm2 = f(x - 2.0 * h);
        let fm1 = f(x - h);
        let fp1 = f(x + h);
        let fp2 = f(x + 2.0 * h);
        evals += 4;
        let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        let d2 = (-fm2 + 16.0 * fm1 - 30.0 * fx + 16.0 * fp1 - fp2) / (12.0 * h * h);
        if !(d1.is_finite() && d2.is_finite() && d2 > 0.0) {
            break;
        }
        let step = d1 / d2;
        let cand = x - step;
        if !(cand > lo && cand < hi) || step.abs() > 4.0 * h {
            break;
        }
        let fc = f(cand);
        evals += 1;
        if !(fc <= fx + 4.0 * f64::EPSILON * fx.abs()) {
            break;
        }
        x = cand;
        fx = fc;
        if step.abs() <= 1e-15 * x.abs() {
            break;
        }
    }
    (x, fx, evals)
}

/// Minimizes a univariate objective. Without a bracket, scans
/// `2^k` for `k` in `-40..=40` and brackets the smallest finite value.
pub fn minimize_scalar(objective: &Objective, bracket: Option<(f64, f64)>, tol: f64) -> Result<OptimizationResult> {
    if objective.arity() != 1 {
        return Err(Error::Config("minimize_scalar needs a univariate objective".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let counted = Counted {
        objective,
        count: Cell::new(0),
    };
    let f = |x: f64| counted.f(x);
    let (lo, hi, x0) = match bracket {
        Some((lo, hi)) => {
            if !(lo < hi) {
                return Err(Error::Config(format!("invalid bracket ({lo}, {hi})")));
            }
            let mid = 0.5 * (lo + hi);
            (lo, hi, mid)
        }
        None => {
            let mut best: Option<(i32, f64)> = None;
            for k in -SCAN_RANGE..=SCAN_RANGE {
                let fx = f(2f64.powi(k));
                if fx.is_finite() && best.is_none_or(|(_, fb)| fx < fb) {
                    best = Some((k, fx));
                }
            }
            let (k, _) = best.ok_or_else(|| {
                Error::NoFeasiblePoint(format!(
                    "no finite value on the scan 2^k, |k| <= {SCAN_RANGE}; feasible region {}",
                    objective.feasible_region
                ))
            })?;
            (2f64.powi(k - 1), 2f64.powi(k + 1), 2f64.powi(k))
        }
    };
    let (xb, fb, _) = brent(&f, lo, hi, x0, tol, EVALUATION_BUDGET)?;
    let (x, fx, _) = polish(&f, xb, fb, lo, hi);
    let h = 1e-3 * x;
    let second = f(x + h) - 2.0 * fx + f(x - h);
    Ok(OptimizationResult {
        argmin: vec![x],
        min_value: fx,
        evaluations: counted.count.get(),
        converged: true,
        closed_form_argmin: None,
        closed_form_value: None,
        discrepancy: None,
        second_difference: Some(second),
        hessian: None,
    })
}

const NM_STEP: f64 = 0.1;
const SEEDS: usize = 8;
const GRID_STEPS_PER_OCTAVE: i32 = 4;
const GRID_OCTAVES: i32 = 20;

// Nelder-Mead on g(u, v) = f(e^u, e^v).
fn nelder_mead(
    g: &dyn Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: f64,
    tol: f64,
    budget: usize,
) -> ([f64; 2], f64, usize, bool) {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&g);
    let mut evals = 3;
    loop {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| {
            values[i]
                .total_cmp(&values[j])
                .then(simplex[i][0].total_cmp(&simplex[j][0]))
        });
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let size = simplex[1..]
            .iter()
            .map(|x| (x[0] - simplex[0][0]).abs().max((x[1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        if size <= tol {
            return (simplex[0], values[0], evals, true);
        }
        if evals >= budget {
            return (simplex[0], values[0], evals, false);
        }
        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = g(xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = g(xe);
            evals += 1;
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
        } else {
            let (xc, fc) = if fr < values[2] {
                let xc = along(-0.5);
                (xc, g(xc))
            } else {
                let xc = along(0.5);
                (xc, g(xc))
            };
            evals += 1;
            if fc < values[2].min(fr) {
                simplex[2] = xc;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = g(simplex[i]);
                }
                evals += 2;
            }
        }
    }
}

fn hessian_spectrum(objective: &Objective, x: [f64; 2]) -> HessianSpectrum {
    let f = |a: f64, b: f64| objective.evaluate(&[a, b]);
    let (hx, hy) = (1e-4 * x[0], 1e-4 * x[1]);
    let f0 = f(x[0], x[1]);
    let fxx = (f(x[0] + hx, x[1]) - 2.0 * f0 + f(x[0] - hx, x[1])) / (hx * hx);
    let fyy = (f(x[0], x[1] + hy) - 2.0 * f0 + f(x[0], x[1] - hy)) / (hy * hy);
    let fxy = (f(x[0] + hx, x[1] + hy) - f(x[0] + hx, x[1] - hy) - f(x[0] - hx, x[1] + hy) + f(x[0] - hx, x[1] - hy))
        / (4.0 * hx * hy);
    let det = fxx * fyy - fxy * fxy;
    let half_trace = 0.5 * (fxx + fyy);
    let disc = (0.25 * (fxx - fyy) * (fxx - fyy) + fxy * fxy).sqrt();
    HessianSpectrum {
        entries: [[fxx, fxy], [fxy, fyy]],
        determinant: det,
        eigenvalues: [half_trace - disc, half_trace + disc],
    }
}

// Picks up to SEEDS grid points in ascending objective order, keeping them
// at least one octave apart.
fn scattered_seeds(objective: &Objective) -> Vec<[f64; 2]> {
    let lim = GRID_OCTAVES * GRID_STEPS_PER_OCTAVE;
    let step = std::f64::consts::LN_2 / GRID_STEPS_PER_OCTAVE as f64;
    let mut feasible = Vec::new();
    for i in -lim..=lim {
        for j in -lim..=lim {
            let u = [i as f64 * step, j as f64 * step];
            let v = objective.evaluate(&[u[0].exp(), u[1].exp()]);
            if v.is_finite() {
                feasible.push((v, i, j));
            }
        }
    }
    feasible.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut chosen: Vec<(i32, i32)> = Vec::new();
    for &(_, i, j) in &feasible {
        if chosen.len() == SEEDS {
            break;
        }
        if chosen
            .iter()
            .all(|&(ci, cj)| (ci - i).abs().max((cj - j).abs()) >= GRID_STEPS_PER_OCTAVE)
        {
            chosen.push((i, j));
        }
    }
    chosen
        .into_iter()
        .map(|(i, j)| [i as f64 * step, j as f64 * step])
        .collect()
}

/// Multistart Nelder-Mead over two positive variables, in log coordinates.
/// `init`, when feasible, is used in addition to the scattered grid seeds.
pub fn minimize_bivariate(objective: &Objective, init: Option<(f64, f64)>, tol: f64) -> Result<OptimizationResult> {
    if objective.arity() != 2 {
        return Err(Error::Config("minimize_bivariate needs a bivariate objective".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut seeds = Vec::new();
    if let Some((x, y)) = init {
        if x > 0.0 && y > 0.0 && objective.evaluate(&[x, y]).is_finite() {
            seeds.push([x.ln(), y.ln()]);
        }
    }
    let grid_evals = (2 * GRID_OCTAVES * GRID_STEPS_PER_OCTAVE + 1).pow(2) as usize;
    seeds.extend(scattered_seeds(objective));
    if seeds.is_empty() {
        return Err(Error::NoFeasiblePoint(format!(
            "no finite value on the log grid; feasible region {}",
            objective.feasible_region
        )));
    }
    let g = |u: [f64; 2]| objective.evaluate(&[u[0].exp(), u[1].exp()]);
    let runs: Vec<([f64; 2], f64, usize, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let (mut x, mut fx, mut evals, mut ok) = nelder_mead(&g, s, NM_STEP, tol, EVALUATION_BUDGET);
            // Restart from the converged point until it stops improving.
            for _ in 0..4 {
                let (x2, f2, e2, ok2) = nelder_mead(&g, x, NM_STEP * 0.1, tol, EVALUATION_BUDGET);
                evals += e2;
                let improved = f2 < fx;
                if f2 <= fx {
                    x = x2;
                    fx = f2;
                    ok = ok2;
                }
                if !improved {
                    break;
                }
            }
            (x, fx, evals, ok)
        })
        .collect();
    let evaluations = grid_evals + runs.iter().map(|r| r.2).sum::<usize>();
    let best = runs
        .iter()
        .filter(|r| r.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0[0].total_cmp(&b.0[0])))
        .ok_or_else(|| Error::NoFeasiblePoint("all restarts left the feasible region".into()))?;
    if !best.3 {
        return Err(Error::NonConvergence { evaluations });
    }
    let x = [best.0[0].exp(), best.0[1].exp()];
    Ok(OptimizationResult {
        argmin: x.to_vec(),
        min_value: objective.evaluate(&x),
        evaluations,
        converged: true,
        closed_form_argmin: None,
        closed_form_value: None,
        discrepancy: None,
        second_difference: None,
        hessian: Some(hessian_spectrum(objective, x)),
    })
}

/// Printed minimizer and minimum for the objective of `case`. The argmin is
/// `None` where no point is printed.
pub fn printed_closed_form(case: &InequalityCase) -> Result<(Option<Vec<f64>>, f64)> {
    let n = case.n() as f64;
    let p = case.p();
    let q = case.q();
    Ok(match case.variant() {
        Variant::HardySubcritical | Variant::HardySupercritical => {
            let kappa = q * (n - p).abs().powf(q);
            (Some(vec![(kappa / (p + q)).powf(1.0 / q)]), (p / (n - p).abs()).powf(p))
        }
        Variant::Hardy1D => (Some(vec![q.powf(-q)]), (p / (p - 1.0)).powf(p)),
        Variant::CknEdgeBequalsAplus1 => {
            let d = n - 2.0 - 2.0 * case.a().expect("CKN case");
            (Some(vec![(d * d / 2.0).sqrt()]), 4.0 / (d * d))
        }
        Variant::CknEdgeBequalsA => {
            let a = case.a().expect("CKN case");
            let d = n - 2.0 - 2.0 * a;
            let c = 4.0 / (d * d);
            let k = sobolev_sharp_constant(case.n(), 2.0)?;
            let value = if a >= 0.0 {
                k * k * (1.0 + a * c.sqrt()).powi(2)
            } else {
                k * k * (1.0 - a * c.sqrt()).powi(2)
            };
            (Some(vec![c.powf(-0.25)]), value)
        }
        Variant::Rellich => (None, 16.0 / (n * n * (n - 4.0) * (n - 4.0))),
        Variant::CknInterpolated => {
            return Err(Error::WrongVariant {
                expected: "non-interpolated",
                got: case.variant(),
            })
        }
    })
}

/// Exact minimizer `(lambda, mu)` and minimum of either Rellich variant,
/// obtained by optimizing `mu^2 = sqrt(M)` first. `None` when the feasible
/// region is empty (`2 sqrt(M) >= 1`, i.e. `n <= 8`).
pub fn rellich_exact_minimum(n: u32, variant: RellichVariant) -> Option<([f64; 2], f64)> {
    let nf = n as f64;
    let m = 4.0 / ((nf - 4.0) * (nf - 4.0));
    let c = 1.0 - 2.0 * m.sqrt();
    if !(n > 4 && c > 0.0) {
        return None;
    }
    let mu = m.sqrt().sqrt();
    Some(match variant {
        RellichVariant::Squared => ([(m / c).sqrt(), mu], m * m / (c * c)),
        RellichVariant::Literal => {
            let l2 = 1.5 * m / c;
            ([l2.sqrt(), mu], 0.5 * l2.powf(1.5))
        }
    })
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Minimizes the objective of `case` and compares with the printed closed
/// forms, filling `discrepancy` when they differ by more than `tol`
/// (relative).
pub fn crosscheck_closed_forms(case: &InequalityCase, tol: f64) -> Result<OptimizationResult> {
    crosscheck_closed_forms_with(case, RellichVariant::default(), tol)
}

pub fn crosscheck_closed_forms_with(
    case: &InequalityCase,
    variant: RellichVariant,
    tol: f64,
) -> Result<OptimizationResult> {
    let objective = make_objective_with(case, variant)?;
    let mut result = if objective.arity() == 1 {
        minimize_scalar(&objective, None, DEFAULT_TOL)?
    } else {
        minimize_bivariate(&objective, None, DEFAULT_TOL)?
    };
    let (argmin, value) = printed_closed_form(case)?;
    let mut notes = Vec::new();
    // With a = 0 the b = a edge objective is constant and has no argmin.
    let flat = case.variant() == Variant::CknEdgeBequalsA && case.a() == Some(0.0);
    if let (Some(printed), false) = (&argmin, flat) {
        for (x, y) in result.argmin.iter().zip(printed) {
            if rel_diff(*x, *y) > tol {
                notes.push(format!("numeric argmin {x:.17e} differs from printed {y:.17e}"));
            }
        }
    }
    if rel_diff(result.min_value, value) > tol {
        notes.push(format!(
            "numeric minimum {:.17e} differs from printed {value:.17e}",
            result.min_value
        ));
    }
    result.closed_form_argmin = argmin;
    result.closed_form_value = Some(value);
    result.discrepancy = if notes.is_empty() { None } else { Some(notes.join("; ")) };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hand_evaluations() {
        let h = make_objective(&InequalityCase::hardy_subcritical(3, 2.0).unwrap()).unwrap();
        assert_eq!(h.evaluate(&[1.0]), f64::INFINITY);
        assert!(rel(h.evaluate(&[0.5f64.sqrt()]), 4.0) < 1e-15);
        let l1 = make_objective(&InequalityCase::ckn_edge_plus1(3, 0.0).unwrap()).unwrap();
        assert!(rel(l1.evaluate(&[0.5f64.sqrt()]), 4.0) < 1e-15);
    }

    #[test]
    fn quadratic_with_bracket() {
        let obj = Objective::univariate(|x| (x - 2.0) * (x - 2.0));
        let r = minimize_scalar(&obj, Some((0.0, 5.0)), 1e-10).unwrap();
        assert!((r.argmin[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn hardy_and_edge_plus1_minimizers() {
        let r = minimize_scalar(
            &make_objective(&InequalityCase::hardy_subcritical(3, 2.0).unwrap()).unwrap(),
            None,
            DEFAULT_TOL,
        )
        .unwrap();
        assert!((r.argmin[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(rel(r.min_value, 4.0) < 1e-12);
        let r = minimize_scalar(
            &make_objective(&InequalityCase::ckn_edge_plus1(3, 0.0).unwrap()).unwrap(),
            None,
            DEFAULT_TOL,
        )
        .unwrap();
        assert!((r.argmin[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(rel(r.min_value, 4.0) < 1e-12);
    }

    #[test]
    fn hardy_grid_matches_closed_form() {
        for (n, p) in [
            (3, 1.5),
            (3, 2.0),
            (4, 3.0),
            (5, 2.5),
            (2, 3.0),
            (3, 5.0),
            (6, 1.2),
            (2, 6.0),
        ] {
            let case = if p < n as f64 {
                InequalityCase::hardy_subcritical(n, p).unwrap()
            } else {
                InequalityCase::hardy_supercritical(n, p).unwrap()
            };
            let r = crosscheck_closed_forms(&case, 1e-8).unwrap();
            assert!(r.discrepancy.is_none(), "n={n} p={p}: {:?}", r.discrepancy);
            assert!(r.second_difference.unwrap() > 0.0);
        }
    }

    #[test]
    fn edge_equal_both_signs() {
        for (n, a) in [(3, -0.5), (3, 0.25), (4, -1.0), (4, 0.6), (5, 1.2), (6, -2.0)] {
            let case = InequalityCase::ckn_edge_equal(n, a).unwrap();
            let r = crosscheck_closed_forms(&case, 1e-8).unwrap();
            assert!(r.discrepancy.is_none(), "n={n} a={a}: {:?}", r.discrepancy);
        }
        let r = crosscheck_closed_forms(&InequalityCase::ckn_edge_equal(3, -0.5).unwrap(), 1e-8).unwrap();
        assert!((r.argmin[0] - 1.0).abs() < 1e-8);
        let k = sobolev_sharp_constant(3, 2.0).unwrap();
        assert!(rel(r.min_value, 2.25 * k * k) < 1e-12);
    }

    #[test]
    fn hardy_1d_printed_argmin_is_flagged() {
        for p in [1.5, 2.0, 3.0, 5.0] {
            let case = InequalityCase::hardy_1d(p).unwrap();
            let q = case.q();
            let r = crosscheck_closed_forms(&case, 1e-8).unwrap();
            assert!(rel(r.argmin[0], q.powf(-1.0 / q)) < 1e-8, "p={p}: {}", r.argmin[0]);
            assert!(rel(r.min_value, (p / (p - 1.0)).powf(p)) < 1e-8);
            let msg = r.discrepancy.expect("printed argmin must be flagged");
            assert!(msg.contains("argmin") && !msg.contains("minimum"), "{msg}");
        }
        let obj = make_objective(&InequalityCase::hardy_1d(2.0).unwrap()).unwrap();
        assert!((obj.evaluate(&[0.25]) - 1.0 / (0.0625 * 0.9375)).abs() < 1e-12);
    }

    #[test]
    fn bowl() {
        let obj = Objective::bivariate(|x, y| (x - 1.0).powi(2) + (y - 3.0).powi(2));
        let r = minimize_bivariate(&obj, None, 1e-10).unwrap();
        assert!((r.argmin[0] - 1.0).abs() < 1e-8 && (r.argmin[1] - 3.0).abs() < 1e-8);
        let h = r.hessian.unwrap();
        assert!((h.determinant - 4.0).abs() < 1e-4);
    }

    // Dense grid over (lambda^2, mu^2), refined twice around the best cell.
    fn grid_oracle(obj: &Objective) -> f64 {
        let (mut lo, mut hi) = ([1e-3, 1e-3], [10.0, 1.0]);
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for _ in 0..4 {
            let k = 400;
            for i in 0..=k {
                for j in 0..=k {
                    let l2 = lo[0] + (hi[0] - lo[0]) * i as f64 / k as f64;
                    let m2 = lo[1] + (hi[1] - lo[1]) * j as f64 / k as f64;
                    let v = obj.evaluate(&[l2.sqrt(), m2.sqrt()]);
                    if v < best.0 {
                        best = (v, [l2, m2]);
                    }
                }
            }
            let w = [(hi[0] - lo[0]) / 40.0, (hi[1] - lo[1]) / 40.0];
            lo = [(best.1[0] - w[0]).max(1e-12), (best.1[1] - w[1]).max(1e-12)];
            hi = [best.1[0] + w[0], best.1[1] + w[1]];
        }
        best.0
    }

    #[test]
    fn rellich_thirteen() {
        let case = InequalityCase::rellich(13).unwrap();
        let obj = make_objective(&case).unwrap();
        let oracle = grid_oracle(&obj);
        assert!(rel(oracle, 16.0 / 2025.0) < 1e-6, "oracle {oracle}");
        let r = crosscheck_closed_forms(&case, 1e-6).unwrap();
        assert!(rel(r.min_value, 16.0 / 2025.0) < 1e-9);
        assert!(rel(r.argmin[0] * r.argmin[0], 4.0 / 45.0) < 1e-6);
        assert!(r.discrepancy.is_some());
        assert!(r.hessian.unwrap().eigenvalues[0] > 0.0);
        let lit = crosscheck_closed_forms_with(&case, RellichVariant::Literal, 1e-6).unwrap();
        let (_, exact) = rellich_exact_minimum(13, RellichVariant::Literal).unwrap();
        assert!(rel(lit.min_value, exact) < 1e-9);
        assert!(
            rel(
                grid_oracle(&make_objective_with(&case, RellichVariant::Literal).unwrap()),
                exact
            ) < 1e-6
        );
        assert!(lit.discrepancy.is_some());
    }

    #[test]
    fn rellich_small_dimensions_infeasible() {
        for n in 5..=8 {
            for v in [RellichVariant::Squared, RellichVariant::Literal] {
                let obj = make_objective_with(&InequalityCase::rellich(n).unwrap(), v).unwrap();
                assert!(matches!(
                    minimize_bivariate(&obj, None, 1e-10),
                    Err(Error::NoFeasiblePoint(_))
                ));
                assert!(rellich_exact_minimum(n, v).is_none());
            }
        }
    }

    #[test]
    fn interpolated_case_has_no_objective() {
        let case = InequalityCase::ckn_interpolated(3, 0.0, 0.5).unwrap();
        assert!(matches!(make_objective(&case), Err(Error::WrongVariant { .. })));
    }

    #[test]
    fn scan_reports_no_feasible_point() {
        let obj = Objective::univariate(|_| f64::INFINITY);
        assert!(matches!(
            minimize_scalar(&obj, None, 1e-10),
            Err(Error::NoFeasiblePoint(_))
        ));
    }

    proptest! {
        #[test]
        fn hardy_sentinel_iff_denominator_nonpositive(n in 2u32..8, p in 1.05f64..6.0, t in 0.5f64..1.5) {
            prop_assume!((p - n as f64).abs() > 1e-3);
            let case = if p < n as f64 {
                InequalityCase::hardy_subcritical(n, p).unwrap()
            } else {
                InequalityCase::hardy_supercritical(n, p).unwrap()
            };
            let q = case.q();
            let kappa = q * (n as f64 - p).abs().powf(q);
            let edge = (kappa / p).powf(1.0 / q);
            let lambda = edge * t;
            let d = kappa - p * lambda.powf(q);
            let v = make_objective(&case).unwrap().evaluate(&[lambda]);
            prop_assert_eq!(v == f64::INFINITY, d <= 0.0);
        }

        #[test]
        fn rellich_sentinel_iff_denominator_nonpositive(n in 5u32..20, l in 0.05f64..3.0, m in 0.05f64..1.5) {
            let obj = make_objective(&InequalityCase::rellich(n).unwrap()).unwrap();
            let mm = 4.0 / ((n as f64 - 4.0).powi(2));
            let d = 1.0 - mm / (2.0 * l * l) - mm / (m * m) - m * m;
            prop_assert_eq!(obj.evaluate(&[l, m]) == f64::INFINITY, d <= 0.0);
        }

        #[test]
        fn edge_plus1_grid(n in 3u32..9, frac in 0.0f64..0.9) {
            let top = (n as f64 - 2.0) / 2.0;
            let a = -2.0 + (top + 2.0) * frac;
            let case = InequalityCase::ckn_edge_plus1(n, a).unwrap();
            let r = crosscheck_closed_forms(&case, 1e-8).unwrap();
            prop_assert!(r.discrepancy.is_none(), "{:?}", r.discrepancy);
            prop_assert!(r.second_difference.unwrap() > 0.0);
        }
    }
}
