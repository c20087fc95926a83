//! Radial test functions and the one-dimensional reduction of each side.
//!
//! For `u(x) = g(|x|)` every integral in scope reduces to
//! `omega_{n-1} * int_0^inf F(g, g', g'', r) r^{n-1} dr`. Profiles supported
//! away from the origin are integrated in `t = ln r`, which keeps power-law
//! integrands well conditioned over windows spanning hundreds of decades.
//! Integrands are assembled as `(|h| r^{k/p})^p` rather than `|h|^p r^k` so
//! intermediate powers stay representable.

use serde::{Deserialize, Serialize};

use crate::cases::{InequalityCase, Variant};
use crate::constants::unit_sphere_area;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate, integrate_with_breaks, Estimate, QuadratureSpec};

/// Value and first two derivatives of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        g: 0.0,
        dg: 0.0,
        d2g: 0.0,
    };

    fn scaled(self, c: f64) -> Jet {
        Jet {
            g: c * self.g,
            dg: c * self.dg,
            d2g: c * self.d2g,
        }
    }
}

/// A compactly supported radial function with closed-form derivatives.
pub trait RadialFunction {
    fn jet(&self, r: f64) -> Jet;
    /// Closed interval outside of which the function vanishes identically.
    fn support(&self) -> (f64, f64);
}

/// Which side of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    /// `exp(-1/(1-(r/R)^2))` on `r < R`.
    Mollifier { radius: f64 },
    /// `phi(r) r^{-gamma+eps}`, `phi` a quintic-smoothstep cutoff equal to 1
    /// on `[r_in, r_out]` and 0 outside `[r_in/2, 2 r_out]`.
    NearExtremal {
        eps: f64,
        r_in: f64,
        r_out: f64,
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub family: Family,
    /// Overall multiplier `c` in `c * g`.
    pub amplitude: f64,
}

fn smoothstep(t: f64) -> (f64, f64, f64) {
    let t2 = t * t;
    let s = t2 * t * (10.0 - 15.0 * t + 6.0 * t2);
    let ds = 30.0 * t2 * (t - 1.0) * (t - 1.0);
    let d2s = 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
    (s, ds, d2s)
}

impl RadialProfile {
    pub fn mollifier(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!(
                "mollifier radius must be positive, got {radius}"
            )));
        }
        Ok(RadialProfile {
            family: Family::Mollifier { radius },
            amplitude: 1.0,
        })
    }

    pub fn near_extremal(eps: f64, r_in: f64, r_out: f64, gamma: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
            return Err(Error::domain(format!(
                "need 0 < r_in < r_out, got r_in = {r_in}, r_out = {r_out}"
            )));
        }
        if !gamma.is_finite() {
            return Err(Error::domain("gamma must be finite"));
        }
        Ok(RadialProfile {
            family: Family::NearExtremal {
                eps,
                r_in,
                r_out,
                gamma,
            },
            amplitude: 1.0,
        })
    }

    /// Near-extremal profile with the decay exponent of `case`.
    pub fn near_extremal_for(case: &InequalityCase, eps: f64, r_in: f64, r_out: f64) -> Result<Self> {
        Self::near_extremal(eps, r_in, r_out, extremal_exponent(case))
    }

    pub fn scaled(self, c: f64) -> Self {
        RadialProfile {
            amplitude: self.amplitude * c,
            ..self
        }
    }

    pub fn vanishes_near_origin(&self) -> bool {
        self.support().0 > 0.0
    }

    fn unit_jet(&self, r: f64) -> Jet {
        match self.family {
            Family::Mollifier { radius } => {
                let s = r / radius;
                if s >= 1.0 {
                    return Jet::ZERO;
                }
                let w = 1.0 - s * s;
                let g = (-1.0 / w).exp();
                if g == 0.0 {
                    return Jet::ZERO;
                }
                let h = -2.0 * s / (radius * w * w);
                let dh = -2.0 / (radius * radius) * (1.0 / (w * w) + 4.0 * s * s / (w * w * w));
                Jet {
                    g,
                    dg: g * h,
                    d2g: g * (h * h + dh),
                }
            }
            Family::NearExtremal {
                eps,
                r_in,
                r_out,
                gamma,
            } => {
                let lo = 0.5 * r_in;
                let hi = 2.0 * r_out;
                if r <= lo || r >= hi {
                    return Jet::ZERO;
                }
                let (phi, dphi, d2phi) = if r < r_in {
                    let width = r_in - lo;
                    let (s, ds, d2s) = smoothstep((r - lo) / width);
                    (s, ds / width, d2s / (width * width))
                } else if r <= r_out {
                    (1.0, 0.0, 0.0)
                } else {
                    let width = hi - r_out;
                    let (s, ds, d2s) = smoothstep((hi - r) / width);
                    (s, -ds / width, d2s / (width * width))
                };
                let beta = eps - gamma;
                let pw = r.powf(beta);
                let pw1 = beta * pw / r;
                let pw2 = (beta - 1.0) * pw1 / r;
                Jet {
                    g: phi * pw,
                    dg: dphi * pw + phi * pw1,
                    d2g: d2phi * pw + 2.0 * dphi * pw1 + phi * pw2,
                }
            }
        }
    }
}

impl RadialProfile {
    /// `(H, s)` with `g = H.g r^s`, `g' = H.dg r^{s-1}`, `g'' = H.d2g r^{s-2}`.
    /// `H` stays O(1) across the support, so weighted integrands can be
    /// assembled over hundreds of decades without overflow.
    pub fn scaled_jet(&self, r: f64) -> (Jet, f64) {
        match self.family {
            Family::Mollifier { .. } => {
                let j = self.jet(r);
                (
                    Jet {
                        g: j.g,
                        dg: j.dg * r,
                        d2g: j.d2g * r * r,
                    },
                    0.0,
                )
            }
            Family::NearExtremal {
                eps,
                r_in,
                r_out,
                gamma,
            } => {
                let beta = eps - gamma;
                let lo = 0.5 * r_in;
                let hi = 2.0 * r_out;
                if r <= lo || r >= hi {
                    return (Jet::ZERO, beta);
                }
                // phi and its derivatives times r and r^2
                let (phi, rphi1, r2phi2) = if r < r_in {
                    let width = r_in - lo;
                    let (s, ds, d2s) = smoothstep((r - lo) / width);
                    let u = r / width;
                    (s, ds * u, d2s * u * u)
                } else if r <= r_out {
                    (1.0, 0.0, 0.0)
                } else {
                    let width = hi - r_out;
                    let (s, ds, d2s) = smoothstep((hi - r) / width);
                    let u = r / width;
                    (s, -ds * u, d2s * u * u)
                };
                let h = Jet {
                    g: phi,
                    dg: rphi1 + beta * phi,
                    d2g: r2phi2 + 2.0 * beta * rphi1 + beta * (beta - 1.0) * phi,
                };
                (h.scaled(self.amplitude), beta)
            }
        }
    }
}

impl RadialFunction for RadialProfile {
    fn jet(&self, r: f64) -> Jet {
        self.unit_jet(r).scaled(self.amplitude)
    }

    fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Mollifier { radius } => (0.0, radius),
            Family::NearExtremal { r_in, r_out, .. } => (0.5 * r_in, 2.0 * r_out),
        }
    }
}

/// `(g, g', g'')` at `r`; identically zero outside the support.
pub fn profile_eval<P: RadialFunction>(profile: &P, r: f64) -> Jet {
    profile.jet(r)
}

/// Power-law rate `gamma` of the (non-attained) extremal `r^{-gamma}` for
/// the case. For the one-dimensional Hardy case this is the rate of `u`,
/// not of its primitive.
pub fn extremal_exponent(case: &InequalityCase) -> f64 {
    let n = case.n() as f64;
    let p = case.p();
    match case.variant() {
        Variant::HardySubcritical | Variant::HardySupercritical => (n - p) / p,
        Variant::Hardy1D => 1.0 / p,
        Variant::CknEdgeBequalsAplus1 | Variant::CknEdgeBequalsA | Variant::CknInterpolated => {
            (n - 2.0 - 2.0 * case.a().expect("CKN case")) / 2.0
        }
        Variant::Rellich => (n - 4.0) / 2.0,
    }
}

/// Radial Laplacian `g'' + (n-1) g'/r`, with the limit `n g''(0)` at the origin.
pub fn radial_laplacian<P: RadialFunction>(profile: &P, r: f64, n: u32) -> f64 {
    let jet = profile.jet(r);
    if r == 0.0 {
        return n as f64 * jet.d2g;
    }
    jet.d2g + (n as f64 - 1.0) * jet.dg / r
}

/// Both sides of an inequality for one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSides {
    pub lhs: f64,
    pub rhs: f64,
    /// Left side before any outer power (equal to `lhs` except for CKN).
    pub lhs_integral: f64,
    pub rhs_integral: f64,
    pub lhs_quadrature: Estimate,
    pub rhs_quadrature: Estimate,
}

const LOG_PANEL: f64 = 8.0;

// Integrates `f(r)` over the support of `profile`. `origin_power` is the
// leading exponent of `f` at r = 0 (ignored when the support excludes it).
fn integrate_radial<F: Fn(f64) -> f64>(
    f: F,
    profile: &RadialProfile,
    origin_power: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    match profile.family {
        Family::Mollifier { radius } => {
            if origin_power <= -1.0 {
                return Err(Error::Integrability(format!(
                    "integrand behaves like r^{origin_power} at the origin; a profile supported away from 0 is required"
                )));
            }
            let spec = spec.with_singular_origin(spec.singular_origin || origin_power < 0.0);
            integrate(f, 0.0, radius, &spec)
        }
        Family::NearExtremal { r_in, r_out, .. } => {
            let t_lo = (0.5 * r_in).ln();
            let t_in = r_in.ln();
            let t_out = r_out.ln();
            let t_hi = (2.0 * r_out).ln();
            let mut breaks = vec![t_lo, t_in];
            let panels = ((t_out - t_in) / LOG_PANEL).ceil().max(1.0) as usize;
            for k in 1..panels {
                breaks.push(t_in + (t_out - t_in) * k as f64 / panels as f64);
            }
            breaks.extend([t_out, t_hi]);
            integrate_with_breaks(
                |t| {
                    let r = t.exp();
                    f(r) * r
                },
                &breaks,
                spec,
            )
        }
    }
}

// (|h| r^e)^p; callers fold every power of r into e.
fn scaled_power(h: f64, r: f64, e: f64, p: f64) -> f64 {
    let base = h.abs() * r.powf(e);
    if base == 0.0 {
        0.0
    } else {
        base.powf(p)
    }
}

// |g|^p r^k
fn value_term(profile: &RadialProfile, r: f64, k: f64, p: f64) -> f64 {
    let (h, s) = profile.scaled_jet(r);
    scaled_power(h.g, r, s + k / p, p)
}

/// Reduces both sides of the case's inequality to radial integrals and
/// evaluates them.
///
/// * Hardy: `omega int g^p r^{n-1-p}` and `omega int |g'|^p r^{n-1}`
/// * CKN: `(omega int g^p r^{n-1-bp})^{2/p}` and `omega int g'^2 r^{n-1-2a}`
/// * Rellich: `omega int g^2 r^{n-5}` and `omega int (g'' + (n-1)g'/r)^2 r^{n-1}`
/// * Hardy1D: `int (eta/x)^p` and `int g^p` with `eta(x) = int_0^x g`
pub fn functional_sides(
    case: &InequalityCase,
    profile: &RadialProfile,
    spec: &QuadratureSpec,
) -> Result<FunctionalSides> {
    if case.variant() == Variant::HardySupercritical && !profile.vanishes_near_origin() {
        return Err(Error::Integrability(
            "supercritical Hardy needs a profile supported away from the origin".into(),
        ));
    }
    if profile.amplitude == 0.0 {
        let zero = Estimate {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
            evaluations: 0,
        };
        return Ok(FunctionalSides {
            lhs: 0.0,
            rhs: 0.0,
            lhs_integral: 0.0,
            rhs_integral: 0.0,
            lhs_quadrature: zero,
            rhs_quadrature: zero,
        });
    }
    let n = case.n();
    let nf = n as f64;
    let p = case.p();
    let omega = unit_sphere_area(n);

    let (lhs_q, rhs_q, outer_power) = match case.variant() {
        Variant::HardySubcritical | Variant::HardySupercritical => {
            let k = nf - 1.0 - p;
            let lhs = integrate_radial(|r| value_term(profile, r, k, p), profile, k, spec)?;
            let rhs = integrate_radial(
                |r| {
                    let (h, s) = profile.scaled_jet(r);
                    scaled_power(h.dg, r, s - 1.0 + (nf - 1.0) / p, p)
                },
                profile,
                nf - 1.0 + p,
                spec,
            )?;
            (lhs, rhs, 1.0)
        }
        Variant::CknEdgeBequalsAplus1 | Variant::CknEdgeBequalsA | Variant::CknInterpolated => {
            let a = case.a().expect("CKN case");
            let b = case.b().expect("CKN case");
            let k = nf - 1.0 - b * p;
            let lhs = integrate_radial(|r| value_term(profile, r, k, p), profile, k, spec)?;
            let kr = nf - 1.0 - 2.0 * a;
            let rhs = integrate_radial(
                |r| {
                    let (h, s) = profile.scaled_jet(r);
                    scaled_power(h.dg, r, s - 1.0 + kr / 2.0, 2.0)
                },
                profile,
                kr + 2.0,
                spec,
            )?;
            (lhs, rhs, 2.0 / p)
        }
        Variant::Rellich => {
            let k = nf - 5.0;
            let lhs = integrate_radial(|r| value_term(profile, r, k, 2.0), profile, k, spec)?;
            let rhs = integrate_radial(
                |r| {
                    // r^2 times the Laplacian is H'' + (n-1) H' in scaled form
                    let (h, s) = profile.scaled_jet(r);
                    scaled_power(h.d2g + (nf - 1.0) * h.dg, r, s - 2.0 + (nf - 1.0) / 2.0, 2.0)
                },
                profile,
                nf - 1.0,
                spec,
            )?;
            (lhs, rhs, 1.0)
        }
        Variant::Hardy1D => return hardy_1d_sides(case, profile, spec),
    };
    let lhs_integral = omega * lhs_q.value;
    let rhs_integral = omega * rhs_q.value;
    Ok(FunctionalSides {
        lhs: lhs_integral.powf(outer_power),
        rhs: rhs_integral,
        lhs_integral,
        rhs_integral,
        lhs_quadrature: lhs_q,
        rhs_quadrature: rhs_q,
    })
}

/// `omega_{n-1} int |g|^power r^{n-1-weight} dr`, the integral of
/// `|u|^power / |x|^weight` over `R^n`.
pub fn radial_moment(
    profile: &RadialProfile,
    n: u32,
    power: f64,
    weight: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let k = n as f64 - 1.0 - weight;
    let est = integrate_radial(|r| value_term(profile, r, k, power), profile, k, spec)?;
    let omega = unit_sphere_area(n);
    Ok(Estimate {
        value: omega * est.value,
        error: omega * est.error,
        ..est
    })
}

const ETA_NODES: usize = 10;
const ETA_MIN_PANELS: usize = 16;
const ETA_MAX_PANELS: usize = 1 << 15;

// One-dimensional Hardy: eta is accumulated panel by panel on the same mesh
// that carries the outer rule, and the mesh is doubled until the left side
// settles to `rel_tol`. Beyond the support eta is constant, so the tail
// int_hi^inf (eta/x)^p dx = eta^p hi^{1-p}/(p-1) is added in closed form.
fn hardy_1d_sides(case: &InequalityCase, profile: &RadialProfile, spec: &QuadratureSpec) -> Result<FunctionalSides> {
    let p = case.p();
    if profile.amplitude < 0.0 {
        return Err(Error::domain("Hardy1D requires a nonnegative profile"));
    }
    let (lo, hi) = profile.support();
    let log_mesh = lo > 0.0;
    // Mesh variable s: x = s (linear) or x = e^s (logarithmic).
    let (s_lo, s_hi) = if log_mesh { (lo.ln(), hi.ln()) } else { (lo, hi) };
    let to_x = |s: f64| if log_mesh { s.exp() } else { s };
    let jac = |s: f64| if log_mesh { s.exp() } else { 1.0 };
    let (gl_x, gl_w) = gauss_legendre(ETA_NODES);

    let rhs = integrate_radial(|r| profile.jet(r).g.powf(p), profile, 0.0, spec)?;

    let lhs_on_mesh = |panels: usize| -> (f64, usize) {
        let width = (s_hi - s_lo) / panels as f64;
        let mut eta = 0.0;
        let mut total = 0.0;
        let mut evals = 0;
        for i in 0..panels {
            let a = s_lo + width * i as f64;
            for (xj, wj) in gl_x.iter().zip(&gl_w) {
                let half = 0.5 * width * (xj + 1.0);
                let sj = a + half;
                // eta at the node: eta(a) + int_a^{s_j} g(x(s)) x'(s) ds
                let partial: f64 = gl_x
                    .iter()
                    .zip(&gl_w)
                    .map(|(xk, wk)| {
                        let s = a + 0.5 * half * (xk + 1.0);
                        wk * profile.jet(to_x(s)).g * jac(s)
                    })
                    .sum::<f64>()
                    * 0.5
                    * half;
                evals += ETA_NODES;
                let x = to_x(sj);
                total += wj * 0.5 * width * ((eta + partial) / x).powf(p) * jac(sj);
            }
            eta += gl_x
                .iter()
                .zip(&gl_w)
                .map(|(xk, wk)| {
                    let s = a + 0.5 * width * (xk + 1.0);
                    wk * profile.jet(to_x(s)).g * jac(s)
                })
                .sum::<f64>()
                * 0.5
                * width;
            evals += ETA_NODES;
        }
        total += eta.powf(p) * hi.powf(1.0 - p) / (p - 1.0);
        (total, evals)
    };

    let mut panels = ETA_MIN_PANELS;
    let (mut prev, mut evaluations) = lhs_on_mesh(panels);
    loop {
        panels *= 2;
        let (next, ev) = lhs_on_mesh(panels);
        evaluations += ev;
        let change = (next - prev).abs();
        if change <= (spec.rel_tol * next.abs()).max(spec.abs_tol) {
            let lhs_q = Estimate {
                value: next,
                error: change,
                subdivisions: panels,
                evaluations,
            };
            return Ok(FunctionalSides {
                lhs: next,
                rhs: rhs.value,
                lhs_integral: next,
                rhs_integral: rhs.value,
                lhs_quadrature: lhs_q,
                rhs_quadrature: rhs,
            });
        }
        if panels >= ETA_MAX_PANELS {
            return Err(Error::ToleranceNotMet {
                value: next,
                error: change,
                subdivisions: panels,
            });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Polynomial;

    impl RadialFunction for Polynomial {
        fn jet(&self, r: f64) -> Jet {
            Jet {
                g: r * r,
                dg: 2.0 * r,
                d2g: 2.0,
            }
        }
        fn support(&self) -> (f64, f64) {
            (0.0, f64::INFINITY)
        }
    }

    fn fd_jet<P: RadialFunction>(p: &P, r: f64) -> (f64, f64) {
        let h = 1e-3 * r;
        let g = |k: f64| p.jet(r + k * h).g;
        let d1 = (-g(2.0) + 8.0 * g(1.0) - 8.0 * g(-1.0) + g(-2.0)) / (12.0 * h);
        let d2 = (-g(2.0) + 16.0 * g(1.0) - 30.0 * g(0.0) + 16.0 * g(-1.0) - g(-2.0)) / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn mollifier_at_origin_and_outside() {
        let m = RadialProfile::mollifier(1.0).unwrap();
        let j = profile_eval(&m, 0.0);
        let e = (-1.0f64).exp();
        assert!((j.g - e).abs() < 1e-16);
        assert_eq!(j.dg, 0.0);
        assert!((j.d2g + 2.0 * e).abs() < 1e-15);
        assert_eq!(profile_eval(&m, 1.5), Jet::ZERO);
        assert_eq!(profile_eval(&m, 1.0), Jet::ZERO);
    }

    #[test]
    fn near_extremal_on_plateau() {
        let ne = RadialProfile::near_extremal(0.1, 0.1, 10.0, 0.5).unwrap();
        let j = profile_eval(&ne, 1.0);
        assert!((j.g - 1.0).abs() < 1e-15);
        assert!((j.dg + 0.4).abs() < 1e-15);
        assert!((j.d2g - 0.56).abs() < 1e-15);
        assert_eq!(profile_eval(&ne, 0.04), Jet::ZERO);
        assert_eq!(profile_eval(&ne, 25.0), Jet::ZERO);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let profiles = [
            RadialProfile::mollifier(1.0).unwrap(),
            RadialProfile::mollifier(2.5).unwrap().scaled(-3.0),
            RadialProfile::near_extremal(0.1, 0.1, 10.0, 0.5).unwrap(),
            RadialProfile::near_extremal(0.05, 0.5, 2.0, 1.5).unwrap(),
        ];
        let mut state = 12345u64;
        for prof in &profiles {
            let (lo, hi) = prof.support();
            for _ in 0..50 {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let u = (state >> 11) as f64 / (1u64 << 53) as f64;
                let r = lo + (hi - lo) * (0.02 + 0.9 * u);
                let j = prof.jet(r);
                let (d1, d2) = fd_jet(prof, r);
                let scale = j.g.abs() + j.dg.abs() * r + j.d2g.abs() * r * r;
                assert!(
                    (d1 - j.dg).abs() * r <= 1e-6 * scale + 1e-12,
                    "g' at r={r}: {d1} vs {}",
                    j.dg
                );
                assert!(
                    (d2 - j.d2g).abs() * r * r <= 1e-4 * scale + 1e-9,
                    "g'' at r={r}: {d2} vs {}",
                    j.d2g
                );
            }
        }
    }

    #[test]
    fn scaled_jet_agrees_with_jet() {
        let profiles = [
            RadialProfile::mollifier(1.3).unwrap().scaled(2.0),
            RadialProfile::near_extremal(0.2, 0.1, 10.0, 1.5).unwrap().scaled(-0.5),
        ];
        for prof in &profiles {
            for r in [0.06, 0.08, 0.3, 1.0, 5.0, 12.0, 19.0] {
                let j = prof.jet(r);
                let (h, s) = prof.scaled_jet(r);
                let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * (a.abs() + b.abs()) + 1e-300;
                assert!(close(h.g * r.powf(s), j.g), "g at {r}");
                assert!(close(h.dg * r.powf(s - 1.0), j.dg), "g' at {r}");
                assert!(close(h.d2g * r.powf(s - 2.0), j.d2g), "g'' at {r}");
            }
        }
    }

    #[test]
    fn laplacian_of_r_squared() {
        assert!((radial_laplacian(&Polynomial, 1.0, 3) - 6.0).abs() < 1e-15);
        assert!((radial_laplacian(&Polynomial, 0.0, 4) - 8.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_matches_five_point_stencil() {
        let m = RadialProfile::mollifier(1.0).unwrap();
        let h = 1e-3;
        let r = 0.5;
        let g = |r: f64| m.jet(r).g;
        let d2 = (-g(r + 2.0 * h) + 16.0 * g(r + h) - 30.0 * g(r) + 16.0 * g(r - h) - g(r - 2.0 * h)) / (12.0 * h * h);
        let d1 = (-g(r + 2.0 * h) + 8.0 * g(r + h) - 8.0 * g(r - h) + g(r - 2.0 * h)) / (12.0 * h);
        let fd = d2 + 2.0 * d1 / r;
        assert!((radial_laplacian(&m, r, 3) - fd).abs() < 1e-6);
        assert_eq!(radial_laplacian(&m, 3.0, 3), 0.0);
    }

    #[test]
    fn hardy_mollifier_sides() {
        let case = InequalityCase::hardy_subcritical(3, 2.0).unwrap();
        let m = RadialProfile::mollifier(1.0).unwrap();
        let s = functional_sides(&case, &m, &QuadratureSpec::default()).unwrap();
        assert!(s.lhs > 0.0 && s.rhs > 0.0);
        assert!(s.lhs / s.rhs < 4.0);
    }

    #[test]
    fn zero_profile_gives_zero_sides() {
        let case = InequalityCase::rellich(5).unwrap();
        let m = RadialProfile::mollifier(1.0).unwrap().scaled(0.0);
        let s = functional_sides(&case, &m, &QuadratureSpec::default()).unwrap();
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
    }

    #[test]
    fn rellich_near_extremal_below_constant() {
        let case = InequalityCase::rellich(5).unwrap();
        let ne = RadialProfile::near_extremal_for(&case, 0.1, 0.01, 100.0).unwrap();
        let s = functional_sides(&case, &ne, &QuadratureSpec::default()).unwrap();
        assert!(s.lhs.is_finite() && s.rhs.is_finite());
        assert!(s.lhs <= 0.64 * s.rhs);
    }

    #[test]
    fn supercritical_needs_support_away_from_origin() {
        let case = InequalityCase::hardy_supercritical(2, 3.0).unwrap();
        let m = RadialProfile::mollifier(1.0).unwrap();
        assert!(matches!(
            functional_sides(&case, &m, &QuadratureSpec::default()),
            Err(Error::Integrability(_))
        ));
    }

    #[test]
    fn hardy_1d_rejects_negative_profile() {
        let case = InequalityCase::hardy_1d(2.0).unwrap();
        let m = RadialProfile::mollifier(1.0).unwrap().scaled(-1.0);
        assert!(functional_sides(&case, &m, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn hardy_1d_indicator_like_profile() {
        // For a mollifier, eta/x -> g(0) as x -> 0 and the tail is closed-form;
        // check against a brute-force nested integration.
        let case = InequalityCase::hardy_1d(2.0).unwrap();
        let m = RadialProfile::mollifier(1.0).unwrap();
        let spec = QuadratureSpec::default();
        let s = functional_sides(&case, &m, &spec).unwrap();
        let eta = |x: f64| integrate(|t| m.jet(t).g, 0.0, x, &spec).unwrap().value;
        let inner = integrate(
            |x| (eta(x) / x).powi(2),
            0.0,
            1.0,
            &QuadratureSpec { rel_tol: 1e-10, ..spec },
        )
        .unwrap()
        .value;
        let total = eta(1.0);
        let brute = inner + total * total;
        assert!((s.lhs - brute).abs() < 1e-8 * brute, "{} vs {brute}", s.lhs);
        assert!(s.lhs < 4.0 * s.rhs);
    }

    #[test]
    fn mollifier_sides_scale_and_dilate() {
        let spec = QuadratureSpec::default();
        let case = InequalityCase::hardy_subcritical(4, 2.5).unwrap();
        let base = functional_sides(&case, &RadialProfile::mollifier(1.0).unwrap(), &spec).unwrap();
        let c = 1.7;
        let scaled = functional_sides(&case, &RadialProfile::mollifier(1.0).unwrap().scaled(c), &spec).unwrap();
        assert!((scaled.lhs / base.lhs - c.powf(2.5)).abs() < 1e-9 * c.powf(2.5));
        assert!(((scaled.lhs / scaled.rhs) - (base.lhs / base.rhs)).abs() < 1e-10 * base.lhs / base.rhs);
        for t in [0.5, 2.0] {
            let d = functional_sides(&case, &RadialProfile::mollifier(t).unwrap(), &spec).unwrap();
            let factor = t.powf(4.0 - 2.5);
            assert!((d.lhs / base.lhs - factor).abs() < 1e-8 * factor);
            assert!((d.rhs / base.rhs - factor).abs() < 1e-8 * factor);
        }
    }
}
