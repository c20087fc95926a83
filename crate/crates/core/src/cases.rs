//! Validated parameter records for every inequality variant.
//!
//! An [`InequalityCase`] can only be obtained through [`make_case`] (or
//! deserialization, which goes through the same checks), so every value in
//! circulation satisfies the hypotheses of its inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Hardy, `1 < p < n`.
    HardySubcritical,
    /// Hardy, `p > n > 1`, test functions supported away from the origin.
    HardySupercritical,
    /// One-dimensional Hardy for the primitive `eta(x) = int_0^x u`.
    Hardy1D,
    /// CKN with `b = a + 1` (so `p = 2`).
    CknEdgeBequalsAplus1,
    /// CKN with `b = a` (so `p = 2n/(n-2)`).
    CknEdgeBequalsA,
    /// CKN with `a <= b <= a + 1`, interpolating between the two edges.
    CknInterpolated,
    /// Rellich, `n > 4`, `p = 2`.
    Rellich,
}

impl Variant {
    pub fn is_hardy(self) -> bool {
        matches!(
            self,
            Variant::HardySubcritical | Variant::HardySupercritical | Variant::Hardy1D
        )
    }

    pub fn is_ckn(self) -> bool {
        matches!(
            self,
            Variant::CknEdgeBequalsAplus1 | Variant::CknEdgeBequalsA | Variant::CknInterpolated
        )
    }
}

/// A validated inequality variant with its parameters.
///
/// `a`, `b` are set for CKN variants only, `theta` for every CKN variant
/// (0 on the `b = a + 1` edge, 1 on the `b = a` edge).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCase")]
pub struct InequalityCase {
    variant: Variant,
    n: u32,
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

#[derive(Deserialize)]
struct RawCase {
    variant: Variant,
    n: u32,
    p: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    theta: Option<f64>,
}

impl TryFrom<RawCase> for InequalityCase {
    type Error = Error;

    fn try_from(raw: RawCase) -> Result<Self> {
        make_case(raw.variant, raw.n, raw.p, raw.a, raw.b, raw.theta)
    }
}

impl InequalityCase {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self) -> Option<f64> {
        self.a
    }

    pub fn b(&self) -> Option<f64> {
        self.b
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// Hölder conjugate of `p`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub(crate) fn ckn_a(&self) -> Result<f64> {
        self.a.ok_or(Error::WrongVariant {
            expected: "CKN",
            got: self.variant,
        })
    }

    pub fn hardy_subcritical(n: u32, p: f64) -> Result<Self> {
        make_case(Variant::HardySubcritical, n, Some(p), None, None, None)
    }

    pub fn hardy_supercritical(n: u32, p: f64) -> Result<Self> {
        make_case(Variant::HardySupercritical, n, Some(p), None, None, None)
    }

    pub fn hardy_1d(p: f64) -> Result<Self> {
        make_case(Variant::Hardy1D, 1, Some(p), None, None, None)
    }

    pub fn ckn_edge_plus1(n: u32, a: f64) -> Result<Self> {
        make_case(Variant::CknEdgeBequalsAplus1, n, None, Some(a), None, None)
    }

    pub fn ckn_edge_equal(n: u32, a: f64) -> Result<Self> {
        make_case(Variant::CknEdgeBequalsA, n, None, Some(a), None, None)
    }

    pub fn ckn_interpolated(n: u32, a: f64, b: f64) -> Result<Self> {
        make_case(Variant::CknInterpolated, n, None, Some(a), Some(b), None)
    }

    pub fn ckn_interpolated_theta(n: u32, a: f64, theta: f64) -> Result<Self> {
        make_case(Variant::CknInterpolated, n, None, Some(a), None, Some(theta))
    }

    pub fn rellich(n: u32) -> Result<Self> {
        make_case(Variant::Rellich, n, None, None, None, None)
    }
}

fn require_finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be a finite real, got {v}")))
    }
}

fn require(name: &str, v: Option<f64>, variant: Variant) -> Result<f64> {
    match v {
        Some(v) => require_finite(name, v),
        None => Err(Error::domain(format!("{variant:?} requires parameter {name}"))),
    }
}

/// Sobolev conjugate of 2 in dimension `n`.
pub fn two_star(n: u32) -> f64 {
    let n = n as f64;
    2.0 * n / (n - 2.0)
}

/// CKN exponent `p = 2n / (n - 2 + 2(b - a))`.
pub fn ckn_exponent(n: u32, a: f64, b: f64) -> f64 {
    let n = n as f64;
    2.0 * n / (n - 2.0 + 2.0 * (b - a))
}

fn check_ckn_dimension(n: u32, a: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("n must satisfy n >= 3, got n = {n}")));
    }
    let bound = (n as f64 - 2.0) / 2.0;
    if a >= bound {
        return Err(Error::domain(format!(
            "a must satisfy a < (n-2)/2 = {bound}, got a = {a}"
        )));
    }
    Ok(())
}

/// Builds a validated case. For CKN variants `p` is derived from `(n, a, b)`
/// and any supplied `p` must agree with it.
pub fn make_case(
    variant: Variant,
    n: u32,
    p: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    theta: Option<f64>,
) -> Result<InequalityCase> {
    let case = match variant {
        Variant::HardySubcritical => {
            let p = require("p", p, variant)?;
            if !(p > 1.0 && p < n as f64) {
                return Err(Error::domain(format!("p must satisfy 1 < p < n, got p = {p}, n = {n}")));
            }
            InequalityCase {
                variant,
                n,
                p,
                a: None,
                b: None,
                theta: None,
            }
        }
        Variant::HardySupercritical => {
            let p = require("p", p, variant)?;
            if n < 2 {
                return Err(Error::domain(format!("n must satisfy n > 1, got n = {n}")));
            }
            if p <= n as f64 {
                return Err(Error::domain(format!("p must satisfy p > n, got p = {p}, n = {n}")));
            }
            InequalityCase {
                variant,
                n,
                p,
                a: None,
                b: None,
                theta: None,
            }
        }
        Variant::Hardy1D => {
            let p = require("p", p, variant)?;
            if n != 1 {
                return Err(Error::domain(format!("Hardy1D fixes n = 1, got n = {n}")));
            }
            if p <= 1.0 {
                return Err(Error::domain(format!("p must satisfy p > 1, got p = {p}")));
            }
            InequalityCase {
                variant,
                n,
                p,
                a: None,
                b: None,
                theta: None,
            }
        }
        Variant::CknEdgeBequalsAplus1 | Variant::CknEdgeBequalsA | Variant::CknInterpolated => {
            let a = require("a", a, variant)?;
            check_ckn_dimension(n, a)?;
            let (b, theta) = match variant {
                Variant::CknEdgeBequalsAplus1 => {
                    if let Some(b) = b {
                        if b != a + 1.0 {
                            return Err(Error::domain(format!(
                                "CknEdgeBequalsAplus1 fixes b = a + 1, got b = {b}"
                            )));
                        }
                    }
                    (a + 1.0, 0.0)
                }
                Variant::CknEdgeBequalsA => {
                    if let Some(b) = b {
                        if b != a {
                            return Err(Error::domain(format!("CknEdgeBequalsA fixes b = a, got b = {b}")));
                        }
                    }
                    (a, 1.0)
                }
                _ => match (b, theta) {
                    (Some(b), None) => {
                        let b = require_finite("b", b)?;
                        (b, theta_from_b(n, a, b)?)
                    }
                    (None, Some(t)) => {
                        let t = require_finite("theta", t)?;
                        (b_from_theta(n, a, t)?, t)
                    }
                    (Some(b), Some(t)) => {
                        let b = require_finite("b", b)?;
                        let t = require_finite("theta", t)?;
                        let implied = theta_from_b(n, a, b)?;
                        if (implied - t).abs() > 1e-12 {
                            return Err(Error::domain(format!(
                                "theta = {t} inconsistent with b = {b} (implies theta = {implied})"
                            )));
                        }
                        (b, t)
                    }
                    (None, None) => return Err(Error::domain("CknInterpolated requires b or theta")),
                },
            };
            let derived = ckn_exponent(n, a, b);
            if let Some(p) = p {
                if (p - derived).abs() > 1e-12 * derived {
                    return Err(Error::domain(format!(
                        "p = {p} inconsistent with p = 2n/(n-2+2(b-a)) = {derived}"
                    )));
                }
            }
            InequalityCase {
                variant,
                n,
                p: derived,
                a: Some(a),
                b: Some(b),
                theta: Some(theta),
            }
        }
        Variant::Rellich => {
            if n <= 4 {
                return Err(Error::domain(format!("n > 4 required, got n = {n}")));
            }
            if let Some(p) = p {
                if p != 2.0 {
                    return Err(Error::domain(format!("Rellich fixes p = 2, got p = {p}")));
                }
            }
            InequalityCase {
                variant,
                n,
                p: 2.0,
                a: None,
                b: None,
                theta: None,
            }
        }
    };
    Ok(case)
}

/// The unique `theta` in [0, 1] with `b = a + 1 - n theta / (n - 2 + 2 theta)`.
pub fn theta_from_b(n: u32, a: f64, b: f64) -> Result<f64> {
    check_ckn_dimension(n, a)?;
    if !(b >= a && b <= a + 1.0) {
        return Err(Error::domain(format!(
            "b must satisfy a <= b <= a+1, got a = {a}, b = {b}"
        )));
    }
    let n = n as f64;
    let d = a + 1.0 - b;
    Ok((d * (n - 2.0) / (n - 2.0 * d)).clamp(0.0, 1.0))
}

/// Forward map `theta -> b`.
pub fn b_from_theta(n: u32, a: f64, theta: f64) -> Result<f64> {
    check_ckn_dimension(n, a)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain(format!("theta must lie in [0, 1], got {theta}")));
    }
    let n = n as f64;
    Ok(a + 1.0 - n * theta / (n - 2.0 + 2.0 * theta))
}

/// Exponents on the two edge constants in the interpolated CKN constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationExponents {
    /// Exponent on the `b = a` constant.
    pub alpha: f64,
    /// Exponent on the `b = a + 1` constant.
    pub beta: f64,
    pub theta: f64,
}

pub fn interpolation_exponents(case: &InequalityCase) -> Result<InterpolationExponents> {
    if case.variant != Variant::CknInterpolated {
        return Err(Error::WrongVariant {
            expected: "CknInterpolated",
            got: case.variant,
        });
    }
    let theta = case.theta.expect("CKN cases carry theta");
    let n = case.n as f64;
    let p = case.p;
    Ok(InterpolationExponents {
        alpha: 2.0 * n * theta / ((n - 2.0) * p),
        beta: 2.0 * (1.0 - theta) / p,
        theta,
    })
}
