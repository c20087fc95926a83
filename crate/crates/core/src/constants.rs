//! Gamma function and the closed-form sharp constants.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::cases::{interpolation_exponents, InequalityCase, Variant};
use crate::error::{Error, Result};

/// A constant together with the parameter point and the formula it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpConstant {
    pub value: f64,
    pub case: InequalityCase,
    pub provenance: String,
}

const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

// Lanczos-type approximation, accurate to a few ulp for x in [0.5, 2).
fn lanczos(x: f64) -> f64 {
    let s = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |acc, (k, d)| acc + d / (x + k as f64 - 1.0));
    s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_R) / E).powf(x - 0.5)
}

/// Gamma function for positive real arguments.
///
/// Arguments at or above 2 are reduced into [1, 2) by the recurrence so the
/// large power in the Lanczos form never amplifies rounding error.
pub fn gamma(s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("gamma requires s > 0, got {s}")));
    }
    if s < 0.5 {
        return Ok(lanczos(s + 1.0) / s);
    }
    if s < 2.0 {
        return Ok(lanczos(s));
    }
    if s > 171.0 {
        return Ok(f64::INFINITY);
    }
    let mut x = s;
    let mut prod = 1.0;
    while x >= 2.0 {
        x -= 1.0;
        prod *= x;
    }
    Ok(prod * lanczos(x))
}

/// Surface measure of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_area(n: u32) -> f64 {
    // omega_{n} = 2 pi / (n - 2) * omega_{n-2}, exact up to rounding
    let mut k = if n.is_multiple_of(2) { 2 } else { 1 };
    let mut area = if n.is_multiple_of(2) { 2.0 * PI } else { 2.0 };
    while k < n {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// The Sobolev constant `K(n, p)` evaluated exactly as printed (with the
/// `2^{1/n}` and `1/n` prefactors), for `1 <= p < n`.
pub fn sobolev_sharp_constant(n: u32, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p >= 1.0 && p < nf) {
        return Err(Error::domain(format!(
            "K(n,p) requires 1 <= p < n, got n = {n}, p = {p}"
        )));
    }
    let prefactor = 1.0 / (2f64.powf(1.0 / nf) * PI.sqrt() * nf);
    if p == 1.0 {
        // ((p-1)/(n-p))^0 = 1, and (p/(p-1))^{1/n} / Gamma(n(1-1/p))^{1/n}
        // tends to n^{1/n} as p -> 1.
        let gammas = gamma(nf / 2.0)? * nf;
        return Ok(prefactor * gammas.powf(1.0 / nf));
    }
    let ratio_factor = ((p - 1.0) / (nf - p)).powf(1.0 - 1.0 / p);
    let conj_factor = (p / (p - 1.0)).powf(1.0 / nf);
    let gammas = gamma(nf / 2.0)? * gamma(nf)? / (gamma(nf / p)? * gamma(nf * (1.0 - 1.0 / p))?);
    Ok(prefactor * ratio_factor * conj_factor * gammas.powf(1.0 / nf))
}

pub fn hardy_sharp_constant(case: &InequalityCase) -> Result<SharpConstant> {
    let n = case.n() as f64;
    let p = case.p();
    let (value, provenance) = match case.variant() {
        Variant::HardySubcritical => ((p / (n - p)).powf(p), "(p/(n-p))^p"),
        Variant::HardySupercritical => ((p / (p - n)).powf(p), "(p/(p-n))^p"),
        Variant::Hardy1D => ((p / (p - 1.0)).powf(p), "(p/(p-1))^p"),
        other => {
            return Err(Error::WrongVariant {
                expected: "Hardy",
                got: other,
            })
        }
    };
    Ok(SharpConstant {
        value,
        case: *case,
        provenance: format!("Hardy constant {provenance}"),
    })
}

fn edge_plus1_value(n: u32, a: f64) -> f64 {
    let d = n as f64 - 2.0 - 2.0 * a;
    4.0 / (d * d)
}

/// `C_{a+1} = 4 / (n - 2 - 2a)^2`, the constant of the `b = a + 1` edge.
pub fn ckn_edge_plus1_constant(n: u32, a: f64) -> Result<SharpConstant> {
    let case = InequalityCase::ckn_edge_plus1(n, a)?;
    Ok(SharpConstant {
        value: edge_plus1_value(n, a),
        case,
        provenance: "CKN b=a+1 constant 4/(n-2-2a)^2".into(),
    })
}

fn edge_equal_value(n: u32, a: f64) -> Result<f64> {
    let k = sobolev_sharp_constant(n, 2.0)?;
    let nf = n as f64;
    let d = nf - 2.0 - 2.0 * a;
    let ratio = if a >= 0.0 {
        (nf - 2.0) / d
    } else {
        (nf - 2.0 - 4.0 * a) / d
    };
    Ok(k * k * ratio * ratio)
}

/// `C_{a+} = K^2 ((n-2)/(n-2-2a))^2` for `a >= 0`,
/// `C_{a-} = K^2 ((n-2-4a)/(n-2-2a))^2` for `a <= 0`, with `K = K(n, 2)`.
pub fn ckn_edge_equal_constant(n: u32, a: f64) -> Result<SharpConstant> {
    let case = InequalityCase::ckn_edge_equal(n, a)?;
    let branch = if a >= 0.0 {
        "K(n,2)^2 ((n-2)/(n-2-2a))^2"
    } else {
        "K(n,2)^2 ((n-2-4a)/(n-2-2a))^2"
    };
    Ok(SharpConstant {
        value: edge_equal_value(n, a)?,
        case,
        provenance: format!("CKN b=a constant {branch}; alternative exponent 2-2/n on (1+a sqrt(C_(a+1))) not used"),
    })
}

/// `C_{a±}^alpha C_{a+1}^beta` with the interpolation exponents of the case.
pub fn ckn_interpolated_constant(case: &InequalityCase) -> Result<SharpConstant> {
    let exps = interpolation_exponents(case)?;
    let a = case.ckn_a()?;
    let n = case.n();
    let equal = edge_equal_value(n, a)?;
    let plus1 = edge_plus1_value(n, a);
    Ok(SharpConstant {
        value: equal.powf(exps.alpha) * plus1.powf(exps.beta),
        case: *case,
        provenance: format!("CKN interpolated C_(a±)^{:.6} C_(a+1)^{:.6}", exps.alpha, exps.beta),
    })
}

/// `(4 / (n (n - 4)))^2`.
pub fn rellich_sharp_constant(n: u32) -> Result<SharpConstant> {
    let case = InequalityCase::rellich(n)?;
    let nf = n as f64;
    // n^2 (n-4)^2 is an exact integer, so a single division rounds correctly
    let denom = nf * nf * (nf - 4.0) * (nf - 4.0);
    Ok(SharpConstant {
        value: 16.0 / denom,
        case,
        provenance: "Rellich constant (4/(n(n-4)))^2".into(),
    })
}

/// The constant bounding lhs by rhs for any case.
pub fn sharp_constant(case: &InequalityCase) -> Result<SharpConstant> {
    match case.variant() {
        Variant::HardySubcritical | Variant::HardySupercritical | Variant::Hardy1D => hardy_sharp_constant(case),
        Variant::CknEdgeBequalsAplus1 => ckn_edge_plus1_constant(case.n(), case.ckn_a()?),
        Variant::CknEdgeBequalsA => ckn_edge_equal_constant(case.n(), case.ckn_a()?),
        Variant::CknInterpolated => ckn_interpolated_constant(case),
        Variant::Rellich => rellich_sharp_constant(case.n()),
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 30-digit reference values.
    const GAMMA_TABLE: [(f64, f64); 12] = [
        (0.5, 1.772_453_850_905_516_027_3),
        (0.75, 1.225_416_702_465_177_645_1),
        (1.25, 0.906_402_477_055_477_077_98),
        (2.5, 1.329_340_388_179_137_020_5),
        (3.3, 2.683_437_381_955_768_793_6),
        (7.1, 868.956_858_800_640_406_29),
        (12.5, 136_843_365.465_565_857_26),
        (17.25, 42_249_866_656_927.035_516),
        (25.9, 1.122_210_001_699_563_772_4e25),
        (33.3, 7.487_577_596_522_706_608e35),
        (41.7, 1.095_174_647_768_803_174_2e49),
        (50.0, 6.082_818_640_342_675_608_7e62),
    ];

    #[test]
    fn gamma_reference_values() {
        for (s, expect) in GAMMA_TABLE {
            let g = gamma(s).unwrap();
            assert!(rel(g, expect) <= 1e-13, "Gamma({s}) = {g}, expected {expect}");
        }
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-15);
        assert!(rel(gamma(1.5).unwrap(), 0.886_226_925_452_758_013_6) < 1e-14);
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn gamma_recurrence_grid() {
        let mut s = 0.5;
        while s <= 30.0 {
            let g1 = gamma(s + 1.0).unwrap();
            let g0 = gamma(s).unwrap();
            assert!(((g1 - s * g0) / g1).abs() <= 1e-12, "s = {s}");
            s += 0.173;
        }
    }

    #[test]
    fn sphere_areas() {
        assert!(rel(unit_sphere_area(2), 2.0 * PI) < 1e-15);
        assert!(rel(unit_sphere_area(3), 4.0 * PI) < 1e-15);
        assert!(rel(unit_sphere_area(4), 2.0 * PI * PI) < 1e-15);
        assert!(rel(unit_sphere_area(1), 2.0) < 1e-15);
    }

    #[test]
    fn sobolev_constant_domain() {
        assert!(sobolev_sharp_constant(3, 3.0).is_err());
        assert!(sobolev_sharp_constant(3, 0.5).is_err());
        assert!(sobolev_sharp_constant(3, 2.0).unwrap() > 0.0);
    }

    #[test]
    fn sobolev_constant_continuous_at_p_one() {
        for n in 2..8u32 {
            let at_one = sobolev_sharp_constant(n, 1.0).unwrap();
            let near = sobolev_sharp_constant(n, 1.0 + 1e-9).unwrap();
            assert!(rel(near, at_one) < 1e-6, "n = {n}: {near} vs {at_one}");
        }
    }

    #[test]
    fn hardy_table() {
        let c = hardy_sharp_constant(&InequalityCase::hardy_subcritical(3, 2.0).unwrap()).unwrap();
        assert_eq!(c.value, 4.0);
        let c = hardy_sharp_constant(&InequalityCase::hardy_supercritical(2, 3.0).unwrap()).unwrap();
        assert_eq!(c.value, 27.0);
        let c = hardy_sharp_constant(&InequalityCase::hardy_1d(2.0).unwrap()).unwrap();
        assert_eq!(c.value, 4.0);
        assert!(hardy_sharp_constant(&InequalityCase::rellich(5).unwrap()).is_err());
    }

    #[test]
    fn ckn_edge_plus1_table() {
        assert_eq!(ckn_edge_plus1_constant(3, 0.0).unwrap().value, 4.0);
        assert!((ckn_edge_plus1_constant(5, 0.0).unwrap().value - 4.0 / 9.0).abs() < 1e-16);
        assert_eq!(ckn_edge_plus1_constant(3, -0.5).unwrap().value, 1.0);
        assert!(ckn_edge_plus1_constant(4, 1.0).is_err());
    }

    #[test]
    fn hardy_p2_is_ckn_with_a_zero() {
        for n in 3..10 {
            let h = hardy_sharp_constant(&InequalityCase::hardy_subcritical(n, 2.0).unwrap())
                .unwrap()
                .value;
            assert!(rel(h, ckn_edge_plus1_constant(n, 0.0).unwrap().value) < 1e-15);
        }
    }

    #[test]
    fn ckn_edge_equal_table() {
        let k = sobolev_sharp_constant(3, 2.0).unwrap();
        let k2 = k * k;
        assert!(rel(ckn_edge_equal_constant(3, 0.0).unwrap().value, k2) < 1e-15);
        assert!(rel(ckn_edge_equal_constant(3, -0.5).unwrap().value, 2.25 * k2) < 1e-14);
        assert!(rel(ckn_edge_equal_constant(3, 0.25).unwrap().value, 4.0 * k2) < 1e-14);
    }

    #[test]
    fn ckn_equal_branches_agree_at_zero() {
        for n in 3..12u32 {
            let nf = n as f64;
            let k = sobolev_sharp_constant(n, 2.0).unwrap();
            let d = nf - 2.0;
            let plus = k * k * (d / d).powi(2);
            let minus = k * k * (d / d).powi(2);
            assert!((plus - minus).abs() <= 1e-14 * plus);
            assert!(rel(edge_equal_value(n, 0.0).unwrap(), k * k) <= 1e-14);
            assert!(rel(edge_equal_value(n, -1e-300).unwrap(), edge_equal_value(n, 0.0).unwrap()) <= 1e-14);
        }
    }

    #[test]
    fn young_minimum_form_matches_ratio_form() {
        for n in 3..9u32 {
            let nf = n as f64;
            for i in 0..40 {
                let a = -4.0 + i as f64 * ((nf - 2.0) / 2.0 + 4.0) / 41.0;
                let c1 = edge_plus1_value(n, a);
                let k = sobolev_sharp_constant(n, 2.0).unwrap();
                let young = k * k * (1.0 + a.abs() * c1.sqrt()).powi(2);
                assert!(rel(young, edge_equal_value(n, a).unwrap()) <= 1e-12, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn interpolated_edges_and_midpoint() {
        let c = InequalityCase::ckn_interpolated(3, 0.0, 1.0).unwrap();
        assert!(rel(ckn_interpolated_constant(&c).unwrap().value, 4.0) < 1e-15);
        let c = InequalityCase::ckn_interpolated(3, 0.0, 0.0).unwrap();
        let eq = ckn_edge_equal_constant(3, 0.0).unwrap().value;
        assert!(rel(ckn_interpolated_constant(&c).unwrap().value, eq) < 1e-14);
        let c = InequalityCase::ckn_interpolated(3, 0.0, 0.5).unwrap();
        let expect = eq.sqrt() * 4f64.sqrt();
        assert!(rel(ckn_interpolated_constant(&c).unwrap().value, expect) < 1e-14);
    }

    #[test]
    fn rellich_table() {
        assert!((rellich_sharp_constant(5).unwrap().value - 0.64).abs() < 1e-15);
        assert_eq!(rellich_sharp_constant(8).unwrap().value, 0.015625);
        assert!((rellich_sharp_constant(6).unwrap().value - 1.0 / 9.0).abs() < 1e-16);
        assert!(rellich_sharp_constant(4).is_err());
    }

    #[test]
    fn constants_positive_and_continuous_in_a() {
        for n in 3..8u32 {
            let top = (n as f64 - 2.0) / 2.0;
            let mut prev: Option<(f64, f64)> = None;
            let mut a = -3.0;
            while a < top - 0.25 {
                let e = edge_equal_value(n, a).unwrap();
                let p1 = edge_plus1_value(n, a);
                assert!(e > 0.0 && e.is_finite() && p1 > 0.0 && p1.is_finite());
                if let Some((pe, pp)) = prev {
                    assert!(rel(e, pe) < 0.2 && rel(p1, pp) < 0.2, "jump at n={n} a={a}");
                }
                prev = Some((e, p1));
                a += 0.01;
            }
        }
    }
}
