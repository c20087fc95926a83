//! Radial vector fields whose divergence is the negative singular weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// `x / ((p - n) |x|^p)`, divergence `-|x|^{-p}`.
    HardyV,
    /// `x / ((2b - n) |x|^{2b})`, divergence `-|x|^{-2b}`.
    CknW,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialVectorField {
    pub kind: FieldKind,
    pub n: u32,
    /// `p` for [`FieldKind::HardyV`], `b` for [`FieldKind::CknW`].
    pub exponent: f64,
}

impl RadialVectorField {
    pub fn hardy(n: u32, p: f64) -> Result<Self> {
        if n == 0 || !p.is_finite() || p == n as f64 {
            return Err(Error::domain(format!(
                "HardyV needs n >= 1 and p != n, got n = {n}, p = {p}"
            )));
        }
        Ok(RadialVectorField {
            kind: FieldKind::HardyV,
            n,
            exponent: p,
        })
    }

    pub fn ckn(n: u32, b: f64) -> Result<Self> {
        if n == 0 || !b.is_finite() || 2.0 * b == n as f64 {
            return Err(Error::domain(format!(
                "CknW needs n >= 1 and 2b != n, got n = {n}, b = {b}"
            )));
        }
        Ok(RadialVectorField {
            kind: FieldKind::CknW,
            n,
            exponent: b,
        })
    }

    /// Power `s` of the weight `|x|^{-s}` equal to minus the divergence.
    pub fn weight_power(&self) -> f64 {
        match self.kind {
            FieldKind::HardyV => self.exponent,
            FieldKind::CknW => 2.0 * self.exponent,
        }
    }

    fn coefficient(&self) -> f64 {
        let s = self.weight_power();
        1.0 / (s - self.n as f64)
    }

    /// Closed-form divergence `-|x|^{-s}`.
    pub fn exact_divergence(&self, x: &[f64]) -> Result<f64> {
        let r = checked_norm(self, x)?;
        Ok(-r.powf(-self.weight_power()))
    }
}

fn checked_norm(field: &RadialVectorField, x: &[f64]) -> Result<f64> {
    if x.len() != field.n as usize {
        return Err(Error::domain(format!(
            "expected a point in dimension {}, got {}",
            field.n,
            x.len()
        )));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::domain("field is singular at the origin"));
    }
    Ok(r)
}

pub fn field_eval(field: &RadialVectorField, x: &[f64]) -> Result<Vec<f64>> {
    let r = checked_norm(field, x)?;
    let scale = field.coefficient() * r.powf(-field.weight_power());
    Ok(x.iter().map(|v| scale * v).collect())
}

/// Central-difference divergence; `h` defaults to `1e-5 max(1, |x|)`.
pub fn divergence_fd(field: &RadialVectorField, x: &[f64], h: Option<f64>) -> Result<f64> {
    let r = checked_norm(field, x)?;
    let h = h.unwrap_or(1e-5 * r.max(1.0));
    if !(h > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    let mut y = x.to_vec();
    let mut div = 0.0;
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let plus = field_eval(field, &y)?[i];
        y[i] = x[i] - h;
        let minus = field_eval(field, &y)?[i];
        y[i] = x[i];
        div += (plus - minus) / (2.0 * h);
    }
    Ok(div)
}

/// `n`-dimensional points with uniformly random direction and norm
/// log-uniform in `[r_min, r_max]`, reproducible from `seed`.
pub fn seeded_points(n: u32, count: usize, r_min: f64, r_max: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (r_min.ln(), r_max.ln());
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = (lo + (hi - lo) * rng.random::<f64>()).exp();
            x.iter_mut().for_each(|v| *v *= r / norm);
            x
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub field: RadialVectorField,
    pub points: usize,
    pub seed: u64,
    /// Largest `|div_fd + |x|^{-s}| / (1 + |x|^{-s})`.
    pub max_error: f64,
}

/// Checks the divergence identity at `count` seeded points with norms in
/// `[0.1, 10]`.
pub fn divergence_check(field: &RadialVectorField, count: usize, seed: u64) -> Result<DivergenceReport> {
    let mut max_error = 0.0f64;
    for x in seeded_points(field.n, count, 0.1, 10.0, seed) {
        let fd = divergence_fd(field, &x, None)?;
        let exact = field.exact_divergence(&x)?;
        max_error = max_error.max((fd - exact).abs() / (1.0 + exact.abs()));
    }
    Ok(DivergenceReport {
        field: *field,
        points: count,
        seed,
        max_error,
    })
}

/// Observed order `log2(e(h) / e(h/2))` of the central difference at `x`.
pub fn convergence_order(field: &RadialVectorField, x: &[f64], h: f64) -> Result<f64> {
    let exact = field.exact_divergence(x)?;
    let e1 = (divergence_fd(field, x, Some(h))? - exact).abs();
    let e2 = (divergence_fd(field, x, Some(0.5 * h))? - exact).abs();
    Ok((e1 / e2).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn printed_values() {
        let v = RadialVectorField::hardy(3, 2.0).unwrap();
        assert_eq!(field_eval(&v, &[1.0, 0.0, 0.0]).unwrap(), vec![-1.0, 0.0, 0.0]);
        let w = RadialVectorField::ckn(3, 1.0).unwrap();
        assert_eq!(field_eval(&w, &[0.0, 2.0, 0.0]).unwrap(), vec![0.0, -0.5, 0.0]);
        assert!((divergence_fd(&v, &[1.0, 0.0, 0.0], None).unwrap() + 1.0).abs() < 1e-6);
        assert!((divergence_fd(&w, &[0.0, 2.0, 0.0], None).unwrap() + 0.25).abs() < 1e-6);
    }

    #[test]
    fn four_dimensional_sample() {
        let v = RadialVectorField::hardy(4, 3.0).unwrap();
        for x in seeded_points(4, 10, 2.0, 2.0, 7) {
            assert!((divergence_fd(&v, &x, None).unwrap() + 0.125).abs() < 1e-6);
        }
    }

    #[test]
    fn output_is_parallel_to_input() {
        let v = RadialVectorField::hardy(5, 1.7).unwrap();
        let x = [0.3, -1.2, 0.4, 2.0, -0.1];
        let f = field_eval(&v, &x).unwrap();
        let ratio = f[0] / x[0];
        for (fi, xi) in f.iter().zip(&x) {
            assert!((fi / xi - ratio).abs() < 1e-14 * ratio.abs());
        }
    }

    #[test]
    fn domain_errors() {
        assert!(RadialVectorField::hardy(3, 3.0).is_err());
        assert!(RadialVectorField::ckn(4, 2.0).is_err());
        let v = RadialVectorField::hardy(3, 2.0).unwrap();
        assert!(field_eval(&v, &[0.0; 3]).is_err());
        assert!(field_eval(&v, &[1.0; 2]).is_err());
        assert!(divergence_fd(&v, &[1e-6, 0.0, 0.0], Some(1e-6)).is_err());
    }

    #[test]
    fn seeded_divergence_grid() {
        for n in 2..=6u32 {
            for s in [0.5, 1.5, 2.0, 3.5] {
                if s != n as f64 {
                    let r = divergence_check(&RadialVectorField::hardy(n, s).unwrap(), 200, 11).unwrap();
                    assert!(r.max_error <= 1e-5, "HardyV n={n} p={s}: {}", r.max_error);
                }
                if 2.0 * s != n as f64 {
                    let r = divergence_check(&RadialVectorField::ckn(n, s).unwrap(), 200, 12).unwrap();
                    assert!(r.max_error <= 1e-5, "CknW n={n} b={s}: {}", r.max_error);
                }
            }
        }
    }

    #[test]
    fn second_order_convergence() {
        let v = RadialVectorField::hardy(3, 2.5).unwrap();
        let order = convergence_order(&v, &[0.7, -0.2, 0.4], 1e-2).unwrap();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
        let w = RadialVectorField::ckn(5, 0.8).unwrap();
        let order = convergence_order(&w, &[0.3, 0.3, -0.5, 0.2, 0.1], 1e-2).unwrap();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    proptest! {
        #[test]
        fn homogeneous(n in 2u32..7, s in 0.2f64..4.0, t in 0.1f64..10.0, seed in 0u64..1000) {
            prop_assume!((s - n as f64).abs() > 1e-3 && (2.0 * s - n as f64).abs() > 1e-3);
            let x = &seeded_points(n, 1, 0.5, 2.0, seed)[0];
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            for (field, degree) in [
                (RadialVectorField::hardy(n, s).unwrap(), 1.0 - s),
                (RadialVectorField::ckn(n, s).unwrap(), 1.0 - 2.0 * s),
            ] {
                let fx = field_eval(&field, x).unwrap();
                let ftx = field_eval(&field, &tx).unwrap();
                let scale = t.powf(degree);
                for (a, b) in ftx.iter().zip(&fx) {
                    prop_assert!((a - scale * b).abs() <= 1e-12 * (scale * b).abs().max(1e-300));
                }
            }
        }
    }
}
