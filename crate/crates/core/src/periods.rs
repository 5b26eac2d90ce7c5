//! Floating-point check of the L² expansion on the Legendre family
//! y² = x(x−1)(x−λ), which acquires a node at λ = 0.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Arithmetic-geometric mean.
pub fn agm(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::validation("agm", format!("arguments must be positive and finite, got ({a}, {b})")));
    }
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        if (a - b).abs() < 1e-15 * a {
            return Ok(a);
        }
        (a, b) = ((a + b) / 2.0, (a * b).sqrt());
    }
    Ok(a)
}

/// Complete elliptic integral of the first kind, parameter m = k².
pub fn ellipk(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::validation("m", format!("parameter must lie in [0, 1), got {m}")));
    }
    Ok(std::f64::consts::PI / (2.0 * agm(1.0, (1.0 - m).sqrt())?))
}

/// ‖dx/y‖² = |Im(conj(π₁)π₂)| for real λ ∈ (0, 1/2). The lattice periods are
/// 4K(λ) and 4iK(1−λ).
pub fn legendre_norm(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(Error::validation("lambda", format!("must lie in (0, 1/2), got {lambda}")));
    }
    let p1 = 4.0 * ellipk(lambda)?;
    let p2 = 4.0 * ellipk(1.0 - lambda)?;
    Ok(p1 * p2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSample {
    pub t: f64,
    /// log of the squared norm.
    pub value: f64,
}

impl NormSample {
    pub fn new(t: f64, value: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::validation("t", format!("must lie in (0, 1), got {t}")));
        }
        if !value.is_finite() {
            return Err(Error::validation("value", "must be finite"));
        }
        Ok(NormSample { t, value })
    }
}

pub fn legendre_sample(t: f64) -> Result<NormSample> {
    NormSample::new(t, legendre_norm(t)?.ln())
}

/// `count` samples log-spaced over [t_min, t_max].
pub fn legendre_samples(t_min: f64, t_max: f64, count: usize) -> Result<Vec<NormSample>> {
    if count < 2 || !(t_min > 0.0 && t_min < t_max) {
        return Err(Error::validation("samples", "need count ≥ 2 and 0 < t_min < t_max"));
    }
    let (lo, hi) = (t_min.ln(), t_max.ln());
    (0..count)
        .map(|i| legendre_sample((lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub const_hat: f64,
    /// Root mean square of the residuals.
    pub residual: f64,
}

/// Least squares for value ≈ α·log t² + β·log log t⁻¹ + C.
pub fn fit_asymptotics(samples: &[NormSample]) -> Result<FitResult> {
    if samples.len() < 8 {
        return Err(Error::validation("samples", format!("need at least 8, got {}", samples.len())));
    }
    for s in samples {
        NormSample::new(s.t, s.value)?;
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.t), hi.max(s.t)));
    if (hi / lo).log10() < 3.0 - 1e-9 {
        return Err(Error::validation("samples", "t must span at least three decades"));
    }
    let m = samples.len();
    let design = DMatrix::from_fn(m, 3, |i, j| {
        let t = samples[i].t;
        match j {
            0 => 2.0 * t.ln(),
            1 => (-t.ln()).ln(),
            _ => 1.0,
        }
    });
    let rhs = DVector::from_iterator(m, samples.iter().map(|s| s.value));
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-12 * smax) {
        return Err(Error::Numeric("degenerate design matrix".into()));
    }
    let coef = svd.solve(&rhs, 1e-12 * smax).map_err(|e| Error::Numeric(e.to_string()))?;
    let resid = &design * &coef - rhs;
    let residual = (resid.norm_squared() / m as f64).sqrt();
    if !residual.is_finite() {
        return Err(Error::Numeric("non-finite residual".into()));
    }
    Ok(FitResult {
        alpha_hat: coef[0],
        beta_hat: coef[1],
        const_hat: coef[2],
        residual,
    })
}
