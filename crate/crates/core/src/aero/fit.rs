//! Linear least-squares identification of coefficient families from
//! `(alpha, C_D, C_L)` samples.

use super::{AeroError, Sample};
use std::f64::consts::FRAC_PI_2;

/// Condition number above which the normal equations are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Root-mean-square residuals of the drag and lift blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResiduals {
    pub cd_rms: f64,
    pub cl_rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sin2Fit {
    pub c0: f64,
    pub c1: f64,
    pub residuals: FitResiduals,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanFit {
    pub c0_bar: f64,
    pub c1_bar: f64,
    pub residuals: FitResiduals,
}

fn check_samples(samples: &[Sample]) -> Result<(), AeroError> {
    for s in samples {
        if !(s.alpha.is_finite() && s.cd.is_finite() && s.cl.is_finite() && s.weight.is_finite()) {
            return Err(AeroError::InvalidSamples("non-finite sample".into()));
        }
        if s.weight <= 0.0 {
            return Err(AeroError::InvalidSamples(format!(
                "weight must be positive, got {}",
                s.weight
            )));
        }
    }
    Ok(())
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), r| (s + r * r, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Fits `C_D = c0 + 2 c1 sin^2(alpha)` and `C_L = c1 sin(2 alpha)` jointly,
/// with `c1` shared between the two residual blocks.
pub fn fit_sin2_family(samples: &[Sample]) -> Result<Sin2Fit, AeroError> {
    check_samples(samples)?;
    let distinct = samples.iter().any(|s| s.alpha != samples[0].alpha);
    if samples.len() < 2 || !distinct {
        return Err(AeroError::InvalidSamples(
            "need at least two samples with distinct alpha".into(),
        ));
    }

    // normal equations [a b; b c] [c0 c1]^T = [p q]^T
    let (mut a, mut b, mut c, mut p, mut q) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in samples {
        let w = s.weight;
        let sin = s.alpha.sin();
        let d = 2.0 * sin * sin;
        let l = (2.0 * s.alpha).sin();
        a += w;
        b += w * d;
        c += w * (d * d + l * l);
        p += w * s.cd;
        q += w * (d * s.cd + l * s.cl);
    }
    let condition = symmetric_condition(a, b, c);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(AeroError::SingularFit { condition });
    }
    let det = a * c - b * b;
    let c0 = (c * p - b * q) / det;
    let c1 = (a * q - b * p) / det;

    let residuals = FitResiduals {
        cd_rms: rms(samples.iter().map(|s| {
            let sin = s.alpha.sin();
            s.cd - (c0 + 2.0 * c1 * sin * sin)
        })),
        cl_rms: rms(samples.iter().map(|s| s.cl - c1 * (2.0 * s.alpha).sin())),
    };
    Ok(Sin2Fit { c0, c1, residuals })
}

/// Fits `C_D = c0_bar` and `C_L = c1_bar tan(alpha)` on pre-stall samples.
pub fn fit_tan_family(samples: &[Sample], alpha_max: f64) -> Result<TanFit, AeroError> {
    check_samples(samples)?;
    if samples.is_empty() {
        return Err(AeroError::InvalidSamples("no samples".into()));
    }
    if !(alpha_max > 0.0 && alpha_max < FRAC_PI_2) {
        return Err(AeroError::InvalidSamples(format!(
            "alpha_max must lie in (0, pi/2), got {alpha_max}"
        )));
    }
    if let Some(s) = samples
        .iter()
        .find(|s| s.alpha >= alpha_max || s.alpha < 0.0)
    {
        return Err(AeroError::Domain {
            alpha: s.alpha,
            lo: 0.0,
            hi: alpha_max,
        });
    }

    let (mut w_sum, mut cd_sum, mut tt, mut lt) = (0.0, 0.0, 0.0, 0.0);
    for s in samples {
        let t = s.alpha.tan();
        w_sum += s.weight;
        cd_sum += s.weight * s.cd;
        tt += s.weight * t * t;
        lt += s.weight * t * s.cl;
    }
    if tt == 0.0 {
        return Err(AeroError::SingularFit {
            condition: f64::INFINITY,
        });
    }
    let c0_bar = cd_sum / w_sum;
    let c1_bar = lt / tt;
    let residuals = FitResiduals {
        cd_rms: rms(samples.iter().map(|s| s.cd - c0_bar)),
        cl_rms: rms(samples.iter().map(|s| s.cl - c1_bar * s.alpha.tan())),
    };
    Ok(TanFit {
        c0_bar,
        c1_bar,
        residuals,
    })
}

/// 2-norm condition number of the symmetric matrix `[a b; b c]`.
fn symmetric_condition(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let hi = (mean + radius).abs();
    let lo = (mean - radius).abs();
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
