//! Adaptive Gauss–Kronrod quadrature.
//!
//! Used as an independent oracle for closed-form masses and as the fallback
//! box mass for user densities without one. Not on any sampling hot path.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

// Kronrod 15-point abscissae (non-negative half) and weights; the embedded
// Gauss 7-point rule uses the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Stopping rule for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tolerance: f64,
    pub rel_tolerance: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tolerance: 1e-10,
            rel_tolerance: 1e-12,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_tolerance(abs_tolerance: f64) -> Self {
        QuadConfig {
            abs_tolerance,
            ..Default::default()
        }
    }
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Integrates `f` over `[a, b]`; either limit may be infinite.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    config: &QuadConfig,
) -> Result<Estimate> {
    integrate_dyn(&mut f, a, b, config)
}

fn integrate_dyn(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    config: &QuadConfig,
) -> Result<Estimate> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidArgument("integration limit is NaN"));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if a > b {
        let e = integrate_dyn(f, b, a, config)?;
        return Ok(Estimate {
            value: -e.value,
            error: e.error,
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&mut |x| f(x), a, b, config),
        // x = a + (1 - v) / v, v in (0, 1]
        (true, false) => adaptive(
            &mut |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let x = a + (1.0 - v) / v;
                f(x) / (v * v)
            },
            0.0,
            1.0,
            config,
        ),
        // x = b - (1 - v) / v
        (false, true) => adaptive(
            &mut |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let x = b - (1.0 - v) / v;
                f(x) / (v * v)
            },
            0.0,
            1.0,
            config,
        ),
        (false, false) => {
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, config)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, config)?;
            Ok(Estimate {
                value: left.value + right.value,
                error: left.error + right.error,
            })
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn adaptive(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    config: &QuadConfig,
) -> Result<Estimate> {
    let (value, error) = gk15(f, a, b);
    let mut pieces = vec![Piece { a, b, value, error }];
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        let target = config.abs_tolerance.max(config.rel_tolerance * total.abs());
        if err <= target {
            return Ok(Estimate {
                value: total,
                error: err,
            });
        }
        if pieces.len() >= config.max_intervals {
            return Err(Error::Accuracy {
                estimate: total,
                error_estimate: err,
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval collapsed to adjacent floats
            return Err(Error::Accuracy {
                estimate: total,
                error_estimate: err,
            });
        }
        let (lv, le) = gk15(f, p.a, mid);
        let (rv, re) = gk15(f, mid, p.b);
        pieces.push(Piece {
            a: p.a,
            b: mid,
            value: lv,
            error: le,
        });
        pieces.push(Piece {
            a: mid,
            b: p.b,
            value: rv,
            error: re,
        });
    }
}

/// Integrates `f` over the box `∏ [lower_j, upper_j]` by nested adaptive
/// quadrature. Inner integrals run at a tenth of the outer tolerance.
pub fn integrate_box(
    f: &dyn Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    config: &QuadConfig,
) -> Result<Estimate> {
    if lower.len() != upper.len() {
        return Err(Error::DimensionMismatch {
            expected: lower.len(),
            found: upper.len(),
        });
    }
    if lower.is_empty() {
        return Err(Error::InvalidArgument("box needs at least one dimension"));
    }
    nested(f, lower, upper, &mut Vec::with_capacity(lower.len()), config)
}

fn nested(
    f: &dyn Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    prefix: &mut Vec<f64>,
    config: &QuadConfig,
) -> Result<Estimate> {
    let j = prefix.len();
    if j + 1 == lower.len() {
        let mut x = prefix.clone();
        x.push(0.0);
        return integrate(
            |v| {
                x[j] = v;
                f(&x)
            },
            lower[j],
            upper[j],
            config,
        );
    }
    let inner = QuadConfig {
        abs_tolerance: config.abs_tolerance * 0.1,
        rel_tolerance: config.rel_tolerance * 0.1,
        max_intervals: config.max_intervals,
    };
    let mut failure: Option<Error> = None;
    let mut x = prefix.clone();
    let outer = integrate(
        |v| {
            if failure.is_some() {
                return 0.0;
            }
            x.push(v);
            let r = nested(f, lower, upper, &mut x, &inner);
            x.pop();
            match r {
                Ok(e) => e.value,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        lower[j],
        upper[j],
        config,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}
