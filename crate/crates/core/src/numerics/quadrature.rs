//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Upper bound on interval bisections before giving up.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 2000;

/// Absolute tolerance floor; keeps tiny integrals from demanding the impossible.
const ABS_FLOOR: f64 = 1e-300;

// 15-point Kronrod abscissae (positive half, descending) and weights.
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
// 7-point Gauss weights; the Gauss nodes are XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a successful integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error, always non-negative.
    pub est_error: f64,
    /// Number of integrand evaluations (a multiple of 15).
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut abs_sum = kronrod.abs();
    let mut values = [0.0f64; 15];
    values[7] = f_center;

    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        values[j] = lo;
        values[14 - j] = hi;
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::invalid(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }

    // QUADPACK-style error scaling.
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((values[j] - mean).abs() + (values[14 - j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// Uses [`DEFAULT_MAX_SUBDIVISIONS`]; see [`integrate_with`].
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    integrate_with(f, a, b, rel_tol, DEFAULT_MAX_SUBDIVISIONS)
}

/// Integrates `f` over `[a, b]`, bisecting the segment with the largest
/// error estimate until the total error is at most
/// `max(rel_tol·|value|, 1e-300)`.
///
/// Fails with [`Error::QuadratureNonConvergence`], carrying the best
/// estimate, when `max_subdivisions` bisections were not enough.
pub fn integrate_with<F>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}]"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::invalid(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }

    let first = kronrod_15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;

    loop {
        let (value, error) = totals(&heap);
        if error <= (rel_tol * value.abs()).max(ABS_FLOOR) {
            return Ok(QuadratureResult {
                value,
                est_error: error,
                evaluations,
            });
        }
        let worst = *heap.peek().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if subdivisions >= max_subdivisions || !(worst.a < mid && mid < worst.b) {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                est_error: error,
                evaluations,
            });
        }
        heap.pop();
        heap.push(kronrod_15(&mut f, worst.a, mid)?);
        heap.push(kronrod_15(&mut f, mid, worst.b)?);
        evaluations += 30;
        subdivisions += 1;
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    // Sum in interval order so the result does not depend on heap layout.
    let mut segments: Vec<&Segment> = heap.iter().collect();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    segments
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}
