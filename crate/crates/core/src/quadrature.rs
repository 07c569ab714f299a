//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::num::Real;

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

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { absolute: 0.0, relative: 1e-10, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error_estimate: T,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, lo: T, hi: T) -> Segment<T> {
    let half = (hi - lo) / T::lit(2.0);
    let center = (hi + lo) / T::lit(2.0);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[i / 2]);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { lo, hi, value, error }
}

/// ∫_lo^hi f(x) dx.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: Tolerance) -> Result<Integral<T>> {
    let mut segments = vec![kronrod(&mut f, lo, hi)];
    loop {
        let (value, error) =
            segments.iter().fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
        if !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: value.to_f64_lossy(),
                error_estimate: error.to_f64_lossy(),
                intervals: segments.len(),
            });
        }
        let target = T::lit(tol.absolute).max(T::lit(tol.relative) * value.abs());
        if error <= target || error == T::zero() {
            return Ok(Integral { value, error_estimate: error, intervals: segments.len() });
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                estimate: value.to_f64_lossy(),
                error_estimate: error.to_f64_lossy(),
                intervals: segments.len(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("non-empty");
        let s = segments.swap_remove(worst);
        let mid = (s.lo + s.hi) / T::lit(2.0);
        segments.push(kronrod(&mut f, s.lo, mid));
        segments.push(kronrod(&mut f, mid, s.hi));
    }
}

/// ∫_0^∞ f(x) dx via x = t/(1−t).
pub fn integrate_semi_infinite<T: Real, F: FnMut(T) -> T>(mut f: F, tol: Tolerance) -> Result<Integral<T>> {
    integrate(
        |t: T| {
            let one_minus = T::one() - t;
            let x = t / one_minus;
            f(x) / (one_minus * one_minus)
        },
        T::zero(),
        T::one(),
        tol,
    )
}
