use core::ops::Add;
use num_traits::Float;

use crate::C64;

/// Distance from `x` to the nearest integer.
pub fn integer_gap(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// An element of `C/Z`: the real part is reduced into `[0, 1)`, the
/// imaginary part is carried verbatim.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleValue {
    pub value: C64,
    /// The integral before reduction.
    pub raw: C64,
}

impl AngleValue {
    pub fn reduce(raw: C64) -> Self {
        let mut re = raw.re - raw.re.floor();
        // floor of a tiny negative number leaves exactly 1.0 after rounding
        if re >= 1.0 {
            re -= 1.0;
        }
        Self { value: C64::new(re, raw.im), raw }
    }

    pub fn zero() -> Self {
        Self::reduce(C64::new(0.0, 0.0))
    }

    /// Distance in `C/Z`: circular on the real part, plain on the imaginary.
    pub fn distance(&self, other: &Self) -> f64 {
        integer_gap(self.value.re - other.value.re).max((self.value.im - other.value.im).abs())
    }

    /// Distance from `n · self` to `0 ∈ C/Z`.
    pub fn order_residual(&self, n: usize) -> f64 {
        let m = n as f64;
        integer_gap(m * self.value.re).max((m * self.value.im).abs())
    }
}

impl Add for AngleValue {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::reduce(self.raw + other.raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tiny_negative_raw_reduces_to_zero() {
        let v = AngleValue::reduce(C64::new(-1e-18, 0.0));
        assert_eq!(v.value.re, 0.0);
    }

    proptest! {
        #[test]
        fn reduction_lands_in_unit_interval(re in -50.0f64..50.0, im in -1.0f64..1.0) {
            let v = AngleValue::reduce(C64::new(re, im));
            prop_assert!((0.0..1.0).contains(&v.value.re));
            prop_assert!(integer_gap(v.value.re - re) < 1e-12);
            prop_assert_eq!(v.value.im, im);
        }

        #[test]
        fn addition_is_mod_one(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let s = AngleValue::reduce(C64::new(a, 0.0)) + AngleValue::reduce(C64::new(b, 0.0));
            prop_assert!(s.distance(&AngleValue::reduce(C64::new(a + b, 0.0))) < 1e-12);
        }
    }
}
