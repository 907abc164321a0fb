//! Smooth cut-off functions used to build product collars.

use num_traits::Float;

/// `C^∞` step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, strictly monotone between.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let f = (-1.0 / s).exp();
        let g = (-1.0 / (1.0 - s)).exp();
        f / (f + g)
    }
}

pub fn smooth_step_derivative(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let f = (-1.0 / s).exp();
        let g = (-1.0 / (1.0 - s)).exp();
        f * g * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / ((f + g) * (f + g))
    }
}

/// A transition from 0 below `start` to 1 above `end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ramp {
    pub start: f64,
    pub end: f64,
}

impl Ramp {
    pub fn new(start: f64, end: f64) -> Self {
        assert!(end > start, "ramp needs a positive width");
        Self { start, end }
    }

    pub fn value(&self, x: f64) -> f64 {
        smooth_step((x - self.start) / (self.end - self.start))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        smooth_step_derivative((x - self.start) / (self.end - self.start)) / (self.end - self.start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_complementary() {
        for i in 1..20 {
            let s = i as f64 / 20.0;
            assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let r = Ramp::new(0.1, 0.8);
        for i in 1..30 {
            let x = 0.1 + 0.7 * i as f64 / 30.0;
            let h = 1e-6;
            let fd = (r.value(x + h) - r.value(x - h)) / (2.0 * h);
            assert!((fd - r.derivative(x)).abs() < 1e-7, "x = {x}");
        }
    }
}
