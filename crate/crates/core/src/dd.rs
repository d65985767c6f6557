//! Minimal double-double arithmetic for the Γ(1+z) Taylor recurrence and the
//! LPED residue series.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// `e^x` to roughly 30 significant digits, for `|x| < 700`.
    pub fn exp(x: f64) -> Self {
        const LN2: (f64, f64) = (std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
        let k = (x / LN2.0).round();
        let r = Self::from(x) - Self::from(LN2) * k;
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        for i in 1..=27 {
            term = term * r / i as f64;
            sum = sum + term;
        }
        let scale = 2f64.powi(k as i32);
        Self {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }
}

impl From<(f64, f64)> for DoubleDouble {
    fn from((hi, lo): (f64, f64)) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.hi * rhs.hi;
        let e = self.hi.mul_add(rhs.hi, -p);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + -rhs
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        let p = self.hi * rhs;
        let e = self.hi.mul_add(rhs, -p) + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        let q1 = self.hi / rhs;
        // remainder self - q1 * rhs, exact via fma
        let p = q1 * rhs;
        let pe = q1.mul_add(rhs, -p);
        let (s, e) = two_sum(self.hi, -p);
        let r = (s + (e - pe)) + self.lo;
        let q2 = r / rhs;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }
}
