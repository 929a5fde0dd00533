//! Quad-double arithmetic: an unevaluated sum of four `f64`s giving roughly
//! 62 significant decimal digits.
//!
//! The moment-only Arnoldi process conditions like `(R/cap)^(2k)` in the
//! monomial representation, which caps the clean double-double degree near
//! 40-55 on multi-component scenes; this tier roughly doubles the reachable
//! degree and is what the multi-island reconstructions run on.
//!
//! Algorithms follow the classical quad-double construction (sloppy add and
//! mul, long division, Newton square root) built on the same error-free
//! transformations as [`crate::dd`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use crate::dd::{quick_two_sum, two_prod, two_sum, Real};

/// Quad-double scalar: components in decreasing magnitude, each at most an
/// ulp of the previous after renormalization.
#[derive(Clone, Copy, Default)]
pub struct Qd(pub(crate) [f64; 4]);

/// `a + b + c = s + e1 + e2`.
#[inline]
fn three_sum(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (s, t3) = two_sum(c, t1);
    let (e1, e2) = two_sum(t2, t3);
    (s, e1, e2)
}

/// `a + b + c ~ s + e` (second-order error folded).
#[inline]
fn three_sum2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (s, t3) = two_sum(c, t1);
    (s, t2 + t3)
}

/// Renormalize five overlapping components into a canonical quad-double.
fn renorm5(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Qd {
    if !c0.is_finite() {
        return Qd([c0 + c1, 0.0, 0.0, 0.0]);
    }
    let (s, t4) = quick_two_sum(c3, c4);
    let (s, t3) = quick_two_sum(c2, s);
    let (s, t2) = quick_two_sum(c1, s);
    let (c0, t1) = quick_two_sum(c0, s);

    let (mut s0, mut s1, mut s2, mut s3) = (c0, t1, 0.0f64, 0.0f64);
    if s1 != 0.0 {
        let (a, b) = quick_two_sum(s1, t2);
        s1 = a;
        s2 = b;
        if s2 != 0.0 {
            let (a, b) = quick_two_sum(s2, t3);
            s2 = a;
            s3 = b;
            if s3 != 0.0 {
                s3 += t4;
            } else {
                let (a, b) = quick_two_sum(s2, t4);
                s2 = a;
                s3 = b;
            }
        } else {
            let (a, b) = quick_two_sum(s1, t3);
            s1 = a;
            s2 = b;
            if s2 != 0.0 {
                let (a, b) = quick_two_sum(s2, t4);
                s2 = a;
                s3 = b;
            } else {
                let (a, b) = quick_two_sum(s1, t4);
                s1 = a;
                s2 = b;
            }
        }
    } else {
        let (a, b) = quick_two_sum(s0, t2);
        s0 = a;
        s1 = b;
        if s1 != 0.0 {
            let (a, b) = quick_two_sum(s1, t3);
            s1 = a;
            s2 = b;
            if s2 != 0.0 {
                let (a, b) = quick_two_sum(s2, t4);
                s2 = a;
                s3 = b;
            } else {
                let (a, b) = quick_two_sum(s1, t4);
                s1 = a;
                s2 = b;
            }
        } else {
            let (a, b) = quick_two_sum(s0, t3);
            s0 = a;
            s1 = b;
            if s1 != 0.0 {
                let (a, b) = quick_two_sum(s1, t4);
                s1 = a;
                s2 = b;
            } else {
                let (a, b) = quick_two_sum(s0, t4);
                s0 = a;
                s1 = b;
            }
        }
    }
    Qd([s0, s1, s2, s3])
}

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);
    /// pi to quad-double precision.
    pub const PI: Qd = Qd([
        3.141592653589793116e+00,
        1.224646799147353207e-16,
        -2.994769809718339666e-33,
        1.112454220863365282e-49,
    ]);

    #[inline]
    pub fn from_f64(x: f64) -> Qd {
        Qd([x, 0.0, 0.0, 0.0])
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0[0] + self.0[1] + self.0[2] + self.0[3]
    }

    pub fn parts(self) -> [f64; 4] {
        self.0
    }

    /// Rebuild from stored components (file round-trips).
    pub fn from_parts(p: [f64; 4]) -> Qd {
        renorm5(p[0], p[1], p[2], p[3], 0.0)
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn abs(self) -> Qd {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn is_negative(self) -> bool {
        self.0[0] < 0.0
            || (self.0[0] == 0.0
                && (self.0[1] < 0.0
                    || (self.0[1] == 0.0 && (self.0[2] < 0.0 || (self.0[2] == 0.0 && self.0[3] < 0.0)))))
    }

    fn mul_f64(self, b: f64) -> Qd {
        let (p0, q0) = two_prod(self.0[0], b);
        let (p1, q1) = two_prod(self.0[1], b);
        let (p2, q2) = two_prod(self.0[2], b);
        let p3 = self.0[3] * b;
        let s0 = p0;
        let (s1, s2) = two_sum(q0, p1);
        let (s2, q1, p2) = three_sum(s2, q1, p2);
        let (q1, q2) = three_sum2(q1, q2, p3);
        let s3 = q1;
        let s4 = q2 + p2;
        renorm5(s0, s1, s2, s3, s4)
    }

    pub fn sqrt(self) -> Qd {
        if self == Qd::ZERO {
            return Qd::ZERO;
        }
        assert!(self.0[0] > 0.0, "Qd::sqrt of negative value");
        // Newton iteration on x = 1/sqrt(a); each step doubles the digits.
        let mut x = Qd::from_f64(1.0 / self.0[0].sqrt());
        let half = Qd::from_f64(0.5);
        for _ in 0..4 {
            // x += x * (1 - a x^2) / 2
            let ax2 = self * x * x;
            x = x + x * (Qd::ONE - ax2) * half;
        }
        self * x
    }

    pub fn powi(self, n: i32) -> Qd {
        if n == 0 {
            return Qd::ONE;
        }
        let mut base = if n < 0 { Qd::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Qd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn floor(self) -> Qd {
        let f0 = self.0[0].floor();
        if f0 != self.0[0] {
            return Qd([f0, 0.0, 0.0, 0.0]);
        }
        let f1 = self.0[1].floor();
        if f1 != self.0[1] {
            return renorm5(f0, f1, 0.0, 0.0, 0.0);
        }
        let f2 = self.0[2].floor();
        if f2 != self.0[2] {
            return renorm5(f0, f1, f2, 0.0, 0.0);
        }
        renorm5(f0, f1, f2, self.0[3].floor(), 0.0)
    }

    /// Sine and cosine via reduction to [0, pi/4] and Taylor series.
    pub fn sin_cos(self) -> (Qd, Qd) {
        let two_pi = Qd::PI.mul_f64(2.0);
        let half_pi = Qd::PI.mul_f64(0.5);
        let mut x = self - two_pi * (self / two_pi).floor();
        if x.is_negative() {
            x = x + two_pi;
        }
        let q = (x / half_pi).floor().to_f64() as i32;
        let r = x - half_pi.mul_f64(q as f64);
        let (s, c) = qd_sin_cos_kernel(r);
        match q.rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

fn qd_sin_cos_kernel(r: Qd) -> (Qd, Qd) {
    let quarter_pi = Qd::PI.mul_f64(0.25);
    let half_pi = Qd::PI.mul_f64(0.5);
    if r > quarter_pi {
        let (s, c) = qd_sin_cos_kernel(half_pi - r);
        return (c, s);
    }
    let x2 = r * r;
    // (pi/4)^49 / 49! ~ 2e-68 bounds the truncation below qd resolution.
    let mut s = Qd::ZERO;
    let mut c = Qd::ZERO;
    for k in (1..=24).rev() {
        let sin_den = Qd::from_f64(((2 * k) * (2 * k + 1)) as f64);
        let cos_den = Qd::from_f64(((2 * k - 1) * (2 * k)) as f64);
        s = (Qd::ONE - s) * x2 / sin_den;
        c = (Qd::ONE - c) * x2 / cos_den;
    }
    ((Qd::ONE - s) * r, Qd::ONE - c)
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Qd({:e}, {:e}, {:e}, {:e})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

impl fmt::Display for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.16e}{:+.16e}{:+.16e}{:+.16e}",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

impl PartialEq for Qd {
    fn eq(&self, other: &Qd) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<Ordering> {
        for i in 0..4 {
            match self.0[i].partial_cmp(&other.0[i]) {
                Some(Ordering::Equal) => continue,
                ord => return ord,
            }
        }
        Some(Ordering::Equal)
    }
}

impl Neg for Qd {
    type Output = Qd;
    #[inline]
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, rhs: Qd) -> Qd {
        let a = &self.0;
        let b = &rhs.0;
        let (s0, e0) = two_sum(a[0], b[0]);
        let (s1, e1) = two_sum(a[1], b[1]);
        let (s2, e2) = two_sum(a[2], b[2]);
        let (s3, e3) = two_sum(a[3], b[3]);
        let (s1, e0) = two_sum(s1, e0);
        let (s2, e0, e1) = three_sum(s2, e0, e1);
        let (s3, e0) = three_sum2(s3, e0, e2);
        let e0 = e0 + e1 + e3;
        renorm5(s0, s1, s2, s3, e0)
    }
}

impl Sub for Qd {
    type Output = Qd;
    #[inline]
    fn sub(self, rhs: Qd) -> Qd {
        self + (-rhs)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, rhs: Qd) -> Qd {
        let a = &self.0;
        let b = &rhs.0;
        let (p0, q0) = two_prod(a[0], b[0]);
        let (p1, q1) = two_prod(a[0], b[1]);
        let (p2, q2) = two_prod(a[1], b[0]);
        let (p3, q3) = two_prod(a[0], b[2]);
        let (p4, q4) = two_prod(a[1], b[1]);
        let (p5, q5) = two_prod(a[2], b[0]);
        // Accumulate by order in eps.
        let (p1, p2, q0) = three_sum(p1, p2, q0);
        let (p2, q1, q2) = three_sum(p2, q1, q2);
        let (p3, p4, p5) = three_sum(p3, p4, p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;
        let s1 = s1 + (a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5);
        renorm5(p0, p1, s0, s1, s2)
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, rhs: Qd) -> Qd {
        // Long division with quad-double remainders.
        let q0 = self.0[0] / rhs.0[0];
        let mut r = self - rhs.mul_f64(q0);
        let q1 = r.0[0] / rhs.0[0];
        r = r - rhs.mul_f64(q1);
        let q2 = r.0[0] / rhs.0[0];
        r = r - rhs.mul_f64(q2);
        let q3 = r.0[0] / rhs.0[0];
        r = r - rhs.mul_f64(q3);
        let q4 = r.0[0] / rhs.0[0];
        renorm5(q0, q1, q2, q3, q4)
    }
}

impl Rem for Qd {
    type Output = Qd;
    fn rem(self, rhs: Qd) -> Qd {
        self - rhs * (self / rhs).floor()
    }
}

impl AddAssign for Qd {
    fn add_assign(&mut self, rhs: Qd) {
        *self = *self + rhs;
    }
}
impl SubAssign for Qd {
    fn sub_assign(&mut self, rhs: Qd) {
        *self = *self - rhs;
    }
}
impl MulAssign for Qd {
    fn mul_assign(&mut self, rhs: Qd) {
        *self = *self * rhs;
    }
}
impl DivAssign for Qd {
    fn div_assign(&mut self, rhs: Qd) {
        *self = *self / rhs;
    }
}

impl num_traits::Zero for Qd {
    fn zero() -> Qd {
        Qd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == [0.0; 4]
    }
}

impl num_traits::One for Qd {
    fn one() -> Qd {
        Qd::ONE
    }
}

impl num_traits::Num for Qd {
    type FromStrRadixErr = std::num::ParseFloatError;
    /// Lossy (f64-precision) parse; file formats round-trip via components.
    fn from_str_radix(s: &str, radix: u32) -> Result<Qd, Self::FromStrRadixErr> {
        assert_eq!(radix, 10, "only radix 10 supported");
        s.parse::<f64>().map(Qd::from_f64)
    }
}

impl Real for Qd {
    const NAME: &'static str = "qd";
    const BREAKDOWN_TOL: f64 = 1e-122;
    #[inline]
    fn from_f64(x: f64) -> Qd {
        Qd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Qd::to_f64(self)
    }
    #[inline]
    fn sqrt(self) -> Qd {
        Qd::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Qd {
        Qd::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (Qd, Qd) {
        Qd::sin_cos(self)
    }
    #[inline]
    fn pi() -> Qd {
        Qd::PI
    }
    #[inline]
    fn is_finite(self) -> bool {
        Qd::is_finite(self)
    }
}
