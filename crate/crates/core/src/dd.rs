//! Double-double ("dd") extended-precision arithmetic: an unevaluated sum of
//! two `f64`s giving roughly 31 significant decimal digits.
//!
//! Used by the moment and orthogonalization pipelines when the `extended`
//! precision tag is requested. Only the operations those pipelines need are
//! implemented: field arithmetic, `sqrt`, `abs`, integer powers, comparisons,
//! and `sin`/`cos` for periodic quadrature nodes.
//!
//! The error-free transformations (`two_sum`, `two_prod` with a Dekker split)
//! follow the classical double-double construction; they rely on IEEE-754
//! round-to-nearest `f64` arithmetic, which Rust guarantees.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

/// Double-double scalar. Invariant: `hi = fl(hi + lo)`, `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

/// `s + e = a + b` exactly, assuming nothing about magnitudes (Knuth).
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `s + e = a + b` exactly, assuming `|a| >= |b|` (Dekker).
#[inline]
pub(crate) fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Dekker split constant: 2^27 + 1.
const SPLITTER: f64 = 134_217_729.0;

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// `p + e = a * b` exactly (Dekker product; valid away from overflow).
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi to double-double precision.
    pub const PI: Dd = Dd {
        hi: 3.141592653589793116e0,
        lo: 1.224646799147353207e-16,
    };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Rebuild from stored components (file round-trips). The pair must
    /// already be normalized, as produced by `hi()`/`lo()`.
    #[inline]
    pub fn from_parts(hi: f64, lo: f64) -> Dd {
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        assert!(self.hi > 0.0, "Dd::sqrt of negative value {self:?}");
        // One Karp-Markstein refinement of the f64 square root reaches full
        // double-double precision.
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Dd::from_f64(ax);
        let err = self - ax_dd * ax_dd;
        ax_dd + Dd::from_f64(err.hi * (x * 0.5))
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { Dd::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn floor(self) -> Dd {
        let fhi = self.hi.floor();
        if fhi == self.hi {
            let (s, e) = quick_two_sum(fhi, self.lo.floor());
            Dd { hi: s, lo: e }
        } else {
            Dd { hi: fhi, lo: 0.0 }
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Sine and cosine. Argument is reduced modulo 2*pi and then folded onto
    /// [0, pi/4] where a double-double Taylor series converges in ~15 terms.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let two_pi = Dd::PI * Dd::from_f64(2.0);
        let half_pi = Dd::PI * Dd::from_f64(0.5);
        // Range-reduce to [0, 2*pi): the quadrature nodes handled here are
        // already O(1), so a single floor pass is enough.
        let mut x = self - two_pi * (self / two_pi).floor();
        if x < Dd::ZERO {
            x = x + two_pi;
        }
        // Quadrant index and remainder in [0, pi/2).
        let q = (x / half_pi).floor().to_f64() as i32;
        let r = x - half_pi * Dd::from_f64(q as f64);
        let (s, c) = sin_cos_kernel(r);
        match q.rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

/// Taylor evaluation of sin/cos on [0, pi/2), folding to [0, pi/4].
fn sin_cos_kernel(r: Dd) -> (Dd, Dd) {
    let quarter_pi = Dd::PI * Dd::from_f64(0.25);
    let half_pi = Dd::PI * Dd::from_f64(0.5);
    if r > quarter_pi {
        let (s, c) = sin_cos_kernel(half_pi - r);
        return (c, s);
    }
    let x2 = r * r;
    // Horner on sin x / x = 1 - x^2/3! (1 - x^2/(4*5) (1 - ...)) and the
    // analogous nesting for cos. 15 levels leave a truncation below
    // 0.785^31/31! ~ 7e-38, well under dd resolution.
    let mut s = Dd::ZERO;
    let mut c = Dd::ZERO;
    for k in (1..=15).rev() {
        let sin_den = Dd::from_f64(((2 * k) * (2 * k + 1)) as f64);
        let cos_den = Dd::from_f64(((2 * k - 1) * (2 * k)) as f64);
        s = (Dd::ONE - s) * x2 / sin_den;
        c = (Dd::ONE - c) * x2 / cos_den;
    }
    ((Dd::ONE - s) * r, Dd::ONE - c)
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Approximate decimal rendering; file formats store hi/lo pairs instead.
        write!(f, "{:.16e}{:+.16e}", self.hi, self.lo)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        // Three-step long division with double-double remainders.
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        self - rhs * (self / rhs).floor()
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}
impl SubAssign for Dd {
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}
impl MulAssign for Dd {
    fn mul_assign(&mut self, rhs: Dd) {
        *self = *self * rhs;
    }
}
impl DivAssign for Dd {
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl num_traits::Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl num_traits::One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl num_traits::Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    /// Lossy (f64-precision) parse; file formats round-trip via hi/lo pairs.
    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, Self::FromStrRadixErr> {
        f64::from_str_radix_helper(s, radix).map(Dd::from_f64)
    }
}

trait FromStrRadixHelper: Sized {
    fn from_str_radix_helper(s: &str, radix: u32) -> Result<f64, std::num::ParseFloatError>;
}

impl FromStrRadixHelper for f64 {
    fn from_str_radix_helper(s: &str, radix: u32) -> Result<f64, std::num::ParseFloatError> {
        assert_eq!(radix, 10, "only radix 10 supported");
        s.parse::<f64>()
    }
}

/// Real scalar abstraction shared by the f64 and double-double pipelines.
///
/// Deliberately minimal: just what the moment quadratures and the Arnoldi
/// Gram-Schmidt recurrences consume.
pub trait Real:
    Copy
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Rem<Output = Self>
    + num_traits::Num
    + Send
    + Sync
    + 'static
{
    const NAME: &'static str;
    /// Breakdown tolerance for Gram-based norms: roughly eps^2 of the format.
    const BREAKDOWN_TOL: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn pi() -> Self;
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const NAME: &'static str = "double";
    const BREAKDOWN_TOL: f64 = 1e-26;
    #[inline]
    fn from_f64(x: f64) -> f64 {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (f64, f64) {
        f64::sin_cos(self)
    }
    #[inline]
    fn pi() -> f64 {
        std::f64::consts::PI
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for Dd {
    const NAME: &'static str = "dd";
    const BREAKDOWN_TOL: f64 = 1e-58;
    #[inline]
    fn from_f64(x: f64) -> Dd {
        Dd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    #[inline]
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Dd {
        Dd::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (Dd, Dd) {
        Dd::sin_cos(self)
    }
    #[inline]
    fn pi() -> Dd {
        Dd::PI
    }
    #[inline]
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> Dd {
        Dd::from_f64(x)
    }

    #[test]
    fn add_recovers_small_component() {
        let a = dd(1.0);
        let b = dd(1e-25);
        let s = a + b;
        let back = s - a;
        assert_eq!(back.to_f64(), 1e-25);
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = Dd::new(std::f64::consts::PI, 1.2e-17);
        let b = Dd::new(2.718281828459045, -3.1e-17);
        let c = a * b / b;
        let err = (c - a).abs().to_f64();
        assert!(err < 1e-30, "roundtrip error {err}");
    }

    #[test]
    fn sqrt_squares_back() {
        for &x in &[2.0, 3.0, 1e10, 1e-12, 0.64] {
            let s = dd(x).sqrt();
            let err = ((s * s - dd(x)) / dd(x)).abs().to_f64();
            assert!(err < 1e-30, "sqrt({x}) error {err}");
        }
        assert_eq!(Dd::ZERO.sqrt().to_f64(), 0.0);
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let x = Dd::new(0.8, 0.0);
        let mut acc = Dd::ONE;
        for _ in 0..41 {
            acc = acc * x;
        }
        let err = ((x.powi(41) - acc) / acc).abs().to_f64();
        assert!(err < 1e-30);
    }

    #[test]
    fn pi_is_accurate() {
        // sin(pi) should be ~0 at dd resolution via the series kernel.
        let (s, c) = Dd::PI.sin_cos();
        assert!(s.abs().to_f64() < 1e-30, "sin(pi) = {:?}", s);
        assert!((c + Dd::ONE).abs().to_f64() < 1e-30, "cos(pi) = {:?}", c);
    }

    #[test]
    fn sin_cos_identity_and_f64_agreement() {
        for q in 0..64 {
            let theta = 2.0 * std::f64::consts::PI * (q as f64) / 64.0;
            let (s, c) = dd(theta).sin_cos();
            let one = s * s + c * c;
            assert!((one - Dd::ONE).abs().to_f64() < 1e-30);
            assert!((s.to_f64() - theta.sin()).abs() < 1e-14);
            assert!((c.to_f64() - theta.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn floor_and_rem() {
        assert_eq!(dd(2.7).floor().to_f64(), 2.0);
        assert_eq!(dd(-2.3).floor().to_f64(), -3.0);
        let r = dd(7.5) % dd(2.0);
        assert!((r.to_f64() - 1.5).abs() < 1e-30);
    }

    #[test]
    fn ordering_uses_both_components() {
        let a = Dd::new(1.0, 1e-20);
        let b = Dd::new(1.0, 2e-20);
        assert!(a < b);
        assert!(dd(2.0) > dd(1.0));
    }
}
