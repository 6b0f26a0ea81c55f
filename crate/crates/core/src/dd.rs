//! Double-double arithmetic: unevaluated sums `hi + lo` of two `f64`s giving
//! roughly 106 significant bits (~31 decimal digits).
//!
//! This is the high-precision mode of the library. It is mandatory in the
//! spectrum solver, where the residual targets on a quadratically degenerate
//! double zero need headroom well beyond `f64`, and optional elsewhere.
//!
//! The error-free transforms (`two_sum`, `split`, `two_prod`) are the
//! classical Dekker/Knuth building blocks; no FMA is assumed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Double-double number: `value = hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

/// Knuth two-sum: `a + b = s + err` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Fast two-sum, requires `|a| >= |b|` (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Dekker split of a `f64` into high and low 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    let lo = a - hi;
    (hi, lo)
}

/// Exact product: `a * b = p + err`.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Machine epsilon of the format, 2^-104.
    pub const EPSILON: f64 = 4.93038065763132e-32;

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
    pub fn from_int(n: i64) -> Dd {
        // i64 up to 2^53 is exact in one limb; split larger ones.
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    /// Signum on the exact value (hi dominates by normalization).
    #[inline]
    pub fn signum(self) -> i32 {
        if self.hi > 0.0 {
            1
        } else if self.hi < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Square root by Karp's method: one f64 estimate plus one correction.
    pub fn sqrt(self) -> Dd {
        if self.is_zero() {
            return Dd::ZERO;
        }
        assert!(self.hi > 0.0, "Dd::sqrt of negative value");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Dd::from_f64(ax);
        let err = (self - ax_dd * ax_dd).hi * (x * 0.5);
        let (s, e) = two_sum(ax, err);
        Dd { hi: s, lo: e }
    }

    /// Integer power by repeated multiplication (small exponents).
    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Exact conversion to a rational (both limbs are binary rationals).
    pub fn to_rational(self) -> BigRational {
        let hi = BigRational::from_float(self.hi).expect("finite hi");
        let lo = BigRational::from_float(self.lo).expect("finite lo");
        hi + lo
    }

    /// Decimal rendering with `digits` places after the point, round half up.
    pub fn to_decimal(self, digits: usize) -> String {
        let r = self.to_rational();
        let neg = r.is_negative();
        let r = r.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = (&r * BigRational::from_integer(scale.clone())
            + BigRational::new(BigInt::from(1), BigInt::from(2)))
        .floor()
        .to_integer();
        let int_part = &scaled / &scale;
        let frac_part = &scaled % &scale;
        let mut frac_str = frac_part.to_string();
        while frac_str.len() < digits {
            frac_str.insert(0, '0');
        }
        let sign = if neg && !(int_part.is_zero() && scaled.is_zero()) {
            "-"
        } else if neg {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_str}")
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
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
        // Long division with two correction steps.
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e + q3)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: f64) -> Dd {
        self * Dd::from_f64(rhs)
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

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(31))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rational_of(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    /// Relative error of a Dd against an exact rational reference.
    fn rel_err(d: Dd, exact: &BigRational) -> f64 {
        if exact.is_zero() {
            return d.to_rational().abs().to_f64().unwrap_or(f64::INFINITY);
        }
        ((d.to_rational() - exact) / exact)
            .abs()
            .to_f64()
            .unwrap_or(f64::INFINITY)
    }

    #[test]
    fn add_mul_div_match_exact_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let a = rng.gen_range(-1e3..1e3);
            let b = rng.gen_range(-1e3..1e3);
            let (ra, rb) = (rational_of(a), rational_of(b));
            let (da, db) = (Dd::from_f64(a), Dd::from_f64(b));

            // f64 inputs: sum and product are exactly representable in Dd.
            assert_eq!((da + db).to_rational(), &ra + &rb);
            assert_eq!((da * db).to_rational(), &ra * &rb);

            if b != 0.0 {
                let err = rel_err(da / db, &(&ra / &rb));
                assert!(err < 1e-31, "div err {err}");
            }
        }
    }

    #[test]
    fn chained_products_keep_dd_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let xs: Vec<f64> = (0..12).map(|_| rng.gen_range(0.1..2.0)).collect();
            let mut d = Dd::ONE;
            let mut r = BigRational::one();
            for &x in &xs {
                d = d * Dd::from_f64(x);
                r *= rational_of(x);
            }
            assert!(rel_err(d, &r) < 1e-29);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = Dd::from_f64(rng.gen_range(1e-6..1e6));
            let s = a.sqrt();
            let back = s * s;
            let err = ((back - a) / a).abs().to_f64();
            assert!(err < 1e-30, "sqrt roundtrip err {err}");
        }
    }

    #[test]
    fn decimal_rendering() {
        let x = Dd::from_f64(0.5) + Dd::from_f64(0.25);
        assert_eq!(x.to_decimal(4), "0.7500");
        let y = Dd::from_int(-3) + Dd::from_f64(0.5);
        assert_eq!(y.to_decimal(2), "-2.50");
        // 1/3 in Dd is accurate to ~31 digits.
        let third = Dd::ONE / Dd::from_int(3);
        let s = third.to_decimal(28);
        assert!(s.starts_with("0.3333333333333333333333333333"), "{s}");
    }

    #[test]
    fn ordering_uses_both_limbs() {
        let a = Dd::ONE;
        let b = Dd::ONE + Dd::from_f64(1e-25);
        assert!(a < b);
        assert!(b > a);
        assert!(a <= Dd::ONE);
    }
}
