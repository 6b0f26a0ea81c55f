//! Truncated formal power series in `q` with exact integer coefficients.
//!
//! A `TruncSeries` of order `K` stores the coefficients of `q^0 .. q^K`; all
//! arithmetic truncates consistently at the smaller order of the operands and
//! is exact over the integers. Series with constant term `±1` are invertible
//! and their inverses again have integer coefficients, which is what keeps the
//! zero-correction solve in `delta` rational-free.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigInt>,
}

impl TruncSeries {
    /// Series from explicit coefficients; `coeffs[k]` is the coefficient of `q^k`.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> TruncSeries {
        assert!(!coeffs.is_empty(), "series needs at least the q^0 term");
        TruncSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> TruncSeries {
        TruncSeries::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> TruncSeries {
        TruncSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// `c * q^k` truncated at `order`.
    pub fn monomial(order: usize, k: usize, c: BigInt) -> TruncSeries {
        let mut s = TruncSeries::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Truncation order `K` (highest retained power of `q`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: BigInt) {
        assert!(k < self.coeffs.len());
        self.coeffs[k] = c;
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Re-truncate to a (smaller or larger) order; new high coefficients are zero.
    pub fn truncated(&self, order: usize) -> TruncSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, BigInt::zero());
        coeffs.truncate(order + 1);
        TruncSeries { coeffs }
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect();
        TruncSeries { coeffs }
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect();
        TruncSeries { coeffs }
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Truncating product, at the smaller order of the operands.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        self.mul_trunc(other, self.order().min(other.order()))
    }

    /// Truncating product at an explicit order (cheaper when less is needed).
    pub fn mul_trunc(&self, other: &TruncSeries, order: usize) -> TruncSeries {
        let mut coeffs = vec![BigInt::zero(); order + 1];
        let na = self.coeffs.len().min(order + 1);
        for (i, a) in self.coeffs[..na].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let nb = other.coeffs.len().min(order + 1 - i);
            for (j, b) in other.coeffs[..nb].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncSeries { coeffs }
    }

    /// `self += q^shift * other`, truncating at `self.order()`.
    pub fn add_assign_shifted(&mut self, other: &TruncSeries, shift: usize) {
        let order = self.order();
        for (k, c) in other.coeffs.iter().enumerate() {
            if shift + k > order {
                break;
            }
            if !c.is_zero() {
                self.coeffs[shift + k] += c;
            }
        }
    }

    /// `q^shift * self`, truncated at the original order.
    pub fn shifted(&self, shift: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(self.order());
        s.add_assign_shifted(self, shift);
        s
    }

    pub fn scale(&self, c: &BigInt) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplicative inverse; requires constant term `±1` so that the
    /// result stays integral.
    pub fn inverse(&self) -> Result<TruncSeries, SeriesError> {
        let c0 = &self.coeffs[0];
        if !(c0.is_one() || (-c0).is_one()) {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let order = self.order();
        let mut inv = TruncSeries::zero(order);
        inv.coeffs[0] = c0.clone(); // 1/(±1) = ±1
        for n in 1..=order {
            let mut acc = BigInt::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &inv.coeffs[n - i];
                }
            }
            // c0 = ±1, so division is multiplication by c0.
            inv.coeffs[n] = -acc * c0;
        }
        Ok(inv)
    }

    /// Truncating division by a series with constant term `±1`.
    pub fn div(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Smallest `k >= 1` with nonzero coefficient, if any within the order.
    pub fn leading_gap(&self) -> Option<usize> {
        (1..=self.order()).find(|&k| !self.coeffs[k].is_zero())
    }

    /// Horner evaluation at a real point (coefficients converted lossily).
    pub fn eval_f64(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, q: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Coefficients as decimal strings (JSON-safe for arbitrary magnitude).
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Parse back from decimal strings.
    pub fn from_coeff_strings(strs: &[String]) -> Result<TruncSeries, SeriesError> {
        let coeffs = strs
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|_| SeriesError::BadCoefficient(s.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return Err(SeriesError::BadCoefficient("<empty>".into()));
        }
        Ok(TruncSeries { coeffs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("constant term must be +1 or -1 for an integral inverse")]
    NonUnitConstantTerm,
    #[error("unparseable coefficient `{0}`")]
    BadCoefficient(String),
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "q")?,
                1 => write!(f, "{mag}*q")?,
                _ if mag.is_one() => write!(f, "q^{k}")?,
                _ => write!(f, "{mag}*q^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}
