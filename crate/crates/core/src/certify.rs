//! Exact-rational certificate that all zeros of θ(q,·) are simple on a disk
//! |q| ≤ a.
//!
//! The chain certifies, for a witness pair (a, u) with u = 1 + β:
//!
//! 1. the base conditions `0 < a < 1/3` and `0 < au < 1`;
//! 2. the envelope inequality `ua/(1-a) + (ua)²/(1-ua) ≤ β/3`, which traps
//!    every partial product |Δ_1···Δ_s| in [1-β/3, 1+β/3] independently of s;
//! 3. the quotient step `(1-β/3)/(1+β/3) ≥ 1-β` and its mirror, valid for
//!    β ∈ (0,1), which pins each individual |Δ_s| inside [1-β, 1+β];
//! 4. the separation margin `(1+β)·a < 1-β`, i.e. |Δ_{j+1}q^{j+1}| < |Δ_j q^j|
//!    strictly, so consecutive zero reciprocals have strictly decreasing
//!    moduli and all zeros are distinct.
//!
//! Every inequality is evaluated in exact rational arithmetic: rounding can
//! never flip a verdict. Floating point appears only in the numerical
//! oracles that cross-check the closed forms.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error("numeric inversion failed on a unitriangular truncation (internal)")]
    SingularTruncation,
}

/// Witness parameters of a certificate: radius a, band half-width β, u = 1+β.
#[derive(Debug, Clone, PartialEq)]
pub struct CertParams {
    pub a: BigRational,
    pub beta: BigRational,
    pub u: BigRational,
}

impl CertParams {
    pub fn from_a_u(a: BigRational, u: BigRational) -> CertParams {
        let beta = &u - BigRational::one();
        CertParams { a, beta, u }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_pow(a: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= a;
    }
    acc
}

/// Fixed-point decimal approximation of a rational, round half up.
pub fn decimal_approx(r: &BigRational, digits: usize) -> String {
    let neg = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (&abs * BigRational::from_integer(scale.clone()) + rat(1, 2))
        .floor()
        .to_integer();
    let int_part = &scaled / &scale;
    let mut frac = (&scaled % &scale).to_string();
    while frac.len() < digits {
        frac.insert(0, '0');
    }
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Parse an exact rational from `p/q` or a decimal literal (optionally with
/// an exponent). Decimals never pass through floating point.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator `{num}`"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator `{den}`"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(BigRational::new(n, d));
    }
    // Decimal: [sign] digits [. digits] [eE [sign] digits]
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| format!("bad exponent `{e}`"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    let unsigned = digits.trim_start_matches(['+', '-']);
    if unsigned.is_empty() || !unsigned.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad rational literal `{text}`"));
    }
    let num: BigInt = digits
        .parse()
        .map_err(|_| format!("bad rational literal `{text}`"))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * ten.pow(shift as u32))
    } else {
        BigRational::new(num, ten.pow((-shift) as u32))
    })
}

// ---------------------------------------------------------------------------
// Closed-form inverse of the band factors L_s = I + N_s.
// ---------------------------------------------------------------------------

/// Entry (μ, ν) of L_s^{-1} (1-indexed), where L_s has ones on the diagonal
/// and `q^{s-1}Δ_s, q^{s-2}Δ_s, ..., qΔ_s, 0, 0, ...` down the first
/// subdiagonal:
///
/// ```text
/// (L_s^{-1})_{μ,ν} = (-1)^{μ-ν} Δ_s^{μ-ν} q^{(μ-ν)(s-μ+1) + (μ-ν)(μ-ν-1)/2}
/// ```
///
/// for ν ≤ μ ≤ s, with 1 on the diagonal and 0 everywhere else.
pub fn inverse_entry(
    s: usize,
    mu: usize,
    nu: usize,
    q: Complex64,
    delta_s: Complex64,
) -> Complex64 {
    assert!(s >= 1 && mu >= 1 && nu >= 1);
    if mu == nu {
        return Complex64::new(1.0, 0.0);
    }
    if nu > mu || mu > s {
        return Complex64::new(0.0, 0.0);
    }
    let k = mu - nu;
    let exponent = k * (s - mu + 1) + k * (k - 1) / 2;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * delta_s.powu(k as u32) * q.powu(exponent as u32)
}

/// Numeric oracle for the closed form: invert the d×d truncation of L_s with
/// a general-purpose LU solver and compare every entry.
pub fn inverse_oracle_check(
    s: usize,
    d: usize,
    q: Complex64,
    delta_s: Complex64,
    tol: f64,
) -> Result<bool, CertifyError> {
    assert!(d >= s + 1, "truncation must exceed the band length");
    let l = DMatrix::<Complex64>::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else if r == c + 1 && c + 1 < s {
            // Math indices: (L_s)_{i+1,i} = q^{s-i} Δ_s for 1 <= i <= s-1.
            q.powu((s - (c + 1)) as u32) * delta_s
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let inv = l.try_inverse().ok_or(CertifyError::SingularTruncation)?;
    for r in 0..d {
        for c in 0..d {
            let expected = inverse_entry(s, r + 1, c + 1, q, delta_s);
            if (inv[(r, c)] - expected).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Perturbation-series bound coefficients b_j.
// ---------------------------------------------------------------------------

/// Closed-form bound `b_j ≤ 1 / ((1-a)(1-a²)···(1-a^j))`, exact.
pub fn bound_b(j: usize, a: &BigRational) -> BigRational {
    assert!(j >= 1);
    assert!(
        a > &BigRational::zero() && a < &BigRational::one(),
        "need 0 < a < 1"
    );
    let mut prod = BigRational::one();
    for i in 1..=j {
        prod *= BigRational::one() - rat_pow(a, i);
    }
    prod.recip()
}

/// Expand `Π_{k=s}^{s+terms-1} (I + Σ_{i=1}^{s-1} (a^{k-s} M)^i)` in the
/// commutative ring R[M]/(M^s), extract the true coefficient of M^j, and
/// check it against [`bound_b`]. The dropped factors only add nonnegative
/// mass, so the finite product undershoots the limit; `terms` must be large
/// enough that `a^terms` is negligible for the comparison to be sharp.
pub fn bound_b_oracle(j: usize, s: usize, a: &BigRational, terms: usize) -> bool {
    assert!(j >= 1 && j < s, "oracle covers j < s");
    assert!(a > &BigRational::zero() && a < &BigRational::one());
    // Products only raise the M-degree, so the coefficient of M^j is already
    // exact in the ring truncated at degree j; the per-factor degree cap
    // s-1 never binds there because j < s.
    let len = j + 1;
    let mut acc = vec![BigRational::zero(); len];
    acc[0] = BigRational::one();
    let mut step = BigRational::one(); // a^{k-s}, starting at k = s
    for _ in 0..terms {
        // Factor coefficients 1, t, t², ..., with t = a^{k-s}.
        let mut factor = Vec::with_capacity(len);
        let mut c = BigRational::one();
        for _ in 0..len {
            factor.push(c.clone());
            c *= &step;
        }
        let mut next = vec![BigRational::zero(); len];
        for (i, ai) in acc.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (k, fk) in factor.iter().take(len - i).enumerate() {
                if !fk.is_zero() {
                    next[i + k] += ai * fk;
                }
            }
        }
        acc = next;
        step *= a;
    }
    acc[j] <= bound_b(j, a)
}

// ---------------------------------------------------------------------------
// The inequality chain.
// ---------------------------------------------------------------------------

/// Verdict on the base conditions and the envelope inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct CondVerdict {
    /// 0 < a < 1/3.
    pub bounds_ok: bool,
    /// 0 < a·u < 1.
    pub product_ok: bool,
    /// ua/(1-a) + (ua)²/(1-ua) ≤ (u-1)/3.
    pub chain_ok: bool,
    /// Exact slack RHS - LHS of the envelope inequality, when defined.
    pub chain_slack: Option<BigRational>,
    pub ok: bool,
}

/// Exact evaluation of the base conditions and the envelope inequality.
pub fn check_conditions(a: &BigRational, u: &BigRational) -> CondVerdict {
    assert!(a > &BigRational::zero() && u > &BigRational::one());
    let one = BigRational::one();
    let bounds_ok = a < &rat(1, 3);
    let au = a * u;
    let product_ok = au > BigRational::zero() && au < one;
    let (chain_ok, chain_slack) = if bounds_ok && product_ok {
        let lhs = &au / (&one - a) + &au * &au / (&one - &au);
        let rhs = (u - &one) / rat(3, 1);
        let slack = &rhs - &lhs;
        (!slack.is_negative(), Some(slack))
    } else {
        (false, None)
    };
    CondVerdict {
        bounds_ok,
        product_ok,
        chain_ok,
        chain_slack,
        ok: bounds_ok && product_ok && chain_ok,
    }
}

/// The s-independent band around the partial products |Δ_1···Δ_s|.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSandwich {
    /// E = ua/(1-a) + (ua)²/(1-ua).
    pub envelope: BigRational,
    pub lo: BigRational,
    pub hi: BigRational,
    /// E ≤ β/3, equivalent to the envelope inequality holding.
    pub within_beta_third: bool,
    /// (1-β/3)/(1+β/3) ≥ 1-β and (1+β/3)/(1-β/3) ≤ 1+β.
    pub quotient_ok: bool,
}

/// Compute the band [1-E, 1+E] and verify the β/3 sandwich and the quotient
/// step. Requires the base conditions (so both denominators are positive).
pub fn band_sandwich(a: &BigRational, u: &BigRational) -> BandSandwich {
    let one = BigRational::one();
    let au = a * u;
    assert!(
        a > &BigRational::zero() && a < &rat(1, 3) && au < one,
        "base conditions must hold"
    );
    let envelope = &au / (&one - a) + &au * &au / (&one - &au);
    let lo = &one - &envelope;
    let hi = &one + &envelope;
    let beta = u - &one;
    let third = &beta / rat(3, 1);
    let within = envelope <= third;
    let quotient_ok = if beta > BigRational::zero() && beta < one {
        let lo_q = (&one - &third) / (&one + &third);
        let hi_q = (&one + &third) / (&one - &third);
        lo_q >= &one - &beta && hi_q <= &one + &beta
    } else {
        false
    };
    BandSandwich {
        envelope,
        lo,
        hi,
        within_beta_third: within,
        quotient_ok,
    }
}

/// Verdict on the distinctness clincher (1+β)·a < 1-β.
#[derive(Debug, Clone, PartialEq)]
pub struct SepVerdict {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub slack: BigRational,
    pub ok: bool,
}

/// Exact separation margin: |Δ_{j+1} q^{j+1}| < |Δ_j q^j| for all j follows
/// from (1+β)·a < (1-β), strictly.
pub fn separation_margin(a: &BigRational, beta: &BigRational) -> SepVerdict {
    assert!(beta > &BigRational::zero() && beta < &BigRational::one());
    let one = BigRational::one();
    let lhs = (&one + beta) * a;
    let rhs = &one - beta;
    let slack = &rhs - &lhs;
    let ok = slack > BigRational::zero();
    SepVerdict {
        lhs,
        rhs,
        slack,
        ok,
    }
}

/// A fully evaluated certificate at a witness (a, u).
#[derive(Debug, Clone)]
pub struct Certificate {
    pub params: CertParams,
    pub conditions: CondVerdict,
    pub sandwich: Option<BandSandwich>,
    pub separation: Option<SepVerdict>,
    pub feasible: bool,
}

impl Certificate {
    /// Evaluate the whole chain at explicit (a, u).
    pub fn evaluate(a: BigRational, u: BigRational) -> Certificate {
        let params = CertParams::from_a_u(a, u);
        let conditions = check_conditions(&params.a, &params.u);
        let beta_in_range =
            params.beta > BigRational::zero() && params.beta < BigRational::one();
        let sandwich = if conditions.bounds_ok && conditions.product_ok {
            Some(band_sandwich(&params.a, &params.u))
        } else {
            None
        };
        let separation = if beta_in_range {
            Some(separation_margin(&params.a, &params.beta))
        } else {
            None
        };
        let feasible = conditions.ok
            && sandwich
                .as_ref()
                .is_some_and(|s| s.within_beta_third && s.quotient_ok)
            && separation.as_ref().is_some_and(|s| s.ok);
        Certificate {
            params,
            conditions,
            sandwich,
            separation,
            feasible,
        }
    }

    /// Human-readable proof transcript, every inequality with both sides as
    /// exact rationals (decimal approximations alongside).
    pub fn transcript(&self) -> String {
        let p = &self.params;
        let mut t = String::new();
        let dec = |r: &BigRational| format!("{} (= {})", r, decimal_approx(r, 10));
        t.push_str(&format!("certificate for the disk |q| <= a\n"));
        t.push_str(&format!("  a    = {}\n", dec(&p.a)));
        t.push_str(&format!("  u    = {}\n", dec(&p.u)));
        t.push_str(&format!("  beta = u - 1 = {}\n", dec(&p.beta)));
        t.push_str(&format!(
            "  [base]       0 < a < 1/3 : {}\n",
            verdict(self.conditions.bounds_ok)
        ));
        t.push_str(&format!(
            "  [base]       0 < a*u < 1 : a*u = {} : {}\n",
            dec(&(&p.a * &p.u)),
            verdict(self.conditions.product_ok)
        ));
        match &self.conditions.chain_slack {
            Some(slack) => {
                let lhs = &(&p.a * &p.u) / (BigRational::one() - &p.a)
                    + rat_pow(&(&p.a * &p.u), 2) / (BigRational::one() - &p.a * &p.u);
                t.push_str(&format!(
                    "  [envelope]   ua/(1-a) + (ua)^2/(1-ua) <= beta/3\n               LHS = {}\n               RHS = {}\n               slack = {} : {}\n",
                    dec(&lhs),
                    dec(&(&p.beta / rat(3, 1))),
                    dec(slack),
                    verdict(self.conditions.chain_ok)
                ));
            }
            None => t.push_str("  [envelope]   not evaluated (base conditions failed)\n"),
        }
        if let Some(sw) = &self.sandwich {
            t.push_str(&format!(
                "  [band]       |D_1...D_s| in [{}, {}] for every s : {}\n",
                dec(&sw.lo),
                dec(&sw.hi),
                verdict(sw.within_beta_third)
            ));
            t.push_str(&format!(
                "  [quotient]   (1-b/3)/(1+b/3) >= 1-b and (1+b/3)/(1-b/3) <= 1+b : {}\n",
                verdict(sw.quotient_ok)
            ));
        }
        if let Some(sep) = &self.separation {
            t.push_str(&format!(
                "  [separation] (1+beta)*a < 1-beta : {} < {} : {}\n",
                dec(&sep.lhs),
                dec(&sep.rhs),
                verdict(sep.ok)
            ));
        }
        t.push_str(&format!(
            "  => {}\n",
            if self.feasible {
                "certified: all zeros of theta(q,.) are simple for |q| <= a"
            } else {
                "NOT certified at these parameters"
            }
        ));
        t
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dto<'a> {
            a: String,
            u: String,
            beta: String,
            bounds_ok: bool,
            product_ok: bool,
            chain_ok: bool,
            chain_slack: Option<String>,
            band_lo: Option<String>,
            band_hi: Option<String>,
            quotient_ok: Option<bool>,
            separation_lhs: Option<String>,
            separation_rhs: Option<String>,
            separation_ok: Option<bool>,
            feasible: bool,
            #[serde(skip)]
            _marker: std::marker::PhantomData<&'a ()>,
        }
        let dto = Dto {
            a: self.params.a.to_string(),
            u: self.params.u.to_string(),
            beta: self.params.beta.to_string(),
            bounds_ok: self.conditions.bounds_ok,
            product_ok: self.conditions.product_ok,
            chain_ok: self.conditions.chain_ok,
            chain_slack: self.conditions.chain_slack.as_ref().map(|s| s.to_string()),
            band_lo: self.sandwich.as_ref().map(|s| s.lo.to_string()),
            band_hi: self.sandwich.as_ref().map(|s| s.hi.to_string()),
            quotient_ok: self.sandwich.as_ref().map(|s| s.quotient_ok),
            separation_lhs: self.separation.as_ref().map(|s| s.lhs.to_string()),
            separation_rhs: self.separation.as_ref().map(|s| s.rhs.to_string()),
            separation_ok: self.separation.as_ref().map(|s| s.ok),
            feasible: self.feasible,
            _marker: std::marker::PhantomData,
        };
        serde_json::to_string_pretty(&dto).expect("certificate serializes")
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "OK"
    } else {
        "FAIL"
    }
}

const COARSE_STEP_DEN: i64 = 1_000;
const FINE_STEP_DEN: i64 = 1_000_000;

/// Search for a witness u on a rational grid in (1, min(2, 1/a)): coarse
/// sweep at step 1e-3, then one refinement pass at step 1e-6 around the best
/// point. Returns the certificate at the best u found (feasible or not).
pub fn certify_disk(a: &BigRational) -> Certificate {
    assert!(a > &BigRational::zero());
    let one = BigRational::one();
    let two = rat(2, 1);
    let u_cap = if a >= &one {
        one.clone()
    } else {
        two.min(a.recip())
    };

    let coarse = rat(1, COARSE_STEP_DEN);
    let mut best_u: Option<(BigRational, BigRational)> = None;

    let mut k = 1i64;
    loop {
        let u = &one + &coarse * BigRational::from_integer(BigInt::from(k));
        if u >= u_cap {
            break;
        }
        consider_witness(a, u, &u_cap, &mut best_u);
        k += 1;
    }

    let center = best_u.as_ref().map(|(u, _)| u.clone());
    if let Some(center) = center {
        let fine = rat(1, FINE_STEP_DEN);
        let halfwindow = FINE_STEP_DEN / COARSE_STEP_DEN;
        for dk in -halfwindow..=halfwindow {
            let u = &center + &fine * BigRational::from_integer(BigInt::from(dk));
            consider_witness(a, u, &u_cap, &mut best_u);
        }
    }

    match best_u {
        Some((u, _)) => Certificate::evaluate(a.clone(), u),
        // No admissible u at all (e.g. a >= 1/3): report the chain at a
        // midpoint witness so the failure is visible in the transcript.
        None => Certificate::evaluate(a.clone(), rat(3, 2)),
    }
}

/// Feasibility score of a witness u: the smaller of the envelope slack and
/// the separation slack (both must end up nonnegative/positive).
fn consider_witness(
    a: &BigRational,
    u: BigRational,
    u_cap: &BigRational,
    best: &mut Option<(BigRational, BigRational)>,
) {
    let one = BigRational::one();
    if u <= one || &u >= u_cap {
        return;
    }
    let beta = &u - &one;
    if beta <= BigRational::zero() || beta >= one {
        return;
    }
    let cond = check_conditions(a, &u);
    let Some(slack7) = cond.chain_slack else {
        return;
    };
    let sep = separation_margin(a, &beta);
    let score = slack7.min(sep.slack);
    let better = match best {
        Some((_, best_score)) => score > *best_score,
        None => true,
    };
    if better {
        *best = Some((u, score));
    }
}

/// Largest grid multiple of `grid_step` whose disk certifies. Feasibility is
/// monotone in a (every inequality in the chain tightens as a grows), so a
/// bisection over grid indices is exact. Returns 0 if no grid point works.
pub fn max_certified_radius(grid_step: &BigRational) -> BigRational {
    assert!(grid_step > &BigRational::zero());
    let third = rat(1, 3);
    // k_hi: first index at or past 1/3, never feasible there.
    let mut lo: i64 = 0;
    let mut hi: i64 = 1;
    while BigRational::from_integer(BigInt::from(hi)) * grid_step < third {
        hi *= 2;
    }
    let feasible = |k: i64| -> bool {
        if k == 0 {
            return true;
        }
        let a = BigRational::from_integer(BigInt::from(k)) * grid_step;
        if a >= third {
            return false;
        }
        certify_disk(&a).feasible
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BigRational::from_integer(BigInt::from(lo)) * grid_step
}
