//! Certified evaluation of the partial theta function
//! `θ(q,x) = Σ_{j≥0} q^{j(j+1)/2} x^j`, its x-derivative, and the
//! reconstruction from a finite zero list.
//!
//! Every truncated sum comes with a rigorous tail bound: once the term ratio
//! `|q|^{j+1}|x|` (times a small coefficient-growth factor) is at most 1/2,
//! the discarded tail is dominated by a geometric series and bounded by twice
//! the first discarded term. The bound is true for exact arithmetic on the
//! summed terms; roundoff of the ~N summed f64 terms is separate and tiny at
//! the magnitudes this library works with.

use crate::dd::Dd;
use crate::zeros::ZeroSet;
use num_complex::Complex64;

/// Triangular number `j(j+1)/2` as f64 (exact well past any term count used here).
#[inline]
fn tri(n: usize) -> f64 {
    (n as f64) * (n as f64 + 1.0) / 2.0
}

/// `a * ln(y)` with the convention `0 * ln(0) = 0`.
#[inline]
fn xlny(a: f64, y: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * y.ln()
    }
}

/// Inflate `2·exp(l)` slightly so exp/log roundoff cannot understate the tail.
#[inline]
fn bound_from_ln(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        0.0
    } else {
        2.0 * l.exp() * (1.0 + 1e-9) + 1e-300
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    /// Partial sum of the defining series.
    pub value: Complex64,
    /// Rigorous upper bound on the modulus of the discarded tail.
    pub tail_bound: f64,
    /// Number of terms summed.
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Hard cap on |q|; the series diverges at |q| = 1.
    pub q_modulus_cap: f64,
    /// Cap on the number of summed terms before giving up on `tol`.
    pub term_ceiling: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            q_modulus_cap: 0.99,
            term_ceiling: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("|q| = {q_abs} exceeds the divergence cap {cap}")]
    DivergenceDomain { q_abs: f64, cap: f64 },
    #[error("tolerance not reachable within {ceiling} terms")]
    ToleranceUnreachable { ceiling: usize },
    #[error("product reconstruction needs a nonempty zero set")]
    EmptyZeroSet,
}

/// Pick the number of terms `n` (tail starts at term index `n`) such that
/// the geometric majorant applies from index `n` on and the resulting tail
/// bound is at most `tol`. `ratio_c` majorizes the coefficient growth of the
/// particular series (1 for θ, 2 for θ_x).
fn plan_terms(
    aq: f64,
    ax: f64,
    ratio_c: f64,
    tol: f64,
    floor: usize,
    ceiling: usize,
    ln_tail_term: impl Fn(usize) -> f64,
) -> Result<usize, EvalError> {
    let mut n = floor;
    // Ratio condition: ratio_c * aq^{n+1} * ax <= 1/2 for all later indices.
    if aq > 0.0 && ax > 0.0 {
        let target = (0.5 / (ratio_c * ax)).ln();
        if target < 0.0 {
            // aq^{n+1} must be small: n+1 >= target/ln(aq).
            let need = (target / aq.ln()).ceil();
            if need.is_finite() && need > n as f64 + 1.0 {
                n = need as usize;
            }
        }
    }
    while bound_from_ln(ln_tail_term(n)) > tol {
        n += 1;
        if n > ceiling {
            return Err(EvalError::ToleranceUnreachable { ceiling });
        }
    }
    Ok(n)
}

/// θ(q, x) summed to a guaranteed tail bound of at most `tol`.
pub fn eval_theta(q: Complex64, x: Complex64, tol: f64) -> Result<EvalResult, EvalError> {
    eval_theta_opts(q, x, tol, &EvalOptions::default())
}

pub fn eval_theta_opts(
    q: Complex64,
    x: Complex64,
    tol: f64,
    opts: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(opts.q_modulus_cap < 1.0, "cap must be below 1");
    let aq = q.norm();
    let ax = x.norm();
    if aq > opts.q_modulus_cap {
        return Err(EvalError::DivergenceDomain {
            q_abs: aq,
            cap: opts.q_modulus_cap,
        });
    }
    let n = plan_terms(aq, ax, 1.0, tol, 1, opts.term_ceiling, |n| {
        xlny(tri(n), aq) + xlny(n as f64, ax)
    })?;
    Ok(sum_theta(q, x, n))
}

/// θ(q, x) with an explicit number of terms. The tail bound is the geometric
/// majorant when it applies at `n`, and `+∞` otherwise; it is nonincreasing
/// in `n` for fixed `(q, x)`.
pub fn eval_theta_terms(q: Complex64, x: Complex64, n: usize) -> EvalResult {
    assert!(n >= 1);
    let mut r = sum_theta(q, x, n);
    let aq = q.norm();
    let ax = x.norm();
    if aq.powi(n as i32 + 1) * ax > 0.5 {
        r.tail_bound = f64::INFINITY;
    }
    r
}

fn sum_theta(q: Complex64, x: Complex64, n: usize) -> EvalResult {
    let aq = q.norm();
    let ax = x.norm();
    let mut value = Complex64::new(1.0, 0.0); // j = 0 term
    let mut term = Complex64::new(1.0, 0.0);
    let mut qp = q; // q^{j+1} entering the update to term j+1
    for _ in 1..n {
        term *= qp * x;
        value += term;
        qp *= q;
    }
    let tail = bound_from_ln(xlny(tri(n), aq) + xlny(n as f64, ax));
    EvalResult {
        value,
        tail_bound: tail,
        terms_used: n,
    }
}

/// ∂θ/∂x(q, x) = Σ_{j≥1} j q^{j(j+1)/2} x^{j-1}, with its own tail majorant.
pub fn eval_dtheta_dx(q: Complex64, x: Complex64, tol: f64) -> Result<EvalResult, EvalError> {
    eval_dtheta_dx_opts(q, x, tol, &EvalOptions::default())
}

pub fn eval_dtheta_dx_opts(
    q: Complex64,
    x: Complex64,
    tol: f64,
    opts: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let aq = q.norm();
    let ax = x.norm();
    if aq > opts.q_modulus_cap {
        return Err(EvalError::DivergenceDomain {
            q_abs: aq,
            cap: opts.q_modulus_cap,
        });
    }
    // Term ratio ((j+1)/j)|q|^{j+1}|x| <= 2|q|^{j+1}|x| for j >= 1.
    let n = plan_terms(aq, ax, 2.0, tol, 2, opts.term_ceiling, |n| {
        (n as f64).ln() + xlny(tri(n), aq) + xlny(n as f64 - 1.0, ax)
    })?;
    let mut value = q; // j = 1 term: 1 * q^1 * x^0
    let mut term = q;
    let mut qp = q * q; // q^{j+1} entering the update to term j+1
    for j in 1..n - 1 {
        term *= qp * x;
        term *= (j as f64 + 1.0) / (j as f64);
        value += term;
        qp *= q;
    }
    let tail = bound_from_ln((n as f64).ln() + xlny(tri(n), aq) + xlny(n as f64 - 1.0, ax));
    Ok(EvalResult {
        value,
        tail_bound: tail,
        terms_used: n - 1,
    })
}

/// Finite-product reconstruction `Π_j (1 + x/ξ_j)` over a located zero set.
///
/// The truncation of the infinite product converges fast because
/// `|1/ξ_j| ≈ |q|^j`; the caller compares against [`eval_theta`].
pub fn eval_product(x: Complex64, zeros: &ZeroSet) -> Result<Complex64, EvalError> {
    if zeros.entries.is_empty() {
        return Err(EvalError::EmptyZeroSet);
    }
    let mut p = Complex64::new(1.0, 0.0);
    for e in &zeros.entries {
        p *= Complex64::new(1.0, 0.0) + x / e.xi;
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// High-precision mode (double-double, ~106 bits) for real arguments.
// ---------------------------------------------------------------------------

/// θ and the partial derivatives needed by the fold solver, all at once:
/// value, θ_x, θ_xx, θ_q, θ_xq, for real `q ∈ (0,1)`, real `x != 0`.
#[derive(Debug, Clone, Copy)]
pub struct ThetaJet {
    pub f: Dd,
    pub fx: Dd,
    pub fxx: Dd,
    pub fq: Dd,
    pub fxq: Dd,
    pub terms: usize,
}

/// Double-double jet evaluation. Terms are added in ascending order until the
/// current term (with full polynomial coefficient growth margin) falls below
/// the double-double epsilon relative to the largest term seen.
pub fn theta_jet_dd(q: Dd, x: Dd) -> ThetaJet {
    let aq = q.abs().to_f64();
    assert!(aq > 0.0 && aq < 1.0, "jet needs 0 < |q| < 1");
    assert!(!x.is_zero(), "jet needs x != 0");

    let mut f = Dd::ONE; // j = 0
    let mut fx = Dd::ZERO;
    let mut fxx = Dd::ZERO;
    let mut fq = Dd::ZERO;
    let mut fxq = Dd::ZERO;

    let mut term = Dd::ONE; // q^{T_j} x^j, currently j = 0
    let mut qp = q; // q^{j+1} entering the update to term j+1
    let mut peak = 1.0f64;
    let mut j = 0usize;
    loop {
        j += 1;
        term = term * qp * x;
        qp = qp * q;
        let jf = Dd::from_int(j as i64);
        let tj = Dd::from_int((j * (j + 1) / 2) as i64);
        let t_over_x = term / x;
        let t_over_q = term / q;
        f = f + term;
        fx = fx + t_over_x * jf;
        fxx = fxx + (t_over_x / x) * jf * Dd::from_int(j as i64 - 1);
        fq = fq + t_over_q * tj;
        fxq = fxq + (t_over_q / x) * jf * tj;

        let at = term.to_f64().abs();
        peak = peak.max(at);
        let growth = ((j + 2) * (j + 2)) as f64;
        let ratio_next = qp.to_f64().abs() * x.to_f64().abs();
        if at * growth <= peak * 1e-35 && ratio_next * 3.0 <= 0.5 {
            break;
        }
        assert!(j < 20_000, "jet failed to converge (|q| too close to 1?)");
    }
    ThetaJet {
        f,
        fx,
        fxx,
        fq,
        fxq,
        terms: j + 1,
    }
}

/// High-precision θ for real arguments, with the same tail contract as
/// [`eval_theta`]. Used by the CLI when more than 53 bits are requested.
pub fn eval_theta_dd(q: Dd, x: Dd, tol: f64, opts: &EvalOptions) -> Result<(Dd, f64, usize), EvalError> {
    assert!(tol > 0.0);
    let aq = q.abs().to_f64();
    let ax = x.abs().to_f64();
    if aq > opts.q_modulus_cap {
        return Err(EvalError::DivergenceDomain {
            q_abs: aq,
            cap: opts.q_modulus_cap,
        });
    }
    let n = plan_terms(aq, ax, 1.0, tol, 1, opts.term_ceiling, |n| {
        xlny(tri(n), aq) + xlny(n as f64, ax)
    })?;
    let mut value = Dd::ONE;
    let mut term = Dd::ONE;
    let mut qp = q;
    for _ in 1..n {
        term = term * qp * x;
        value = value + term;
        qp = qp * q;
    }
    let tail = bound_from_ln(xlny(tri(n), aq) + xlny(n as f64, ax));
    Ok((value, tail, n))
}

/// θ(q, -r) for real q ∈ (0,1), r > 0, together with the sum of the absolute
/// values of the summed terms. The second component is the natural scale for
/// deciding whether a computed value is "small": near a zero the alternating
/// series cancels and |θ| / scale dips toward the roundoff floor.
pub fn theta_real_with_scale(q: f64, r: f64) -> (f64, f64) {
    debug_assert!(q > 0.0 && q < 1.0 && r >= 0.0);
    let mut value = 1.0f64;
    let mut scale = 1.0f64;
    let mut term = 1.0f64; // signed term at x = -r
    let mut qp = q;
    let mut j = 0usize;
    loop {
        j += 1;
        term *= -(qp * r);
        let aterm = term.abs();
        value += term;
        scale += aterm;
        qp *= q;
        if aterm <= scale * 1e-19 && qp * r <= 0.5 {
            break;
        }
        if j > 100_000 {
            break;
        }
    }
    (value, scale)
}
