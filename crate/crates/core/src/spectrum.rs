//! Real-q spectrum: the values q̃_1 < q̃_2 < ... < 1 at which θ(q,·) acquires
//! a real double zero, located by sign-change counting plus a two-dimensional
//! Newton polish on F(q,x) = (θ, θ_x).
//!
//! Counting works on the normalized profile g(r) = θ(q,-r) / Σ|terms|, which
//! is O(1) mid-band and dips to the roundoff floor at zeros, so sign changes
//! and near-tangencies are detected on the same scale at every depth. A
//! same-sign dip that keeps descending below the resolution floor is the
//! collision signature and is reported as `Inconclusive`.
//!
//! The Newton polish runs in double-double arithmetic (the fold is
//! quadratically degenerate in x alone; the (θ, θ_x) system is regular at the
//! fold since θ_q·θ_xx ≠ 0, and the extra precision buys residuals far below
//! the certificate targets).

use crate::dd::Dd;
use crate::eval::{theta_jet_dd, theta_real_with_scale};
use serde::Serialize;

/// Same-sign local minima of |g| above this level are plateau artifacts, not
/// candidate hidden pairs.
const DIP_TRIGGER: f64 = 0.5;
/// Normalized |g| below which an unresolved dip is declared inconclusive.
const INCONCLUSIVE_FLOOR: f64 = 1e-11;
/// Profile density per geometric band ln(1/q).
const PER_BAND: usize = 48;
/// Bisection stops at this bracket width and hands over to Newton.
const BISECT_WIDTH: f64 = 1e-5;
/// Fixed outer modulus for spectral scanning; every collision happens at
/// |x| < e^π ≈ 23.14, comfortably inside.
const SCAN_MODULUS_CAP: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("cannot resolve zero count near q = {q}, x in [{x_lo}, {x_hi}] (near-double zero)")]
    Inconclusive { q: f64, x_lo: f64, x_hi: f64 },
    #[error("bracket [{q_lo}, {q_hi}] does not straddle a count drop for index {index}")]
    BracketInvalid { index: usize, q_lo: f64, q_hi: f64 },
    #[error("fold Newton stalled near q = {q}")]
    NewtonStall { q: f64 },
    #[error("asymptotic report needs at least 3 points, got {got}")]
    TooFewPoints { got: usize },
    #[error("q = {q} outside the supported open interval (0, 0.99)")]
    OutOfRange { q: f64 },
}

/// A located spectral point: θ(q̃,·) has a double real zero at x̃.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralPoint {
    pub index: usize,
    pub q_tilde: f64,
    pub x_double: f64,
    /// |θ| + |θ_x| at the converged iterate.
    pub newton_residual: f64,
    pub theta_abs: f64,
    pub theta_x_abs: f64,
    /// |θ_xx| at the point; bounded away from zero means multiplicity
    /// exactly 2.
    pub theta_xx_abs: f64,
}

#[inline]
fn g_norm(q: f64, r: f64) -> f64 {
    let (v, s) = theta_real_with_scale(q, r);
    v / s
}

/// Bisect a sign change of g on [lo, hi] down to relative width ~1e-13.
fn bisect_zero(q: f64, mut lo: f64, mut hi: f64, mut glo: f64) -> f64 {
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        let gm = g_norm(q, mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    (lo * hi).sqrt()
}

/// Inspect a same-sign |g| valley for a hidden pair of zeros. Zooms toward
/// the minimum until either two sign changes resolve (a real pair), the
/// minimum stops shrinking above the floor (no zeros: the pair is complex or
/// the valley is benign), or it descends below the floor unresolved
/// (`Inconclusive`: numerically a double zero).
fn resolve_dip(q: f64, mut lo: f64, mut hi: f64) -> Result<Vec<f64>, SpectrumError> {
    const SUB: usize = 16;
    let mut prev_round_min = f64::INFINITY;
    for _round in 0..60 {
        let lt = (hi / lo).ln();
        let mut best = (f64::INFINITY, (lo * hi).sqrt());
        let mut prev_r = lo;
        let mut prev_g = g_norm(q, lo);
        for i in 1..=SUB {
            let r = lo * (lt * i as f64 / SUB as f64).exp();
            let g = g_norm(q, r);
            if (g > 0.0) != (prev_g > 0.0) {
                // First crossing; its partner lies where g recovers sign.
                let z1 = bisect_zero(q, prev_r, r, prev_g);
                let mut r2 = r;
                let mut g2 = g;
                let mut found = None;
                for k in 1..=SUB {
                    let rr = r * ((hi / r).ln() * k as f64 / SUB as f64).exp();
                    let gg = g_norm(q, rr);
                    if (gg > 0.0) != (g2 > 0.0) {
                        found = Some(bisect_zero(q, r2, rr, g2));
                        break;
                    }
                    r2 = rr;
                    g2 = gg;
                }
                let z2 = found.ok_or(SpectrumError::Inconclusive {
                    q,
                    x_lo: -hi,
                    x_hi: -lo,
                })?;
                return Ok(vec![z1, z2]);
            }
            if g.abs() < best.0 {
                best = (g.abs(), r);
            }
            prev_r = r;
            prev_g = g;
        }
        if best.0 < INCONCLUSIVE_FLOOR {
            return Err(SpectrumError::Inconclusive {
                q,
                x_lo: -hi,
                x_hi: -lo,
            });
        }
        // A real pair shrinks the minimum by ~(SUB/4)^2 per zoom; once the
        // minimum stagnates the valley has bottomed out with no zeros.
        if best.0 > 0.3 * prev_round_min {
            return Ok(Vec::new());
        }
        prev_round_min = best.0;
        let center = best.1;
        let cell = (lt / SUB as f64).exp();
        lo = (center / cell.powi(2)).max(lo);
        hi = (center * cell.powi(2)).min(hi);
        if (hi / lo).ln() < 1e-12 {
            return Ok(Vec::new());
        }
    }
    Ok(Vec::new())
}

/// All real zeros x = -r of θ(q,·) with modulus in [m_lo, m_hi], as moduli in
/// increasing order. Sign counting on a log grid plus dip resolution.
fn profile_zeros(q: f64, m_lo: f64, m_hi: f64) -> Result<Vec<f64>, SpectrumError> {
    assert!(m_lo > 0.0 && m_hi > m_lo);
    let band = (1.0 / q).ln();
    let total = (m_hi / m_lo).ln();
    let npts = (((total / band) * PER_BAND as f64).ceil() as usize).max(48) + 1;
    let rs: Vec<f64> = (0..npts)
        .map(|i| m_lo * (total * i as f64 / (npts - 1) as f64).exp())
        .collect();
    let gs: Vec<f64> = rs.iter().map(|&r| g_norm(q, r)).collect();

    let mut zeros = Vec::new();
    let mut crossing_cell = vec![false; npts - 1];
    for i in 0..npts - 1 {
        if (gs[i] > 0.0) != (gs[i + 1] > 0.0) {
            crossing_cell[i] = true;
            zeros.push(bisect_zero(q, rs[i], rs[i + 1], gs[i]));
        }
    }

    // Same-sign local minima of |g| may hide an unresolved pair. Between two
    // simple zeros |g| is unimodal, so interior minima away from crossing
    // cells only appear where a pair lurks; checking minima (rather than an
    // absolute smallness cut) keeps detection independent of grid phase.
    for i in 1..npts - 1 {
        if crossing_cell[i - 1] || crossing_cell[i] {
            continue;
        }
        let (a0, a1, a2) = (gs[i - 1].abs(), gs[i].abs(), gs[i + 1].abs());
        let local_min = a1 < a0 && a1 <= a2;
        if !local_min || a1 >= DIP_TRIGGER {
            continue;
        }
        let found = resolve_dip(q, rs[i - 1], rs[i + 1])?;
        zeros.extend(found);
    }
    zeros.sort_by(f64::total_cmp);
    Ok(zeros)
}

/// Default real window covering the first `n` ansatz zeros of θ(q,·).
pub fn default_window(q: f64, n: usize) -> (f64, f64) {
    (-q.powf(-(n as f64 + 0.5)), -0.5 * q.powf(-0.5))
}

/// Count the real zeros of θ(q,·) inside a negative real window. Exact for
/// simple well-separated zeros; near-tangent pairs inside one refinement cell
/// raise `Inconclusive` — that is the collision detector.
pub fn count_real_zeros(
    q: f64,
    window: (f64, f64),
    n_probe: usize,
) -> Result<usize, SpectrumError> {
    if !(q > 0.0 && q < 0.99) {
        return Err(SpectrumError::OutOfRange { q });
    }
    let (x_lo, x_hi) = window;
    assert!(x_lo < x_hi && x_hi <= 0.0, "window must be negative reals");
    assert!(n_probe >= 1);
    // No zeros with |qx| <= 0.2: |θ - 1| < 0.3 there.
    let m_lo = (-x_hi).max(0.2 / q);
    let m_hi = -x_lo;
    if m_hi <= m_lo {
        return Ok(0);
    }
    Ok(profile_zeros(q, m_lo, m_hi)?.len())
}

/// The rightmost real zeros (smallest moduli first) up to the fixed scan cap.
fn rightmost_zeros(q: f64) -> Result<Vec<f64>, SpectrumError> {
    profile_zeros(q, 0.2 / q, SCAN_MODULUS_CAP)
}

/// Locate q̃ for spectral index `j` inside a bracket known to straddle the
/// count drop: bisection on the anchored rightmost-pair count, then a
/// double-double Newton polish on (θ, θ_x) = 0.
pub fn find_spectral(
    j: usize,
    q_bracket: (f64, f64),
    tol: f64,
) -> Result<SpectralPoint, SpectrumError> {
    let (mut q_lo, mut q_hi) = q_bracket;
    assert!(j >= 1);
    assert!(0.0 < q_lo && q_lo < q_hi && q_hi < 0.99, "bad bracket");
    assert!(tol > 0.0);
    let invalid = || SpectrumError::BracketInvalid {
        index: j,
        q_lo: q_bracket.0,
        q_hi: q_bracket.1,
    };

    // Anchor: a fixed modulus separating the merging pair from the next
    // deeper zero, chosen once from the below-side profile.
    let below = rightmost_zeros(q_lo)?;
    if below.len() < 3 {
        return Err(invalid());
    }
    let anchor = (below[1] * below[2]).sqrt();
    let zeros_below = |q: f64| -> Result<Vec<f64>, SpectrumError> {
        profile_zeros(q, 0.2 / q, anchor)
    };

    let c_lo = zeros_below(q_lo)?.len();
    let c_hi = zeros_below(q_hi)?.len();
    if c_lo < 2 || c_lo != c_hi + 2 {
        return Err(invalid());
    }

    let mut pair = (below[0], below[1]);
    while q_hi - q_lo > BISECT_WIDTH {
        let mid = 0.5 * (q_lo + q_hi);
        match zeros_below(mid) {
            Ok(z) if z.len() == c_lo => {
                q_lo = mid;
                pair = (z[z.len() - 2], z[z.len() - 1]);
            }
            Ok(z) if z.len() == c_hi => q_hi = mid,
            Ok(_) => return Err(invalid()),
            // The dip refuses to resolve: we are numerically on top of the
            // fold, which is exactly where Newton wants to start.
            Err(SpectrumError::Inconclusive { .. }) => {
                q_lo = mid - 0.5 * BISECT_WIDTH;
                q_hi = mid + 0.5 * BISECT_WIDTH;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let q0 = 0.5 * (q_lo + q_hi);
    let x0 = -0.5 * (pair.0 + pair.1);
    let point = fold_newton(j, q0, x0)?;

    // The polished point must stay inside the original bracket (with the
    // bisection slack).
    if point.q_tilde < q_bracket.0 - BISECT_WIDTH || point.q_tilde > q_bracket.1 + BISECT_WIDTH {
        return Err(invalid());
    }
    if point.newton_residual > tol {
        return Err(SpectrumError::NewtonStall { q: point.q_tilde });
    }
    Ok(point)
}

/// Double-double Newton on F(q,x) = (θ, θ_x).
fn fold_newton(index: usize, q0: f64, x0: f64) -> Result<SpectralPoint, SpectrumError> {
    let mut q = Dd::from_f64(q0);
    let mut x = Dd::from_f64(x0);
    let mut converged = false;
    for _ in 0..80 {
        if !(q.to_f64() > 0.005 && q.to_f64() < 0.995 && x.to_f64() < -1e-9) {
            return Err(SpectrumError::NewtonStall { q: q.to_f64() });
        }
        let jet = theta_jet_dd(q, x);
        let det = jet.fx * jet.fxq - jet.fq * jet.fxx;
        if det.to_f64() == 0.0 {
            return Err(SpectrumError::NewtonStall { q: q.to_f64() });
        }
        // Solve [fx fq; fxx fxq] (dx, dq)^T = (f, fx)^T by Cramer.
        let dx = (jet.f * jet.fxq - jet.fq * jet.fx) / det;
        let dq = (jet.fx * jet.fx - jet.f * jet.fxx) / det;
        x = x - dx;
        q = q - dq;
        let step = dx.to_f64().abs() / x.to_f64().abs() + dq.to_f64().abs() / q.to_f64();
        if step < 1e-25 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpectrumError::NewtonStall { q: q.to_f64() });
    }
    let jet = theta_jet_dd(q, x);
    let theta_abs = jet.f.abs().to_f64();
    let theta_x_abs = jet.fx.abs().to_f64();
    Ok(SpectralPoint {
        index,
        q_tilde: q.to_f64(),
        x_double: x.to_f64(),
        newton_residual: theta_abs + theta_x_abs,
        theta_abs,
        theta_x_abs,
        theta_xx_abs: jet.fxx.abs().to_f64(),
    })
}

/// Sweep q upward and bracket the first `j_max` count drops. Entries of
/// deeper zeros into the fixed scan window change the count by +1 and are
/// ignored; drops of 2 are collisions. An ambiguous -1 step (entry and
/// collision in the same stride) is re-scanned at a tenth of the stride.
pub fn scan_brackets(j_max: usize) -> Result<Vec<(f64, f64)>, SpectrumError> {
    assert!(j_max >= 1);
    let mut brackets = Vec::with_capacity(j_max);
    scan_range(0.26, 0.97, 1e-3, 0, &mut brackets, j_max)?;
    if brackets.len() < j_max {
        return Err(SpectrumError::BracketInvalid {
            index: brackets.len() + 1,
            q_lo: 0.26,
            q_hi: 0.97,
        });
    }
    brackets.truncate(j_max);
    Ok(brackets)
}

fn scan_range(
    q_from: f64,
    q_to: f64,
    step: f64,
    depth: usize,
    brackets: &mut Vec<(f64, f64)>,
    j_max: usize,
) -> Result<(), SpectrumError> {
    let mut q_prev = q_from;
    let mut c_prev = match rightmost_zeros(q_prev) {
        Ok(z) => z.len() as i64,
        Err(SpectrumError::Inconclusive { .. }) => {
            // Start point sits on a fold; nudge.
            q_prev += step * 1e-2;
            rightmost_zeros(q_prev)?.len() as i64
        }
        Err(e) => return Err(e),
    };
    let mut q = q_prev;
    while q < q_to && brackets.len() < j_max {
        q = (q + step).min(q_to);
        let c = match rightmost_zeros(q) {
            Ok(z) => z.len() as i64,
            Err(SpectrumError::Inconclusive { .. }) => {
                // Scan point landed on the fold itself: record the bracket.
                brackets.push((q_prev, (q + step).min(q_to)));
                q_prev = (q + step).min(q_to);
                c_prev -= 2;
                q = q_prev;
                continue;
            }
            Err(e) => return Err(e),
        };
        match c - c_prev {
            0 | 1 => {}
            -2 => brackets.push((q_prev, q)),
            _ => {
                // Mixed events inside one stride: refine locally.
                if depth >= 3 {
                    return Err(SpectrumError::Inconclusive {
                        q,
                        x_lo: -SCAN_MODULUS_CAP,
                        x_hi: 0.0,
                    });
                }
                scan_range(q_prev, q, step / 10.0, depth + 1, brackets, j_max)?;
            }
        }
        c_prev = c;
        q_prev = q;
    }
    Ok(())
}

/// Brackets plus polish for spectral indices 1..=j_max.
pub fn spectrum_table(j_max: usize, tol: f64) -> Result<Vec<SpectralPoint>, SpectrumError> {
    let brackets = scan_brackets(j_max)?;
    let mut points = Vec::with_capacity(j_max);
    for (j, &(lo, hi)) in brackets.iter().enumerate() {
        points.push(find_spectral(j + 1, (lo, hi), tol)?);
    }
    for pair in points.windows(2) {
        assert!(
            pair[0].q_tilde < pair[1].q_tilde,
            "spectral values must increase"
        );
    }
    Ok(points)
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub index: usize,
    pub q_tilde: f64,
    /// j (1 - q̃_j); the limit law says this tends to π/2.
    pub j_times_gap: f64,
    pub x_double: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub rows: Vec<AsymptoticRow>,
    /// j(1-q̃_j) strictly increasing toward π/2 while staying below it.
    pub gap_trend_ok: bool,
    /// x̃_j strictly decreasing toward -e^π.
    pub x_trend_ok: bool,
    /// No x̃_j overshoots -e^π by more than the solver tolerance.
    pub x_above_limit: bool,
}

/// Trend table for the limit laws q̃_j = 1 - π/(2j) + o(1/j) and x̃_j → -e^π.
/// Trends only; the little-o carries no fixed tolerance.
pub fn asymptotic_report(points: &[SpectralPoint]) -> Result<AsymptoticReport, SpectrumError> {
    if points.len() < 3 {
        return Err(SpectrumError::TooFewPoints { got: points.len() });
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let neg_e_pi = -std::f64::consts::PI.exp();
    let rows: Vec<AsymptoticRow> = points
        .iter()
        .map(|p| AsymptoticRow {
            index: p.index,
            q_tilde: p.q_tilde,
            j_times_gap: p.index as f64 * (1.0 - p.q_tilde),
            x_double: p.x_double,
        })
        .collect();
    let gap_trend_ok = rows
        .windows(2)
        .all(|w| w[0].j_times_gap < w[1].j_times_gap && w[1].j_times_gap < half_pi);
    let x_trend_ok = rows.windows(2).all(|w| w[1].x_double < w[0].x_double);
    let x_above_limit = rows.iter().all(|r| r.x_double > neg_e_pi - 1e-6);
    Ok(AsymptoticReport {
        rows,
        gap_trend_ok,
        x_trend_ok,
        x_above_limit,
    })
}

/// CSV emission of the asymptotics table.
pub fn asymptotics_csv(report: &AsymptoticReport) -> String {
    let mut out = String::from("j,q_tilde,j_times_one_minus_q,x_double\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.index, r.q_tilde, r.j_times_gap, r.x_double
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_below_first_spectral_value_are_full() {
        // q = 0.2 is deep in the hyperbolic range: all six probed zeros real.
        let n = count_real_zeros(0.2, default_window(0.2, 6), 6).unwrap();
        assert_eq!(n, 6);
    }

    #[test]
    fn count_drops_by_two_across_first_collision() {
        let at_030 = count_real_zeros(0.30, default_window(0.30, 6), 6).unwrap();
        let at_032 = count_real_zeros(0.32, default_window(0.32, 6), 6).unwrap();
        assert_eq!(at_030, 6);
        assert_eq!(at_032, 4);
    }

    #[test]
    fn tiny_q_matches_ansatz_count() {
        for n in 2..=4 {
            let c = count_real_zeros(0.05, default_window(0.05, n), n).unwrap();
            assert_eq!(c, n);
        }
    }

    #[test]
    fn out_of_range_q_rejected() {
        assert!(matches!(
            count_real_zeros(0.0, (-10.0, 0.0), 2),
            Err(SpectrumError::OutOfRange { .. })
        ));
        assert!(matches!(
            count_real_zeros(0.995, (-10.0, 0.0), 2),
            Err(SpectrumError::OutOfRange { .. })
        ));
    }

    /// The first spectral value, frozen to the digits the solver reproduces:
    /// q̃_1 = 0.3092493386... with the double zero the rightmost real zero.
    #[test]
    fn first_spectral_value() {
        let p = find_spectral(1, (0.30, 0.315), 1e-12).unwrap();
        assert!(
            (p.q_tilde - 0.3092493386).abs() < 1e-8,
            "q~1 = {}",
            p.q_tilde
        );
        assert!(p.theta_abs <= 1e-10 && p.theta_x_abs <= 1e-10);
        assert!(p.theta_xx_abs > 1e-3, "fold must be nondegenerate");
        assert!(p.x_double < 0.0);
        // The double zero is the rightmost real zero: just below q̃ the
        // about-to-merge pair straddles x̃ and nothing sits closer to the
        // origin.
        let q_below = p.q_tilde - 2e-3;
        let near = count_real_zeros(q_below, (p.x_double * 1.15, 0.0), 2).unwrap();
        assert_eq!(near, 2, "the merging pair brackets x_double");
        let inner = count_real_zeros(q_below, (p.x_double * 0.9, 0.0), 2).unwrap();
        assert_eq!(inner, 0, "no real zero inside the double-zero modulus");
    }

    #[test]
    fn invalid_bracket_detected() {
        // No collision inside (0.1, 0.2).
        let err = find_spectral(1, (0.1, 0.2), 1e-10).unwrap_err();
        assert!(matches!(err, SpectrumError::BracketInvalid { .. }));
    }

    #[test]
    fn asymptotic_report_needs_three_points() {
        let p = SpectralPoint {
            index: 1,
            q_tilde: 0.3,
            x_double: -7.0,
            newton_residual: 0.0,
            theta_abs: 0.0,
            theta_x_abs: 0.0,
            theta_xx_abs: 1.0,
        };
        assert!(matches!(
            asymptotic_report(&[p, p]),
            Err(SpectrumError::TooFewPoints { got: 2 })
        ));
    }
}
