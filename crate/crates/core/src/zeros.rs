//! Numerical localization of the zeros `-ξ_j` of θ(q,·).
//!
//! Zeros are seeded from the geometric-progression ansatz `1/ξ_j = q^j Δ_j`
//! with Δ_j taken from the solved correction-factor table, then refined by
//! damped Newton. Refinement runs in the rescaled coordinate `w = q^j x`:
//!
//! ```text
//! Θ_j(q, w) := q^{j(j-1)/2} θ(q, q^{-j} w)
//!            = Σ_{k=1..j} q^{k(k-1)/2} w^{j-k}  +  w^j θ(q, w),
//! ```
//!
//! whose terms stay O(1) near the j-th zero (w ≈ -1/Δ_j). The reported
//! `residual` is `|Θ_j|` at the returned zero. The raw value |θ(q, -ξ_j)| is
//! `|q|^{-j(j-1)/2}` times larger — and so is the magnitude the series' own
//! terms reach there, which means no fixed-precision evaluation can certify a
//! small absolute residual for deeper zeros. The scaled residual is the
//! meaningful zero-quality metric: it bounds the relative error of the
//! back-solved Δ_j.

use crate::delta::{solve_delta, DeltaError, DeltaTable};
use crate::eval::{eval_dtheta_dx, eval_theta, EvalError};
use num_complex::Complex64;

/// Truncation order of the Δ series used for Newton seeds.
pub const DEFAULT_SEED_ORDER: usize = 20;

const NEWTON_ITER_CAP: usize = 60;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZerosError {
    #[error("|q| = {q_abs} outside the supported range (0, 0.9]")]
    QOutOfRange { q_abs: f64 },
    #[error("Newton stalled on zero index {index} (residual {residual:.3e}); ansatz breakdown, q may be near or past a spectral value")]
    NewtonStall { index: usize, residual: f64 },
    #[error("separation report needs at least two zeros")]
    TooFewZeros,
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One located zero `-ξ_j`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroEntry {
    /// ξ_j; the zero of θ(q,·) is at x = -ξ_j.
    pub xi: Complex64,
    /// |Θ_j| at the accepted iterate (scaled residual, see module docs).
    pub residual: f64,
    /// Back-solved correction factor Δ_j = 1/(q^j ξ_j).
    pub delta: Complex64,
    /// Forward-error estimate on the zero location (same units as ξ).
    pub err_bound: f64,
}

/// Ordered zero list for one value of q (increasing |ξ_j|).
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub q: Complex64,
    pub entries: Vec<ZeroEntry>,
}

impl ZeroSet {
    pub fn count(&self) -> usize {
        self.entries.len()
    }
}

/// Scaled series Θ_j and its w-derivative; returns (value, derivative, tail).
fn theta_shifted(
    q: Complex64,
    w: Complex64,
    j: usize,
    inner_tol: f64,
) -> Result<(Complex64, Complex64, f64), EvalError> {
    debug_assert!(j >= 1);
    let one = Complex64::new(1.0, 0.0);
    // Head: Σ_{k=1..j} q^{k(k-1)/2} w^{j-k}, built from w-powers downward.
    let mut wpow = vec![one; j];
    for i in 1..j {
        wpow[i] = wpow[i - 1] * w; // wpow[i] = w^i
    }
    let mut head = Complex64::new(0.0, 0.0);
    let mut dhead = Complex64::new(0.0, 0.0);
    let mut qtri = one; // q^{T(k)}, T(k) = k(k-1)/2
    let mut qk = q; // q^k
    for k in 1..=j {
        head += qtri * wpow[j - k];
        if j - k >= 1 {
            dhead += qtri * wpow[j - k - 1] * ((j - k) as f64);
        }
        qtri *= qk; // T(k+1) = T(k) + k
        qk *= q;
    }
    let th = eval_theta(q, w, inner_tol)?;
    let thx = eval_dtheta_dx(q, w, inner_tol)?;
    let wj1 = wpow[j - 1]; // w^{j-1}
    let wj = wj1 * w; // w^j
    let value = head + wj * th.value;
    let deriv = dhead + wj1 * th.value * (j as f64) + wj * thx.value;
    let tail = wj.norm() * th.tail_bound;
    Ok((value, deriv, tail))
}

struct RefinedZero {
    w: Complex64,
    residual: f64,
    err_w: f64,
}

/// Damped Newton on Θ_j from the ansatz seed.
fn newton_shifted(
    q: Complex64,
    j: usize,
    w0: Complex64,
    tol: f64,
) -> Result<RefinedZero, ZerosError> {
    let inner_tol = (tol * 1e-3).max(1e-18);
    let mut w = w0;
    let (mut f, mut df, mut tail) = theta_shifted(q, w, j, inner_tol)?;
    for _ in 0..NEWTON_ITER_CAP {
        if f.norm() <= tol {
            break;
        }
        if df.norm() == 0.0 || !df.is_finite() {
            return Err(ZerosError::NewtonStall {
                index: j,
                residual: f.norm(),
            });
        }
        let step = f / df;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let trial = w - step * lambda;
            let (ft, dft, tt) = theta_shifted(q, trial, j, inner_tol)?;
            if ft.norm() < f.norm() {
                w = trial;
                f = ft;
                df = dft;
                tail = tt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted || (step * lambda).norm() < 1e-15 * w.norm().max(f64::MIN_POSITIVE) {
            // Residual can no longer be reduced at this precision.
            break;
        }
    }
    let residual = f.norm();
    if residual > tol {
        return Err(ZerosError::NewtonStall {
            index: j,
            residual,
        });
    }
    let err_w = if df.norm() > 0.0 {
        2.0 * (residual + tail) / df.norm()
    } else {
        f64::INFINITY
    };
    Ok(RefinedZero {
        w,
        residual,
        err_w,
    })
}

/// Locate the first n zeros of θ(q,·), seeding from the given Δ table.
pub fn find_with_table(
    q: Complex64,
    n: usize,
    tol: f64,
    table: &DeltaTable,
) -> Result<ZeroSet, ZerosError> {
    assert!(n >= 1, "need at least one zero");
    assert!(tol > 0.0);
    if q.norm() == 0.0 {
        // θ(0,·) ≡ 1 has no zeros.
        return Ok(ZeroSet {
            q,
            entries: Vec::new(),
        });
    }
    if q.norm() > 0.9 {
        return Err(ZerosError::QOutOfRange { q_abs: q.norm() });
    }
    assert!(table.count() >= n, "table too small for n zeros");

    let mut entries = Vec::with_capacity(n);
    let mut qpj = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        qpj *= q;
        let seed_delta = table.delta(j).eval_complex(q);
        if !seed_delta.is_finite() || seed_delta.norm() < 1e-6 {
            return Err(ZerosError::NewtonStall {
                index: j,
                residual: f64::INFINITY,
            });
        }
        let w0 = -Complex64::new(1.0, 0.0) / seed_delta;
        let refined = newton_shifted(q, j, w0, tol)?;
        let delta = -Complex64::new(1.0, 0.0) / refined.w;
        let x_zero = refined.w / qpj;
        assert!(x_zero.norm() > 0.0, "zero at origin is impossible: theta(q,0)=1");
        entries.push(ZeroEntry {
            xi: -x_zero,
            residual: refined.residual,
            delta,
            err_bound: refined.err_w / qpj.norm(),
        });
    }
    entries.sort_by(|a, b| a.xi.norm().total_cmp(&b.xi.norm()));
    Ok(ZeroSet { q, entries })
}

/// Locate the first n zeros of θ(q,·) (solves a fresh seed table).
pub fn find(q: Complex64, n: usize, tol: f64) -> Result<ZeroSet, ZerosError> {
    if q.norm() == 0.0 {
        return Ok(ZeroSet {
            q,
            entries: Vec::new(),
        });
    }
    let table = solve_delta(n, DEFAULT_SEED_ORDER)?;
    find_with_table(q, n, tol, &table)
}

#[derive(Debug, Clone, Copy)]
pub struct SeparationReport {
    /// min over j of |q^{j+1} Δ_{j+1}| / |q^j Δ_j| (= |ξ_j| / |ξ_{j+1}|).
    pub min_ratio: f64,
    /// max of the same consecutive ratios; < 1 means strictly decreasing
    /// zero reciprocals, the distinctness margin of the certificate.
    pub max_ratio: f64,
    /// Smallest pairwise distance between located zeros.
    pub min_pair_distance: f64,
    pub distinct: bool,
}

/// Distinctness diagnostics over a located zero set.
pub fn separation_report(zs: &ZeroSet) -> Result<SeparationReport, ZerosError> {
    if zs.entries.len() < 2 {
        return Err(ZerosError::TooFewZeros);
    }
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    for pair in zs.entries.windows(2) {
        let r = pair[0].xi.norm() / pair[1].xi.norm();
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
    }
    let mut min_pair = f64::INFINITY;
    let mut resolved = true;
    for i in 0..zs.entries.len() {
        for k in i + 1..zs.entries.len() {
            let d = (zs.entries[i].xi - zs.entries[k].xi).norm();
            min_pair = min_pair.min(d);
            if d <= 2.0 * (zs.entries[i].err_bound + zs.entries[k].err_bound) {
                resolved = false;
            }
        }
    }
    Ok(SeparationReport {
        min_ratio,
        max_ratio,
        min_pair_distance: min_pair,
        distinct: min_ratio < 1.0 && resolved,
    })
}

/// One grid point of a disk scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub re_q: f64,
    pub im_q: f64,
    pub n_found: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_pair_distance: f64,
    pub max_delta_dev: f64,
    pub max_residual: f64,
    pub stalled: bool,
}

/// Polar-grid scan of the disk |q| <= r_max: `grid` radii times `grid`
/// angles, `n` zeros per point. Newton stalls are recorded per row, not
/// fatal.
pub fn scan_disk(r_max: f64, grid: usize, n: usize, tol: f64) -> Result<Vec<ScanRow>, ZerosError> {
    assert!(r_max > 0.0 && r_max <= 0.35, "scan radius capped at 0.35");
    assert!(grid >= 1 && grid <= 512, "grid capped at 512");
    assert!(n >= 1);
    let table = solve_delta(n, DEFAULT_SEED_ORDER)?;
    let mut rows = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let r = r_max * (i + 1) as f64 / grid as f64;
        for k in 0..grid {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
            let q = Complex64::from_polar(r, phi);
            let row = match find_with_table(q, n, tol, &table) {
                Ok(zs) => {
                    let rep = if zs.count() >= 2 {
                        separation_report(&zs)?
                    } else {
                        SeparationReport {
                            min_ratio: f64::NAN,
                            max_ratio: f64::NAN,
                            min_pair_distance: f64::NAN,
                            distinct: true,
                        }
                    };
                    let max_dev = zs
                        .entries
                        .iter()
                        .map(|e| (e.delta - 1.0).norm())
                        .fold(0.0, f64::max);
                    let max_res = zs.entries.iter().map(|e| e.residual).fold(0.0, f64::max);
                    ScanRow {
                        re_q: q.re,
                        im_q: q.im,
                        n_found: zs.count(),
                        min_ratio: rep.min_ratio,
                        max_ratio: rep.max_ratio,
                        min_pair_distance: rep.min_pair_distance,
                        max_delta_dev: max_dev,
                        max_residual: max_res,
                        stalled: false,
                    }
                }
                Err(ZerosError::NewtonStall { .. }) => ScanRow {
                    re_q: q.re,
                    im_q: q.im,
                    n_found: 0,
                    min_ratio: f64::NAN,
                    max_ratio: f64::NAN,
                    min_pair_distance: f64::NAN,
                    max_delta_dev: f64::NAN,
                    max_residual: f64::NAN,
                    stalled: true,
                },
                Err(other) => return Err(other),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// CSV emission for scan rows: header plus one line per grid point.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out =
        String::from("re_q,im_q,n_found,min_ratio,min_pair_distance,max_delta_dev,stalled\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.re_q,
            r.im_q,
            r.n_found,
            r.min_ratio,
            r.min_pair_distance,
            r.max_delta_dev,
            u8::from(r.stalled)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval_product;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn q_zero_yields_empty_set() {
        let zs = find(c(0.0, 0.0), 3, 1e-12).unwrap();
        assert_eq!(zs.count(), 0);
    }

    #[test]
    fn q_out_of_range_rejected() {
        let err = find(c(0.95, 0.0), 2, 1e-12).unwrap_err();
        assert!(matches!(err, ZerosError::QOutOfRange { .. }));
    }

    /// First zero at q = 0.05: Δ_1(0.05) = 0.947361... so ξ_1 ≈ 21.111.
    #[test]
    fn first_zero_small_q() {
        let zs = find(c(0.05, 0.0), 1, 1e-13).unwrap();
        assert_eq!(zs.count(), 1);
        let e = &zs.entries[0];
        assert!((e.xi.re - 21.111).abs() < 5e-3, "xi = {}", e.xi);
        assert!(e.xi.im.abs() < 1e-12);
        assert!(e.residual <= 1e-13);
        assert!((e.delta.re - 0.947361).abs() < 1e-5);
    }

    /// The certified-boundary example: complex q of modulus 0.108.
    #[test]
    fn zeros_on_certified_boundary() {
        let q = Complex64::from_polar(0.108, std::f64::consts::PI / 3.0);
        let zs = find(q, 6, 1e-11).unwrap();
        assert_eq!(zs.count(), 6);
        for e in &zs.entries {
            assert!(e.residual <= 1e-11);
            assert!((e.delta - 1.0).norm() <= 0.7882, "delta = {}", e.delta);
        }
        let rep = separation_report(&zs).unwrap();
        assert!(rep.max_ratio < 1.0, "moduli not strictly ordered");
        assert!(rep.distinct);
    }

    #[test]
    fn separation_needs_two() {
        let zs = find(c(0.05, 0.0), 1, 1e-12).unwrap();
        assert!(matches!(
            separation_report(&zs),
            Err(ZerosError::TooFewZeros)
        ));
    }

    #[test]
    fn separation_small_real_q() {
        let zs = find(c(0.05, 0.0), 5, 1e-12).unwrap();
        let rep = separation_report(&zs).unwrap();
        assert!(rep.distinct);
        // Ratio scale is |q| times the Δ drift.
        assert!(rep.min_ratio > 0.04 && rep.max_ratio < 0.07, "{rep:?}");
    }

    #[test]
    fn product_reconstruction_matches_series() {
        let q = c(0.05, 0.0);
        let zs = find(q, 8, 1e-13).unwrap();
        let th = eval_theta(q, c(1.0, 0.0), 1e-13).unwrap();
        let pr = eval_product(c(1.0, 0.0), &zs).unwrap();
        assert!(
            (th.value - pr).norm() < 1e-9,
            "series {} vs product {}",
            th.value,
            pr
        );
        // At a located zero the product vanishes by construction.
        let at_zero = eval_theta(q, -zs.entries[0].xi, 1e-13).unwrap();
        let scaled = at_zero.value.norm(); // j=1: no rescaling needed
        assert!(scaled < 1e-11);
    }

    #[test]
    fn conjugation_symmetry_of_zero_sets() {
        let q = c(0.08, 0.03);
        let zs = find(q, 4, 1e-12).unwrap();
        let zs_conj = find(q.conj(), 4, 1e-12).unwrap();
        for (a, b) in zs.entries.iter().zip(&zs_conj.entries) {
            assert!((a.xi.conj() - b.xi).norm() < 1e-9 * a.xi.norm());
        }
    }

    /// Back-solved Δ_j from Newton agrees with the truncated series to
    /// O(q^{K+1-j}) — the seed table is order 20.
    #[test]
    fn ansatz_consistency_against_series() {
        let table = solve_delta(4, DEFAULT_SEED_ORDER).unwrap();
        for &qr in &[0.02, 0.05, 0.08] {
            let q = c(qr, 0.0);
            let zs = find_with_table(q, 4, 1e-13, &table).unwrap();
            for (idx, e) in zs.entries.iter().enumerate() {
                let j = idx + 1;
                let series_val = table.delta(j).eval_complex(q);
                let gap = (e.delta - series_val).norm();
                let allowed =
                    1e3 * qr.powi((DEFAULT_SEED_ORDER + 1 - j) as i32) + 5e-13;
                assert!(gap < allowed, "j={j} q={qr}: gap {gap:.3e} > {allowed:.3e}");
            }
        }
    }

    #[test]
    fn scan_smoke_is_clean_and_fast() {
        let rows = scan_disk(0.05, 8, 3, 1e-11).unwrap();
        assert_eq!(rows.len(), 64);
        for row in &rows {
            assert!(!row.stalled);
            assert_eq!(row.n_found, 3);
            assert!(row.max_ratio < 1.0);
        }
        let csv = scan_csv(&rows);
        assert!(csv.starts_with(
            "re_q,im_q,n_found,min_ratio,min_pair_distance,max_delta_dev,stalled\n"
        ));
        assert_eq!(csv.lines().count(), 65);
    }
}
