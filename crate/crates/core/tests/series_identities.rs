//! Cross-module identities: the functional equation of θ, back-substitution
//! of the solved Δ table into the symmetric-function system, stability of the
//! triangular solve, and consistency of the truncated Δ series with the
//! actual zero locations.

use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use ptheta_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Sum of |terms| of the θ series: θ at (|q|, |x|), where every term is
/// positive. This is the natural roundoff scale of the evaluation.
fn abs_term_sum(q: Complex64, x: Complex64) -> f64 {
    eval_theta(c(q.norm(), 0.0), c(x.norm(), 0.0), 1e-13)
        .unwrap()
        .value
        .re
}

/// θ(q,x) = 1 + qx·θ(q,qx), within the two truncation tails plus a roundoff
/// allowance proportional to the absolute term sums.
fn check_functional_equation(q: Complex64, x: Complex64) {
    let lhs = eval_theta(q, x, 1e-13).unwrap();
    let rhs = eval_theta(q, q * x, 1e-13).unwrap();
    let defect = (lhs.value - 1.0 - q * x * rhs.value).norm();
    let allowance = lhs.tail_bound
        + (q * x).norm() * rhs.tail_bound
        + 4e-13 * (abs_term_sum(q, x) + (q * x).norm() * abs_term_sum(q, q * x))
        + 1e-14;
    assert!(
        defect <= allowance,
        "functional equation defect {defect:.3e} > allowance {allowance:.3e} at q={q}, x={x}"
    );
}

#[test]
fn functional_equation_on_seeded_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7E7A);
    for _ in 0..300 {
        let rq = 0.9 * rng.gen::<f64>().sqrt();
        let pq = rng.gen_range(0.0..std::f64::consts::TAU);
        let rx = 10.0 * rng.gen::<f64>().sqrt();
        let px = rng.gen_range(0.0..std::f64::consts::TAU);
        check_functional_equation(Complex64::from_polar(rq, pq), Complex64::from_polar(rx, px));
    }
}

proptest! {
    #[test]
    fn functional_equation_property(
        rq in 0.0..0.85f64, pq in 0.0..std::f64::consts::TAU,
        rx in 0.0..8.0f64, px in 0.0..std::f64::consts::TAU,
    ) {
        check_functional_equation(Complex64::from_polar(rq, pq), Complex64::from_polar(rx, px));
    }

    /// Conjugation commutes with evaluation exactly (IEEE rounding is
    /// sign-symmetric and the summation never mixes the half-planes).
    #[test]
    fn conjugate_symmetry_exact(
        rq in 0.0..0.9f64, pq in 0.0..std::f64::consts::TAU,
        rx in 0.0..10.0f64, px in 0.0..std::f64::consts::TAU,
    ) {
        let q = Complex64::from_polar(rq, pq);
        let x = Complex64::from_polar(rx, px);
        let a = eval_theta(q, x, 1e-12).unwrap();
        let b = eval_theta(q.conj(), x.conj(), 1e-12).unwrap();
        prop_assert_eq!(a.value.conj(), b.value);
        prop_assert_eq!(a.tail_bound, b.tail_bound);
    }
}

#[test]
fn back_substitution_through_order_twelve() {
    let s_count = 5;
    let order = 12;
    let table = solve_delta(s_count, order).unwrap();
    let args: Vec<TruncSeries> = (1..=table.variables_used())
        .map(|j| table.full_rows()[j - 1].shifted(j))
        .collect();
    for s in 1..=s_count {
        let e = elementary_symmetric(&args, s, order);
        let tri = s * (s + 1) / 2;
        let expected = TruncSeries::monomial(order, tri, BigInt::from(1));
        assert_eq!(e, expected, "e_{s} identity failed");
    }
}

#[test]
fn solver_stable_under_extra_variables() {
    // S' > S + K leaves the first S rows untouched through order K.
    let s = 3;
    let k = 10;
    let base = solve_delta(s, k).unwrap();
    let wide = solve_delta(s + k + 1, k).unwrap();
    for row in 1..=s {
        assert_eq!(base.delta(row), wide.delta(row), "row {row} drifted");
    }
}

/// Evaluating the truncated Δ_j at q and forming the ansatz zero -1/(q^j Δ_j)
/// gives a θ-residual (in the rescaled coordinate, see `zeros` docs) that is
/// below the truncation tolerance of the series for j = 1..5.
#[test]
fn truncated_series_predict_zeros_inside_certified_disk() {
    let order = 20;
    let table = solve_delta(5, order).unwrap();
    for &(qr, budget) in &[(0.05, 1e-11), (0.108, 1e-7)] {
        let q = c(qr, 0.0);
        for j in 1..=5usize {
            let delta_j = table.delta(j).eval_complex(q);
            let xi_inv = q.powu(j as u32) * delta_j;
            let x_pred = -1.0 / xi_inv;
            let theta = eval_theta(q, x_pred, 1e-15).unwrap();
            // Rescale by q^{j(j-1)/2}: the series' own term size at the
            // j-th zero.
            let scaled = theta.value.norm() * qr.powi((j * (j - 1) / 2) as i32);
            assert!(
                scaled < budget,
                "j={j}, q={qr}: scaled residual {scaled:.3e} over budget {budget:.0e}"
            );
        }
    }
}

#[test]
fn delta_json_is_consumable() {
    let table = solve_delta(3, 15).unwrap();
    let json = table.to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["order"], 15);
    assert_eq!(v["rows"][2]["kappa"], 6);
    // Coefficients arrive as decimal strings, safe for 64-bit-challenged
    // consumers.
    assert!(v["rows"][0]["coefficients"][9].is_string());
    let back = DeltaTable::from_json(&json).unwrap();
    assert_eq!(back.delta(3), table.delta(3));
}
