//! Zero localization invariants: reality below the spectrum, product
//! reconstruction, and the residual contract.

use num_complex::Complex64;
use ptheta_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Below the first spectral value every zero of θ(q,·) is real.
#[test]
fn zeros_real_below_spectrum() {
    let table = solve_delta(4, 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..20 {
        let qr = rng.gen_range(0.01..0.30);
        let zs = find_with_table(c(qr, 0.0), 4, 1e-10, &table).unwrap();
        assert_eq!(zs.count(), 4);
        for e in &zs.entries {
            assert!(
                e.xi.im.abs() <= 1e-12 * e.xi.norm(),
                "q={qr}: zero {} has imaginary part",
                e.xi
            );
            assert!(e.xi.re > 0.0, "zeros lie on the negative axis");
        }
    }
}

/// Product reconstruction from a located zero set matches the series at
/// random points inside the innermost-zero radius.
#[test]
fn product_matches_series_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCAFE);
    let n = 8;
    for &(rq, pq) in &[(0.05, 0.0), (0.09, 2.1), (0.108, 4.0)] {
        let q = Complex64::from_polar(rq, pq);
        let zs = find(q, n, 1e-12).unwrap();
        let min_xi = zs.entries[0].xi.norm();
        for _ in 0..10 {
            let x = Complex64::from_polar(
                rng.gen::<f64>() * min_xi,
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let series = eval_theta(q, x, 1e-13).unwrap();
            let product = eval_product(x, &zs).unwrap();
            // Missing factors contribute |x/ξ_j| ~ |x| |q|^j for j > n.
            let product_tail = 4.0
                * (1.0 + x.norm())
                * rq.powi(n as i32 + 1)
                * series.value.norm().max(1.0);
            let allowance = series.tail_bound + product_tail + 1e-10;
            assert!(
                (series.value - product).norm() <= allowance,
                "q={q}, x={x}: |series - product| = {:.3e} > {allowance:.3e}",
                (series.value - product).norm()
            );
        }
    }
}

#[test]
fn product_at_origin_is_one_and_empty_set_rejected() {
    let q = c(0.1, 0.0);
    let zs = find(q, 3, 1e-12).unwrap();
    let p = eval_product(c(0.0, 0.0), &zs).unwrap();
    assert_eq!(p, c(1.0, 0.0));

    let empty = find(c(0.0, 0.0), 3, 1e-12).unwrap();
    assert!(matches!(
        eval_product(c(1.0, 0.0), &empty),
        Err(EvalError::EmptyZeroSet)
    ));
}

/// Residual contract: the scaled residual of every reported zero is within
/// the requested tolerance plus the evaluation tail.
#[test]
fn residual_contract_holds() {
    for &tol in &[1e-9, 1e-12] {
        let q = Complex64::from_polar(0.108, 1.0);
        let zs = find(q, 6, tol).unwrap();
        for e in &zs.entries {
            assert!(e.residual <= tol, "residual {} over tol {tol}", e.residual);
            assert!(e.err_bound.is_finite() && e.err_bound >= 0.0);
        }
    }
}

/// Newton reports a stall rather than returning garbage when q sits on the
/// spectrum (a double zero breaks the simple-zero ansatz).
#[test]
fn stall_at_spectral_point_is_an_error_not_garbage() {
    let q = c(0.3092493386, 0.0);
    match find(q, 2, 1e-12) {
        Err(ZerosError::NewtonStall { .. }) => {}
        Ok(zs) => {
            // If Newton converged the two zeros must genuinely be distinct
            // beyond their error bounds; at the fold they cannot be.
            let rep = separation_report(&zs).unwrap();
            assert!(
                !rep.distinct,
                "fold point must not produce certified-distinct zeros"
            );
        }
        Err(other) => panic!("unexpected error {other}"),
    }
}

#[test]
fn scan_csv_shape_and_order_are_deterministic() {
    let rows = scan_disk(0.1, 5, 4, 1e-11).unwrap();
    assert_eq!(rows.len(), 25);
    let csv_a = scan_csv(&rows);
    let csv_b = scan_csv(&scan_disk(0.1, 5, 4, 1e-11).unwrap());
    assert_eq!(csv_a, csv_b, "scan output must be byte-identical");
    // Radius-major ordering: first grid rows share the smallest radius.
    let r0 = (rows[0].re_q.powi(2) + rows[0].im_q.powi(2)).sqrt();
    let r4 = (rows[4].re_q.powi(2) + rows[4].im_q.powi(2)).sqrt();
    assert!((r0 - r4).abs() < 1e-12);
    assert!((r0 - 0.02).abs() < 1e-12);
}
