use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qwire::chain::{build_oqs_hamiltonian, mode_basis, oqs_propagator};
use qwire::ChainSpec;

fn expm_propagator(n: usize, t: f64) -> DMatrix<Complex64> {
    let h = build_oqs_hamiltonian(&ChainSpec::new(n).unwrap()).to_dense();
    (h.map(|x| Complex64::new(0.0, -x * t))).exp()
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

#[test]
fn ladder_spectrum_up_to_ten() {
    for n in 2..=10 {
        let spec = ChainSpec::new(n).unwrap();
        let b = mode_basis(&spec).unwrap();
        for k in 0..n {
            let expect = (2.0 * (k + 1) as f64 - n as f64 - 1.0) * PI;
            assert!((b.energies()[k] - expect).abs() < 1e-9, "N={n} k={k}");
        }
        assert!(b.orthogonality_residual() < 1e-12);
        assert!(b.reconstruction_residual(&build_oqs_hamiltonian(&spec)) < 1e-12);
    }
}

#[test]
fn half_period_mirror_matches_expm() {
    for n in 2..=10 {
        let b = mode_basis(&ChainSpec::new(n).unwrap()).unwrap();
        let u = oqs_propagator(&b, 0.5);
        let oracle = expm_propagator(n, 0.5);
        assert!(max_abs(&(&u - &oracle)) < 1e-9, "N={n}");
        let phase = Complex64::new(0.0, -1.0).powi(n as i32 - 1);
        for j in 0..n {
            assert!((u[(n - 1 - j, j)] - phase).norm() < 1e-9, "N={n} j={j}");
        }
    }
    let u4 = oqs_propagator(&mode_basis(&ChainSpec::new(4).unwrap()).unwrap(), 0.5);
    assert!((u4[(3, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-9);
}

proptest! {
    #[test]
    fn propagator_agrees_with_expm(n in 2usize..=8, t in 0.0f64..2.0) {
        let u = oqs_propagator(&mode_basis(&ChainSpec::new(n).unwrap()).unwrap(), t);
        prop_assert!(max_abs(&(&u - expm_propagator(n, t))) < 1e-9);
        let id = DMatrix::<Complex64>::identity(n, n);
        prop_assert!(max_abs(&(u.adjoint() * &u - id)) < 1e-12);
    }

    #[test]
    fn unit_period(n in 2usize..=10, t in 0.0f64..1.0) {
        let b = mode_basis(&ChainSpec::new(n).unwrap()).unwrap();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let shifted = oqs_propagator(&b, t + 1.0);
        let base = oqs_propagator(&b, t) * Complex64::new(sign, 0.0);
        prop_assert!(max_abs(&(shifted - base)) < 1e-9);
    }
}
