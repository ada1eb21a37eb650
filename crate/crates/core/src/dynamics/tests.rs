use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::chain::{mode_basis, ChainSpec, ModeBasis, Omega};
use crate::fock::{c, hermiticity_residual, max_abs, min_eigenvalue, FockSpace, ModeFrame, Operator};

fn random_operator(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
    Operator::from_fn(dim, dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
    let a = random_operator(dim, rng);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn random_rates(n: usize, rng: &mut ChaCha8Rng) -> RateModel {
    let g = (0..n).map(|_| rng.random_range(0.1..1.5)).collect();
    let p = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
    RateModel::new(g, p).unwrap()
}

fn setup(n: usize, omega: f64) -> (ChainSpec, ModeBasis, ModeFrame) {
    let spec = ChainSpec::new(n).unwrap().with_omega(Omega::Finite(omega)).unwrap();
    let basis = mode_basis(&spec).unwrap();
    let frame = ModeFrame::new(&basis);
    (spec, basis, frame)
}

#[test]
fn fast_generator_matches_dense_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=5 {
        let (spec, basis, frame) = setup(n, 1.3);
        let fock = FockSpace::new(n);
        let modes = fock.mode_annihilators(&basis).unwrap();
        let h = fock.build_full_hamiltonian(&spec, &basis).unwrap();
        let rates = random_rates(n, &mut rng);
        let x = random_operator(1 << n, &mut rng);
        for with_h in [false, true] {
            let dense = liouvillian_apply(&x, &rates, &modes, with_h.then_some(&h)).unwrap();
            let gen = ModeLiouvillian::new(&frame, &rates, with_h.then_some(1.3)).unwrap();
            let fast = frame.to_sites(&gen.apply(&frame.to_modes(&x)));
            assert!(max_abs(&(dense - fast)) < 1e-10, "n={n} h={with_h}");
        }
    }
}

#[test]
fn zero_rates_without_hamiltonian_give_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (_, basis, _) = setup(3, 0.0);
    let modes = FockSpace::new(3).mode_annihilators(&basis).unwrap();
    let x = random_operator(8, &mut rng);
    let out = liouvillian_apply(&x, &RateModel::zero(3), &modes, None).unwrap();
    assert_eq!(max_abs(&out), 0.0);
}

#[test]
fn vacuum_is_dark_under_pure_decay() {
    let (spec, basis, _) = setup(4, 4.0 * PI);
    let rates = RateModel::detailed_balance(&spec, &basis, &RatePreset::Uniform, 1.0, Temperature::Beta(f64::INFINITY)).unwrap();
    let fock = FockSpace::new(4);
    let modes = fock.mode_annihilators(&basis).unwrap();
    let out = liouvillian_apply(&fock.vacuum_projector(), &rates, &modes, None).unwrap();
    assert!(max_abs(&out) < 1e-15);
}

#[test]
fn single_mode_population_equation() {
    // one mode: dq/dt = −γq + γp(1−q)
    let basis = ModeBasis::from_parts(DVector::from_vec(vec![0.0]), DMatrix::identity(1, 1)).unwrap();
    let fock = FockSpace::new(1);
    let modes = fock.mode_annihilators(&basis).unwrap();
    let (g, p) = (0.7, 0.4);
    let rates = RateModel::new(vec![g], vec![p]).unwrap();
    for q in [0.0, 0.3, 1.0] {
        let rho = Operator::from_diagonal(&DVector::from_vec(vec![c(1.0 - q), c(q)]));
        let d = liouvillian_apply(&rho, &rates, &modes, None).unwrap();
        assert!((d[(1, 1)].re - (-g * q + g * p * (1.0 - q))).abs() < 1e-15);
        assert!((d[(0, 0)].re + d[(1, 1)].re).abs() < 1e-15);
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let (_, basis, _) = setup(3, 0.0);
    let modes = FockSpace::new(3).mode_annihilators(&basis).unwrap();
    let x = Operator::zeros(4, 4);
    assert!(liouvillian_apply(&x, &RateModel::zero(3), &modes, None).is_err());
    assert!(liouvillian_apply(&Operator::zeros(8, 8), &RateModel::zero(2), &modes, None).is_err());
}

#[test]
fn rk4_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2, 4, 5] {
        let (_, _, frame) = setup(n, 2.0 * PI);
        let rates = random_rates(n, &mut rng);
        let x = random_operator(1 << n, &mut rng);
        for omega in [None, Some(2.0 * PI)] {
            let gen = ModeLiouvillian::new(&frame, &rates, omega).unwrap();
            let a = Engine::default().propagate(&gen, &x, 1.3).unwrap().state;
            let b = Engine::Exact.propagate(&gen, &x, 1.3).unwrap().state;
            assert!(max_abs(&(a - b)) < 1e-9, "n={n}");
        }
    }
}

#[test]
fn zero_time_leaves_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (_, _, frame) = setup(3, 0.0);
    let gen = ModeLiouvillian::new(&frame, &random_rates(3, &mut rng), None).unwrap();
    let x = random_operator(8, &mut rng);
    for engine in [Engine::default(), Engine::Exact] {
        let out = evolve(&frame, &gen, &x, 0.0, &engine).unwrap();
        assert!(max_abs(&(out.state - &x)) < 1e-12);
    }
    assert!(Engine::default().propagate(&gen, &x, -1.0).is_err());
}

#[test]
fn relaxes_to_gibbs_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 4;
    let omega = 3.0 * PI;
    let beta = 0.4;
    let (spec, basis, frame) = setup(n, omega);
    let rates = RateModel::detailed_balance(&spec, &basis, &RatePreset::Uniform, 1.0, Temperature::Beta(beta)).unwrap();
    let gen = ModeLiouvillian::new(&frame, &rates, Some(omega)).unwrap();
    let rho0 = random_state(1 << n, &mut rng);
    let out = evolve(&frame, &gen, &rho0, 40.0, &Engine::default()).unwrap().state;

    // exp(−βH)/Z from a dense diagonalization of the spin Hamiltonian
    let h = FockSpace::new(n).spin_hamiltonian(&spec).unwrap();
    let eig = h.symmetric_eigen();
    let e_min = eig.eigenvalues.min();
    let w = eig.eigenvalues.map(|e| c((-beta * (e - e_min)).exp()));
    let gibbs = &eig.eigenvectors * Operator::from_diagonal(&w) * eig.eigenvectors.adjoint();
    let gibbs = &gibbs / gibbs.trace();
    assert!(max_abs(&(out - &gibbs)) < 1e-5);
    assert!(max_abs(&(gibbs_state(&frame, beta, omega) - gibbs)) < 1e-12);
}

#[test]
fn zero_temperature_relaxes_to_vacuum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 4;
    let omega = 3.5 * PI;
    let (spec, basis, frame) = setup(n, omega);
    let rates = RateModel::detailed_balance(&spec, &basis, &RatePreset::Uniform, 1.0, Temperature::Beta(f64::INFINITY)).unwrap();
    let gen = ModeLiouvillian::new(&frame, &rates, None).unwrap();
    let rho0 = random_state(1 << n, &mut rng);
    let out = evolve(&frame, &gen, &rho0, 60.0, &Engine::default()).unwrap().state;
    let d = max_abs(&(out - FockSpace::new(n).vacuum_projector()));
    assert!(d < 1e-10, "{d}");
}

#[test]
fn gibbs_state_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [3, 5] {
        let omega = rng.random_range(0.0..3.0 * PI);
        let beta = rng.random_range(0.0..1.0);
        let (spec, basis, frame) = setup(n, omega);
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let rates = RateModel::detailed_balance(&spec, &basis, &RatePreset::Explicit(weights), 1.0, Temperature::Beta(beta)).unwrap();
        let fock = FockSpace::new(n);
        let modes = fock.mode_annihilators(&basis).unwrap();
        let h = fock.build_full_hamiltonian(&spec, &basis).unwrap();
        let gibbs = gibbs_state(&frame, beta, omega);
        let residual = liouvillian_apply(&gibbs, &rates, &modes, Some(&h)).unwrap();
        assert!(max_abs(&residual) < 1e-8);
        let stationary = frame.to_sites(&stationary_state(&rates));
        assert!(max_abs(&(stationary - gibbs)) < 1e-12);
    }
}

#[test]
fn state_invariants_over_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 4;
    let (_, _, frame) = setup(n, 2.0 * PI);
    let rates = random_rates(n, &mut rng);
    let gen = ModeLiouvillian::new(&frame, &rates, Some(2.0 * PI)).unwrap();
    let rho0 = random_state(1 << n, &mut rng);
    let control = StepControl { check_positivity: true, ..StepControl::default() };
    for t in [0.5, 1.0, 2.5, 5.0] {
        let ev = evolve(&frame, &gen, &rho0, t, &Engine::Rk4(control)).unwrap();
        assert!((ev.state.trace() - c(1.0)).norm() < 1e-8);
        assert!(hermiticity_residual(&ev.state) < 1e-9);
        assert!(min_eigenvalue(&ev.state) >= -1e-8);
        assert!(!ev.diagnostics.positivity_warning);
    }
}

#[test]
fn diagonal_evolution_matches_classical_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 5;
    let (_, _, frame) = setup(n, 0.0);
    let rates = random_rates(n, &mut rng);
    let dim = 1 << n;
    let mut q0: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    let s: f64 = q0.iter().sum();
    q0.iter_mut().for_each(|q| *q /= s);
    let rho0 = Operator::from_diagonal(&DVector::from_iterator(dim, q0.iter().map(|&q| c(q))));
    let gen = ModeLiouvillian::new(&frame, &rates, Some(0.0)).unwrap();
    let t = 0.8;
    let quantum = populations(&Engine::default().propagate(&gen, &rho0, t).unwrap().state);
    let classical = classical_populations_evolve(&q0, t, &rates).unwrap();
    for (a, b) in quantum.iter().zip(&classical) {
        assert!((a - b).abs() < 1e-7);
    }
}

#[test]
fn classical_examples() {
    let n = 4;
    let dim = 1 << n;
    let gamma = 0.9;
    let decay = RateModel::new(vec![gamma; n], vec![0.0; n]).unwrap();
    let mut q0 = vec![0.0; dim];
    q0[0b0100] = 1.0;
    assert_eq!(classical_populations_evolve(&q0, 0.0, &decay).unwrap(), q0);
    for t in [0.1, 1.0, 3.0] {
        let q = classical_populations_evolve(&q0, t, &decay).unwrap();
        assert!((single_particle_probability(&q) - (-gamma * t).exp()).abs() < 1e-14);
    }
    let hot = RateModel::new(vec![gamma; n], vec![1.0; n]).unwrap();
    let q = classical_populations_evolve(&q0, 60.0, &hot).unwrap();
    for occ in mode_occupations(&q, n) {
        assert!((occ - 0.5).abs() < 1e-12);
    }
    assert!((single_particle_probability(&q) - n as f64 / dim as f64).abs() < 1e-12);

    q0[1] = -0.1;
    assert!(matches!(classical_populations_evolve(&q0, 1.0, &hot), Err(crate::WireError::NegativePopulation(_))));
}

#[test]
fn antiparallel_examples() {
    let n = 4;
    let f = FockSpace::new(n);
    let first = f.ket_bra(0b0001, 0b0001);
    assert_eq!(antiparallel_probability(&first, 1, 2).unwrap(), 1.0);
    assert_eq!(antiparallel_probability(&f.vacuum_projector(), 1, 2).unwrap(), 0.0);
    let mixed = f.identity() / c(16.0);
    assert!((antiparallel_probability(&mixed, 3, 4).unwrap() - 0.5).abs() < 1e-15);
    assert!(antiparallel_probability(&mixed, 0, 4).is_err());
    assert!(antiparallel_probability(&mixed, 1, 5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn evolution_is_linear(seed in any::<u64>(), alpha in -2.0..2.0f64, beta in -2.0..2.0f64, t in 0.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, _, frame) = setup(3, PI);
        let rates = random_rates(3, &mut rng);
        let gen = ModeLiouvillian::new(&frame, &rates, Some(PI)).unwrap();
        let x = random_operator(8, &mut rng);
        let y = random_operator(8, &mut rng);
        let e = Engine::default();
        let combo = &x * c(alpha) + &y * c(beta);
        let lhs = e.propagate(&gen, &combo, t).unwrap().state;
        let rhs = e.propagate(&gen, &x, t).unwrap().state * c(alpha) + e.propagate(&gen, &y, t).unwrap().state * c(beta);
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-8);
    }
}
