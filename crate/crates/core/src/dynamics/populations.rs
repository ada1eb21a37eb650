//! Observables and the classical (Pauli) equation for mode populations.

use nalgebra::DVector;

use super::rates::RateModel;
use crate::error::{Result, WireError};
use crate::fock::{c, FockSpace, ModeFrame, Operator};

/// Evolves a distribution over mode-occupation configurations (index bit
/// `k` = occupation of mode `k+1`) under independent birth–death processes
/// with down-rate `γ_k` and up-rate `γ_k·p_k`.
pub fn classical_populations_evolve(q0: &[f64], t: f64, rates: &RateModel) -> Result<Vec<f64>> {
    let n = rates.n();
    let dim = 1usize << n;
    if q0.len() != dim {
        return Err(WireError::DimensionMismatch { expected: dim, found: q0.len() });
    }
    if let Some(&neg) = q0.iter().find(|&&q| q < 0.0) {
        return Err(WireError::NegativePopulation(neg));
    }
    let mut q = q0.to_vec();
    for k in 0..n {
        let (g, p) = (rates.gammas()[k], rates.pumps()[k]);
        if g == 0.0 {
            continue;
        }
        let relax = (-g * (1.0 + p) * t).exp();
        let empty_eq = 1.0 / (1.0 + p);
        // transition probabilities over [0, t] for one mode
        let stay_empty = empty_eq + (1.0 - empty_eq) * relax;
        let empty_from_full = empty_eq * (1.0 - relax);
        let bit = 1usize << k;
        for x in 0..dim {
            if x & bit == 0 {
                let (lo, hi) = (q[x], q[x | bit]);
                q[x] = stay_empty * lo + empty_from_full * hi;
                q[x | bit] = (1.0 - stay_empty) * lo + (1.0 - empty_from_full) * hi;
            }
        }
    }
    Ok(q)
}

/// Probability of exactly one quasi-fermion in a configuration distribution.
pub fn single_particle_probability(q: &[f64]) -> f64 {
    q.iter().enumerate().filter(|(x, _)| x.count_ones() == 1).map(|(_, p)| p).sum()
}

/// Mean occupation of each mode.
pub fn mode_occupations(q: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| q.iter().enumerate().filter(|(x, _)| x >> k & 1 == 1).map(|(_, p)| p).sum())
        .collect()
}

/// Real diagonal of an operator given in the mode frame.
pub fn populations(rho_modes: &Operator) -> Vec<f64> {
    (0..rho_modes.nrows()).map(|i| rho_modes[(i, i)].re).collect()
}

/// `Tr[P ρ]` with `P` projecting onto configurations where exactly one of
/// sites `u`, `v` is excited. `rho` is in the site basis.
pub fn antiparallel_probability(rho: &Operator, u: usize, v: usize) -> Result<f64> {
    let dim = rho.nrows();
    if !dim.is_power_of_two() || rho.ncols() != dim {
        return Err(WireError::DimensionMismatch { expected: dim.next_power_of_two(), found: dim });
    }
    let space = FockSpace::new(dim.trailing_zeros() as usize);
    let p = space.antiparallel_projector(u, v)?;
    Ok((0..dim).map(|i| (p[(i, i)] * rho[(i, i)]).re).sum())
}

/// Stationary state of the dissipator, in the mode frame: each mode is
/// occupied with odds `p_k : 1`.
pub fn stationary_state(rates: &RateModel) -> Operator {
    let n = rates.n();
    let dim = 1usize << n;
    let weights: Vec<f64> = (0..dim)
        .map(|m| (0..n).filter(|&k| m >> k & 1 == 1).map(|k| rates.pumps()[k]).product())
        .collect();
    let z: f64 = weights.iter().sum();
    Operator::from_diagonal(&DVector::from_iterator(dim, weights.iter().map(|w| c(w / z))))
}

/// `exp(−βH)/Z` in the site basis, from the mode-frame energies.
pub fn gibbs_state(frame: &ModeFrame, beta: f64, omega: f64) -> Operator {
    let e: Vec<f64> = frame
        .mode_energies()
        .iter()
        .enumerate()
        .map(|(m, e)| e + omega * m.count_ones() as f64)
        .collect();
    let e_min = e.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = e.iter().map(|x| (-beta * (x - e_min)).exp()).collect();
    let z: f64 = w.iter().sum();
    let d = Operator::from_diagonal(&DVector::from_iterator(w.len(), w.iter().map(|x| c(x / z))));
    frame.to_sites(&d)
}
