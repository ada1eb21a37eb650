//! The engineered-coupling chain and its one-quasiparticle sector.
//!
//! Couplings between sites `i` and `i+1` are `J·√(i(N−i))`. With `J = π`
//! the single-excitation spectrum is the ladder `(2k−N−1)π`, so the free
//! evolution has period 1 and mirrors the chain at `t = 1/2`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, WireError};
use crate::tridiag::SymTridiagonal;

/// On-site excitation energy of a quasi-fermion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    Finite(f64),
    /// `ω → ∞` with the temperature expressed through `β′ = ωβ`.
    Infinite,
}

impl Omega {
    pub fn finite(self) -> Option<f64> {
        match self {
            Omega::Finite(w) => Some(w),
            Omega::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Omega::Infinite)
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Finite(w) => write!(f, "{w}"),
            Omega::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n: usize,
    coupling: f64,
    omega: Omega,
    tau: f64,
}

impl ChainSpec {
    /// Chain of `n` sites with `J = π`, `ω = 0` and transfer time `1/2`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_params(n, PI, Omega::Finite(0.0), 0.5)
    }

    pub fn with_params(n: usize, coupling: f64, omega: Omega, tau: f64) -> Result<Self> {
        if n < 2 {
            return Err(WireError::ChainTooShort(n));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(WireError::InvalidChain(format!("coupling must be positive, got {coupling}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(WireError::InvalidChain(format!("transfer time must be positive, got {tau}")));
        }
        if let Omega::Finite(w) = omega {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(WireError::InvalidChain(format!(
                    "on-site energy must be finite and non-negative, got {w}"
                )));
            }
        }
        Ok(Self { n, coupling, omega, tau })
    }

    pub fn with_omega(self, omega: Omega) -> Result<Self> {
        Self::with_params(self.n, self.coupling, omega, self.tau)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn omega(&self) -> Omega {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Eigenbasis of the one-quasiparticle Hamiltonian.
///
/// Row `k` of `modes` holds the site amplitudes `b_{kj}` of mode `k`, so that
/// `ĉ_k = Σ_j b_{kj} â_j`. Energies are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    energies: DVector<f64>,
    modes: DMatrix<f64>,
}

impl ModeBasis {
    /// Builds a basis from explicit parts. Rows are normalized to the sign
    /// convention but otherwise taken as given.
    pub fn from_parts(energies: DVector<f64>, mut modes: DMatrix<f64>) -> Result<Self> {
        if modes.nrows() != energies.len() || modes.ncols() != energies.len() {
            return Err(WireError::DimensionMismatch {
                expected: energies.len(),
                found: modes.nrows(),
            });
        }
        for k in 0..modes.nrows() {
            fix_row_sign(&mut modes, k);
        }
        Ok(Self { energies, modes })
    }

    pub fn n(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// Amplitude `b_{kj}` with zero-based mode and site indices.
    pub fn amplitude(&self, mode: usize, site: usize) -> f64 {
        self.modes[(mode, site)]
    }

    /// `max |b·bᵀ − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.n();
        (&self.modes * self.modes.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// `max |bᵀ·diag(E)·b − H|`.
    pub fn reconstruction_residual(&self, h: &SymTridiagonal) -> f64 {
        let recon = self.modes.transpose() * DMatrix::from_diagonal(&self.energies) * &self.modes;
        (recon - h.to_dense()).amax()
    }

    /// Single-particle propagator `bᵀ·diag(e^{−iE_k t})·b` in the site basis.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.n();
        let b = self.modes.map(|x| Complex64::new(x, 0.0));
        let phases = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        ));
        b.transpose() * phases * b
    }
}

/// The OQS Hamiltonian: zero diagonal, `(i, i+1)` entries `J·√(i(N−i))`.
pub fn build_oqs_hamiltonian(spec: &ChainSpec) -> SymTridiagonal {
    let n = spec.n();
    let off = (1..n)
        .map(|i| spec.coupling() * ((i * (n - i)) as f64).sqrt())
        .collect();
    SymTridiagonal::new(vec![0.0; n], off)
}

pub fn diagonalize_oqs(h: &SymTridiagonal) -> Result<ModeBasis> {
    let (vals, vecs) = h.eigen()?;
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));

    let energies = DVector::from_iterator(n, order.iter().map(|&k| vals[k]));
    let mut modes = DMatrix::zeros(n, n);
    for (row, &k) in order.iter().enumerate() {
        for j in 0..n {
            modes[(row, j)] = vecs[(j, k)];
        }
    }
    ModeBasis::from_parts(energies, modes)
}

/// Convenience: build and diagonalize in one step.
pub fn mode_basis(spec: &ChainSpec) -> Result<ModeBasis> {
    diagonalize_oqs(&build_oqs_hamiltonian(spec))
}

pub fn oqs_propagator(basis: &ModeBasis, t: f64) -> DMatrix<Complex64> {
    basis.propagator(t)
}

// First entry of (numerically) largest magnitude is made positive.
fn fix_row_sign(m: &mut DMatrix<f64>, row: usize) {
    let max = m.row(row).amax();
    if max == 0.0 {
        return;
    }
    let lead = (0..m.ncols())
        .find(|&j| m[(row, j)].abs() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    if m[(row, lead)] < 0.0 {
        m.row_mut(row).neg_mut();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn rejects_short_chain() {
        assert_eq!(ChainSpec::new(1), Err(WireError::ChainTooShort(1)));
        assert!(ChainSpec::with_params(4, PI, Omega::Finite(-1.0), 0.5).is_err());
        assert!(ChainSpec::with_params(4, 0.0, Omega::Infinite, 0.5).is_err());
        assert!(ChainSpec::with_params(4, PI, Omega::Infinite, 0.0).is_err());
    }

    #[test]
    fn two_site_hamiltonian() {
        let h = build_oqs_hamiltonian(&ChainSpec::new(2).unwrap());
        assert_eq!(h.diag, vec![0.0, 0.0]);
        assert_eq!(h.off, vec![PI]);
    }

    #[test]
    fn three_site_couplings() {
        let h = build_oqs_hamiltonian(&ChainSpec::new(3).unwrap());
        let expect = PI * 2f64.sqrt();
        assert!(h.off.iter().all(|&v| (v - expect).abs() < 1e-15));
    }

    #[test]
    fn two_site_basis_by_hand() {
        let b = mode_basis(&ChainSpec::new(2).unwrap()).unwrap();
        assert!((b.energies()[0] + PI).abs() < 1e-12);
        assert!((b.energies()[1] - PI).abs() < 1e-12);
        // E = −π: (1, −1)/√2 ; E = +π: (1, 1)/√2
        let expect = [[FRAC_1_SQRT_2, -FRAC_1_SQRT_2], [FRAC_1_SQRT_2, FRAC_1_SQRT_2]];
        for k in 0..2 {
            for j in 0..2 {
                assert!((b.amplitude(k, j) - expect[k][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn six_site_ladder() {
        let b = mode_basis(&ChainSpec::new(6).unwrap()).unwrap();
        let e = b.energies();
        for k in 0..6 {
            assert!((e[k] - (2.0 * (k as f64 + 1.0) - 7.0) * PI).abs() < 1e-9);
        }
        for k in 1..6 {
            assert!((e[k] - e[k - 1] - 2.0 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_convention_holds() {
        for n in 2..=10 {
            let b = mode_basis(&ChainSpec::new(n).unwrap()).unwrap();
            for k in 0..n {
                let row = b.modes().row(k);
                let max = row.amax();
                let lead = (0..n).find(|&j| row[j].abs() >= max * (1.0 - 1e-9)).unwrap();
                assert!(row[lead] > 0.0);
            }
        }
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let b = mode_basis(&ChainSpec::new(5).unwrap()).unwrap();
        let u = b.propagator(0.0);
        let id = DMatrix::<Complex64>::identity(5, 5);
        assert!(crate::fock::max_abs(&(u - id)) < 1e-12);
    }
}
