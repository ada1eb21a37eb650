//! Operators on the 2ᴺ-dimensional spin space.
//!
//! Basis index bit `j−1` is the occupation of site `j` (1 = spin flipped),
//! so index 0 is the vacuum |Ω⟩ and site 1 is the least significant bit.
//! Site annihilators carry the Jordan–Wigner string over lower sites:
//! `â_i = (∏_{j<i} σᶻ_j)·σ⁺_i`, with `σ⁺` taking the excited state to the
//! ground state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chain::{ChainSpec, ModeBasis};
use crate::error::{Result, WireError};

/// Dense complex operator on the full spin space.
pub type Operator = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Sign `(−1)^{#occupied below bit}` picked up by a fermionic operator on
/// `bit` acting on basis state `x`.
#[inline]
pub fn string_sign(x: usize, bit: usize) -> f64 {
    if (x & ((1usize << bit) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn dagger(op: &Operator) -> Operator {
    op.adjoint()
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    a * b + b * a
}

/// `Tr[a·b]` without forming the product.
pub fn trace_product(a: &Operator, b: &Operator) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `max |a − a†|`.
pub fn hermiticity_residual(a: &Operator) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Worst deviation from `{a_i, a_j} = 0` and `{a_i, a_j†} = δ_ij` over a
/// set of annihilators.
pub fn car_residual(a: &[Operator]) -> f64 {
    let Some(first) = a.first() else { return 0.0 };
    let dim = first.nrows();
    let nonzeros = |m: &Operator| -> Vec<(usize, usize, Complex64)> {
        let mut v = Vec::new();
        for j in 0..dim {
            for i in 0..dim {
                if m[(i, j)] != ZERO {
                    v.push((i, j, m[(i, j)]));
                }
            }
        }
        v
    };
    let daggers: Vec<Operator> = a.iter().map(Operator::adjoint).collect();
    let sparse: Vec<_> = a.iter().map(&nonzeros).collect();
    let sparse_dag: Vec<_> = daggers.iter().map(&nonzeros).collect();
    // {X, Y} with X sparse and Y dense: X·Y + Y·X
    let anti = |x: &[(usize, usize, Complex64)], y: &Operator| {
        let mut out = Operator::zeros(dim, dim);
        for &(r, c, v) in x {
            for k in 0..dim {
                out[(r, k)] += v * y[(c, k)];
                out[(k, c)] += y[(k, r)] * v;
            }
        }
        out
    };
    let mut worst = 0.0_f64;
    for i in 0..a.len() {
        for j in i..a.len() {
            worst = worst.max(max_abs(&anti(&sparse[i], &a[j])));
            let mut mixed = anti(&sparse[i], &daggers[j]);
            if i == j {
                for d in 0..dim {
                    mixed[(d, d)] -= ONE;
                }
            }
            worst = worst.max(max_abs(&mixed));
            if i != j {
                worst = worst.max(max_abs(&anti(&sparse_dag[j], &a[i])));
            }
        }
    }
    worst
}

pub fn max_abs(a: &Operator) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &Operator) -> f64 {
    let h = (a + a.adjoint()).scale(0.5);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Spin space of an `N`-site chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n: usize,
}

impl FockSpace {
    pub fn new(n: usize) -> Self {
        assert!((1..=16).contains(&n), "unsupported number of sites {n}");
        Self { n }
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn check_site(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(WireError::IndexOutOfRange { index: i, max: self.n });
        }
        Ok(())
    }

    pub fn check_operator(&self, op: &Operator) -> Result<()> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(WireError::DimensionMismatch {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        Ok(())
    }

    pub fn identity(&self) -> Operator {
        Operator::identity(self.dim(), self.dim())
    }

    pub fn zeros(&self) -> Operator {
        Operator::zeros(self.dim(), self.dim())
    }

    /// `|x⟩⟨y|` for basis indices `x`, `y`.
    pub fn ket_bra(&self, x: usize, y: usize) -> Operator {
        let mut m = self.zeros();
        m[(x, y)] = ONE;
        m
    }

    pub fn vacuum_projector(&self) -> Operator {
        self.ket_bra(0, 0)
    }

    /// `â_i`, one-based site index.
    pub fn site_annihilator(&self, i: usize) -> Result<Operator> {
        self.check_site(i)?;
        let bit = i - 1;
        let mut m = self.zeros();
        for x in 0..self.dim() {
            if x >> bit & 1 == 1 {
                m[(x ^ (1 << bit), x)] = c(string_sign(x, bit));
            }
        }
        Ok(m)
    }

    pub fn site_creator(&self, i: usize) -> Result<Operator> {
        Ok(self.site_annihilator(i)?.adjoint())
    }

    /// `n̂_i = â_i†â_i`, diagonal.
    pub fn site_number(&self, i: usize) -> Result<Operator> {
        self.check_site(i)?;
        let bit = i - 1;
        Ok(Operator::from_diagonal(&DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|x| c((x >> bit & 1) as f64)),
        )))
    }

    pub fn total_number(&self) -> Operator {
        Operator::from_diagonal(&DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|x| c(x.count_ones() as f64)),
        ))
    }

    /// `ĉ_k = Σ_j b_{kj} â_j`, one-based mode index.
    pub fn mode_annihilator(&self, basis: &ModeBasis, k: usize) -> Result<Operator> {
        if basis.n() != self.n {
            return Err(WireError::DimensionMismatch { expected: self.n, found: basis.n() });
        }
        if k == 0 || k > self.n {
            return Err(WireError::IndexOutOfRange { index: k, max: self.n });
        }
        let mut m = self.zeros();
        for j in 1..=self.n {
            let amp = basis.amplitude(k - 1, j - 1);
            if amp != 0.0 {
                m += self.site_annihilator(j)? * c(amp);
            }
        }
        Ok(m)
    }

    pub fn mode_annihilators(&self, basis: &ModeBasis) -> Result<Vec<Operator>> {
        (1..=self.n).map(|k| self.mode_annihilator(basis, k)).collect()
    }

    /// Projector onto configurations where sites `u` and `v` hold exactly
    /// one excitation between them.
    pub fn antiparallel_projector(&self, u: usize, v: usize) -> Result<Operator> {
        self.check_site(u)?;
        self.check_site(v)?;
        let (bu, bv) = (u - 1, v - 1);
        Ok(Operator::from_diagonal(&DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|x| c(((x >> bu & 1) != (x >> bv & 1)) as u8 as f64)),
        )))
    }

    /// Spin-form Hamiltonian: nearest-neighbour hopping with amplitude
    /// `J·√(i(N−i))` plus `ω` per excitation.
    pub fn spin_hamiltonian(&self, spec: &ChainSpec) -> Result<Operator> {
        let omega = spec.omega().finite().ok_or(WireError::InfiniteOmega)?;
        if spec.n() != self.n {
            return Err(WireError::DimensionMismatch { expected: self.n, found: spec.n() });
        }
        let n = self.n;
        let mut h = self.zeros();
        for x in 0..self.dim() {
            h[(x, x)] = c(omega * x.count_ones() as f64);
            for i in 0..n - 1 {
                let (lo, hi) = (x >> i & 1, x >> (i + 1) & 1);
                if lo != hi {
                    let y = x ^ (0b11 << i);
                    let amp = spec.coupling() * (((i + 1) * (n - i - 1)) as f64).sqrt();
                    h[(y, x)] += c(amp);
                }
            }
        }
        Ok(h)
    }

    /// Mode-form Hamiltonian `Σ_k (E_k + ω) ĉ_k†ĉ_k`.
    pub fn build_full_hamiltonian(&self, spec: &ChainSpec, basis: &ModeBasis) -> Result<Operator> {
        let omega = spec.omega().finite().ok_or(WireError::InfiniteOmega)?;
        if spec.n() != self.n || basis.n() != self.n {
            return Err(WireError::DimensionMismatch { expected: self.n, found: basis.n() });
        }
        let mut h = self.zeros();
        for k in 1..=self.n {
            let ck = self.mode_annihilator(basis, k)?;
            h += ck.adjoint() * &ck * c(basis.energies()[k - 1] + omega);
        }
        Ok(h)
    }

    /// `â_j†` applied to a state vector (`j` zero-based).
    fn apply_site_creator(&self, bit: usize, v: &DVector<Complex64>, out: &mut DVector<Complex64>, amp: f64) {
        for x in 0..self.dim() {
            if x >> bit & 1 == 0 {
                let vx = v[x];
                if vx != ZERO {
                    out[x | (1 << bit)] += vx * string_sign(x, bit) * amp;
                }
            }
        }
    }

    fn apply_mode_creator(&self, basis: &ModeBasis, k: usize, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for j in 0..self.n {
            let amp = basis.amplitude(k, j);
            if amp != 0.0 {
                self.apply_site_creator(j, v, &mut out, amp);
            }
        }
        out
    }
}

/// Change of basis from site occupations to mode occupations.
///
/// Column `m` of `unitary` is `(ĉ_1†)^{m_1}⋯(ĉ_N†)^{m_N}|Ω⟩` in the site
/// basis. In that frame every `ĉ_k` acts as a Jordan–Wigner annihilator on
/// bit `k−1` and the Hamiltonian is diagonal.
#[derive(Debug, Clone)]
pub struct ModeFrame {
    space: FockSpace,
    unitary: Operator,
    /// `Σ_k m_k E_k` for each mode configuration `m` (no `ω`).
    energies: Vec<f64>,
}

impl ModeFrame {
    pub fn new(basis: &ModeBasis) -> Self {
        let space = FockSpace::new(basis.n());
        let dim = space.dim();
        let mut unitary = Operator::zeros(dim, dim);
        unitary[(0, 0)] = ONE;
        for m in 1..dim {
            let k = m.trailing_zeros() as usize;
            let prev = unitary.column(m ^ (1 << k)).into_owned();
            let col = space.apply_mode_creator(basis, k, &prev);
            unitary.set_column(m, &col);
        }
        let energies = (0..dim)
            .map(|m| {
                (0..basis.n())
                    .filter(|&k| m >> k & 1 == 1)
                    .map(|k| basis.energies()[k])
                    .sum()
            })
            .collect();
        Self { space, unitary, energies }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn mode_energies(&self) -> &[f64] {
        &self.energies
    }

    /// `W†·X·W`.
    pub fn to_modes(&self, x: &Operator) -> Operator {
        self.unitary.adjoint() * x * &self.unitary
    }

    /// `W·Y·W†`.
    pub fn to_sites(&self, y: &Operator) -> Operator {
        &self.unitary * y * self.unitary.adjoint()
    }

    /// Free propagator `exp(−it Σ_k (E_k+ω) n̂_k)` as a diagonal of phases in
    /// the mode frame.
    pub fn phases(&self, t: f64, omega: f64) -> Vec<Complex64> {
        (0..self.space.dim())
            .map(|m| Complex64::from_polar(1.0, -(self.energies[m] + omega * m.count_ones() as f64) * t))
            .collect()
    }

    /// `U·Y·U†` for diagonal `U = diag(phases)`, in the mode frame.
    pub fn conjugate_by_phases(y: &Operator, phases: &[Complex64]) -> Operator {
        let mut out = y.clone();
        for b in 0..y.ncols() {
            for a in 0..y.nrows() {
                out[(a, b)] *= phases[a] * phases[b].conj();
            }
        }
        out
    }

    /// Full-space free propagator in the site basis.
    pub fn site_propagator(&self, t: f64, omega: f64) -> Operator {
        let p = DVector::from_vec(self.phases(t, omega));
        &self.unitary * Operator::from_diagonal(&p) * self.unitary.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::mode_basis;

    #[test]
    fn single_site_annihilator() {
        let a = FockSpace::new(1).site_annihilator(1).unwrap();
        let mut expect = Operator::zeros(2, 2);
        expect[(0, 1)] = ONE;
        assert_eq!(a, expect);
    }

    #[test]
    fn string_sign_on_three_sites() {
        let f = FockSpace::new(3);
        let a2 = f.site_annihilator(2).unwrap();
        // |110⟩ = sites 1 and 2 occupied = index 0b011
        let mut v = DVector::zeros(8);
        v[0b011] = ONE;
        let out = a2 * v;
        let mut expect = DVector::zeros(8);
        expect[0b001] = -ONE;
        assert_eq!(out, expect);
    }

    #[test]
    fn site_operators_satisfy_car() {
        for n in 1..=6 {
            let f = FockSpace::new(n);
            let a: Vec<_> = (1..=n).map(|i| f.site_annihilator(i).unwrap()).collect();
            assert!(car_residual(&a) < 1e-14, "n={n}");
        }
    }

    #[test]
    fn mode_operators_satisfy_car() {
        for n in 2..=6 {
            let basis = mode_basis(&ChainSpec::new(n).unwrap()).unwrap();
            let c = FockSpace::new(n).mode_annihilators(&basis).unwrap();
            assert!(car_residual(&c) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn index_errors() {
        let f = FockSpace::new(3);
        assert!(f.site_annihilator(0).is_err());
        assert!(f.site_annihilator(4).is_err());
        let basis = mode_basis(&ChainSpec::new(3).unwrap()).unwrap();
        assert!(f.mode_annihilator(&basis, 4).is_err());
        let other = mode_basis(&ChainSpec::new(4).unwrap()).unwrap();
        assert!(f.mode_annihilator(&other, 1).is_err());
    }

    #[test]
    fn identity_mixing_gives_site_operators() {
        let basis = ModeBasis::from_parts(DVector::from_vec(vec![0.0, 1.0, 2.0]), DMatrix::identity(3, 3)).unwrap();
        let f = FockSpace::new(3);
        for k in 1..=3 {
            assert_eq!(f.mode_annihilator(&basis, k).unwrap(), f.site_annihilator(k).unwrap());
        }
    }

    #[test]
    fn two_site_mode_operator() {
        let basis = mode_basis(&ChainSpec::new(2).unwrap()).unwrap();
        let f = FockSpace::new(2);
        let c1 = f.mode_annihilator(&basis, 1).unwrap();
        let expect = (f.site_annihilator(1).unwrap() - f.site_annihilator(2).unwrap()) * c(std::f64::consts::FRAC_1_SQRT_2);
        assert!(max_abs(&(c1 - expect)) < 1e-12);
    }

    #[test]
    fn two_site_full_spectrum() {
        let spec = ChainSpec::new(2).unwrap();
        let basis = mode_basis(&spec).unwrap();
        let h = FockSpace::new(2).build_full_hamiltonian(&spec, &basis).unwrap();
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let pi = std::f64::consts::PI;
        for (a, b) in ev.iter().zip([-pi, 0.0, 0.0, pi]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_and_mode_hamiltonians_agree() {
        for n in 2..=6 {
            let spec = ChainSpec::new(n).unwrap().with_omega(crate::Omega::Finite(1.7)).unwrap();
            let basis = mode_basis(&spec).unwrap();
            let f = FockSpace::new(n);
            let hs = f.spin_hamiltonian(&spec).unwrap();
            let hm = f.build_full_hamiltonian(&spec, &basis).unwrap();
            assert!(max_abs(&(hs - hm)) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn mode_frame_diagonalizes_hamiltonian() {
        let spec = ChainSpec::new(5).unwrap();
        let basis = mode_basis(&spec).unwrap();
        let frame = ModeFrame::new(&basis);
        let w = frame.unitary();
        let dim = w.nrows();
        assert!(max_abs(&(w.adjoint() * w - Operator::identity(dim, dim))) < 1e-12);
        let h = frame.to_modes(&FockSpace::new(5).spin_hamiltonian(&spec).unwrap());
        for a in 0..dim {
            for b in 0..dim {
                let expect = if a == b { frame.mode_energies()[a] } else { 0.0 };
                assert!((h[(a, b)] - c(expect)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mode_frame_maps_modes_to_jordan_wigner_form() {
        let basis = mode_basis(&ChainSpec::new(4).unwrap()).unwrap();
        let frame = ModeFrame::new(&basis);
        let f = FockSpace::new(4);
        for k in 1..=4 {
            let ck = frame.to_modes(&f.mode_annihilator(&basis, k).unwrap());
            assert!(max_abs(&(ck - f.site_annihilator(k).unwrap())) < 1e-12);
        }
    }
}
