//! Logical-qubit encodings, read-out, and the induced Pauli transfer map.
//!
//! Scheme A stores the qubit in `{|Ω⟩, â_1†|Ω⟩}`; scheme C in
//! `{â_1†|Ω⟩, â_2†|Ω⟩}`. After half a period the free evolution mirrors site
//! `j` to `N+1−j`, so the receiver reads site `N` (A) or the pair `(N, N−1)`
//! (C). In scheme C configurations where the two read-out spins are aligned
//! are declared lost and replaced by the maximally mixed state.

use std::fmt;

use nalgebra::{DMatrix, Matrix4, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::chain::{mode_basis, ChainSpec, ModeBasis, Omega};
use crate::dynamics::{
    populations, single_particle_probability, Diagnostics, Engine, ModeLiouvillian,
    RateModel, RatePreset, Temperature,
};
use crate::error::{Result, WireError};
use crate::fock::{c, trace_product, FockSpace, ModeFrame, Operator, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    A,
    C,
}

impl Scheme {
    pub const BOTH: [Scheme; 2] = [Scheme::A, Scheme::C];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::A => "a",
            Scheme::C => "c",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn index(self) -> usize {
        self as usize
    }

    /// 2×2 matrix in the logical basis `{|0⟩, |1⟩}`.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// An encoding scheme bound to a chain length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoding {
    scheme: Scheme,
    n: usize,
}

impl Encoding {
    pub fn new(scheme: Scheme, n: usize) -> Result<Self> {
        let required = match scheme {
            Scheme::A => 2,
            Scheme::C => 3,
        };
        if n < required {
            return Err(WireError::EncodingTooShort { required, found: n });
        }
        Ok(Self { scheme, n })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn encode_sites(&self) -> Vec<usize> {
        match self.scheme {
            Scheme::A => vec![1],
            Scheme::C => vec![1, 2],
        }
    }

    pub fn decode_sites(&self) -> Vec<usize> {
        match self.scheme {
            Scheme::A => vec![self.n],
            Scheme::C => vec![self.n, self.n - 1],
        }
    }

    /// Site-basis indices of the logical `|0⟩`, `|1⟩` at the sender.
    pub fn logical_states(&self) -> [usize; 2] {
        match self.scheme {
            Scheme::A => [0, 1],
            Scheme::C => [1, 2],
        }
    }

    /// Site-basis indices of the logical `|0⟩`, `|1⟩` at the receiver.
    pub fn received_states(&self) -> [usize; 2] {
        let n = self.n;
        match self.scheme {
            Scheme::A => [0, 1 << (n - 1)],
            Scheme::C => [1 << (n - 1), 1 << (n - 2)],
        }
    }

    /// Image of a logical operator `Σ m_ij |i⟩⟨j|` on the full space.
    pub fn encode_matrix(&self, m: &[[Complex64; 2]; 2]) -> Operator {
        let space = FockSpace::new(self.n);
        let s = self.logical_states();
        let mut op = space.zeros();
        for i in 0..2 {
            for j in 0..2 {
                op[(s[i], s[j])] = m[i][j];
            }
        }
        op
    }

    pub fn encode_operator(&self, pauli: Pauli) -> Operator {
        self.encode_matrix(&pauli.matrix())
    }

    /// Read-out observable for `pauli` at the receiving end.
    ///
    /// `phase` is the relative phase `φ` the receiver undoes on the logical
    /// coherence `ρ_01` (1 for no correction).
    pub fn readout(&self, pauli: Pauli, phase: Complex64) -> Result<Operator> {
        let space = FockSpace::new(self.n);
        let n = self.n;
        let i = Complex64::new(0.0, 1.0);
        // lowering: |1_out⟩ → |0_out⟩
        let lower = || -> Result<Operator> {
            Ok(match self.scheme {
                Scheme::A => space.site_annihilator(n)?,
                Scheme::C => space.site_creator(n)? * space.site_annihilator(n - 1)?,
            })
        };
        Ok(match pauli {
            Pauli::I => space.identity(),
            Pauli::Z => match self.scheme {
                Scheme::A => space.identity() - space.site_number(n)? * c(2.0),
                Scheme::C => space.site_number(n)? - space.site_number(n - 1)?,
            },
            Pauli::X => {
                let k = lower()?;
                &k * phase + k.adjoint() * phase.conj()
            }
            Pauli::Y => {
                let k = lower()?;
                (k.adjoint() * phase.conj() - &k * phase) * i
            }
        })
    }
}

pub fn encode_operator(scheme: Scheme, n: usize, pauli: Pauli) -> Result<Operator> {
    Ok(Encoding::new(scheme, n)?.encode_operator(pauli))
}

/// `½·Tr[D(pauli)·evolved]` for an operator already carried to the
/// receiving end, without phase correction.
pub fn decode_overlap(encoding: &Encoding, evolved: &Operator, pauli: Pauli) -> Result<f64> {
    FockSpace::new(encoding.n).check_operator(evolved)?;
    let d = encoding.readout(pauli, ONE)?;
    Ok(0.5 * trace_product(&d, evolved).re)
}

/// Logical channel as a 4×4 real map on `(I, σx, σy, σz)`; `λ[(out, in)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTransferMap {
    pub lambda: Matrix4<f64>,
}

impl PauliTransferMap {
    pub fn identity() -> Self {
        Self { lambda: Matrix4::identity() }
    }

    pub fn get(&self, out: Pauli, inp: Pauli) -> f64 {
        self.lambda[(out.index(), inp.index())]
    }

    /// Output Bloch vector for input Bloch vector `r`.
    pub fn apply(&self, r: &Vector3<f64>) -> Vector3<f64> {
        let v = self.lambda * nalgebra::Vector4::new(1.0, r[0], r[1], r[2]);
        Vector3::new(v[1], v[2], v[3])
    }

    /// `⟨ψ|ρ_out|ψ⟩` for a pure input with Bloch vector `r`.
    pub fn state_fidelity(&self, r: &Vector3<f64>) -> f64 {
        0.5 * (1.0 + self.apply(r).dot(r))
    }
}

pub fn average_fidelity(map: &PauliTransferMap) -> f64 {
    let l = &map.lambda;
    0.5 + (l[(1, 1)] + l[(2, 2)] + l[(3, 3)]) / 6.0
}

/// Mean state fidelity over the six axis states `±x, ±y, ±z`.
pub fn axis_average_fidelity(map: &PauliTransferMap) -> f64 {
    let mut total = 0.0;
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut r = Vector3::zeros();
            r[axis] = sign;
            total += map.state_fidelity(&r);
        }
    }
    total / 6.0
}

/// Monte Carlo mean over Haar-random pure inputs.
pub fn haar_average_fidelity(map: &PauliTransferMap, samples: usize, rng: &mut impl Rng) -> f64 {
    let total: f64 = (0..samples).map(|_| map.state_fidelity(&random_bloch(rng))).sum();
    total / samples as f64
}

/// Bloch vector of a Haar-random pure qubit state.
pub fn random_bloch(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v: Vector3<f64> = Vector3::from_fn(|_, _| rng.sample(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Where the free evolution lives during a transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Dissipator only; the ideal half-period mirror is applied afterwards.
    #[default]
    Dissipative,
    /// Commutator with the full Hamiltonian (finite `ω`) integrated
    /// alongside the dissipator.
    FullHamiltonian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferOptions {
    /// Evolution time; `None` means the transfer time `τ`.
    pub time: Option<f64>,
    pub frame: Frame,
    pub engine: Engine,
    pub phase_correction: bool,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self { time: None, frame: Frame::Dissipative, engine: Engine::default(), phase_correction: true }
    }
}

#[derive(Debug, Clone)]
pub struct ChannelReport {
    pub scheme: Scheme,
    pub map: PauliTransferMap,
    pub fidelity: f64,
    /// Probability of exactly one quasi-fermion in the evolved, maximally
    /// mixed logical input.
    pub p1: f64,
    /// Probability that the read-out pair `(N, N−1)` is anti-parallel.
    pub p_ap: f64,
    /// Probability of a single excitation located on site `N` or `N−1`.
    pub p_ap_single: f64,
    /// Worst-case integrator diagnostics over the four Pauli evolutions.
    pub diagnostics: Diagnostics,
    /// `|½Tr E(Q) − δ_{Q,I}|`, the deviation hidden by pinning the first row.
    pub first_row_residual: f64,
}

/// A chain together with its eigenmodes and mode frame, reused across
/// channel evaluations.
#[derive(Debug, Clone)]
pub struct Wire {
    spec: ChainSpec,
    basis: ModeBasis,
    frame: ModeFrame,
}

impl Wire {
    pub fn new(spec: ChainSpec) -> Result<Self> {
        let basis = mode_basis(&spec)?;
        Ok(Self::from_parts(spec, basis))
    }

    pub fn from_parts(spec: ChainSpec, basis: ModeBasis) -> Self {
        let frame = ModeFrame::new(&basis);
        Self { spec, basis, frame }
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn frame(&self) -> &ModeFrame {
        &self.frame
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn rates(&self, preset: &RatePreset, scale: f64, temperature: Temperature) -> Result<RateModel> {
        RateModel::detailed_balance(&self.spec, &self.basis, preset, scale, temperature)
    }

    fn frame_omega(&self, frame: Frame) -> Result<f64> {
        match frame {
            Frame::Dissipative => Ok(0.0),
            Frame::FullHamiltonian => match self.spec.omega() {
                Omega::Finite(w) => Ok(w),
                Omega::Infinite => Err(WireError::InfiniteOmega),
            },
        }
    }

    /// Relative phase picked up by the logical coherence `ρ_01` over one
    /// transfer.
    pub fn transfer_phase(&self, scheme: Scheme, frame: Frame) -> Result<Complex64> {
        let omega = self.frame_omega(frame)?;
        let tau = self.spec.tau();
        let u = self.basis.propagator(tau);
        let n = self.n();
        let particle = Complex64::from_polar(1.0, -omega * tau);
        Ok(match scheme {
            Scheme::A => (u[(n - 1, 0)] * particle).conj(),
            Scheme::C => u[(n - 1, 0)] * u[(n - 2, 1)].conj(),
        })
    }

    fn generator(&self, rates: &RateModel, frame: Frame) -> Result<ModeLiouvillian> {
        if rates.n() != self.n() {
            return Err(WireError::DimensionMismatch { expected: self.n(), found: rates.n() });
        }
        let omega = self.frame_omega(frame)?;
        ModeLiouvillian::new(&self.frame, rates, (frame == Frame::FullHamiltonian).then_some(omega))
    }

    /// Rate-independent operators for repeated channel evaluations.
    pub fn kernel(&self, scheme: Scheme, opts: &TransferOptions) -> Result<ChannelKernel> {
        let encoding = Encoding::new(scheme, self.n())?;
        let phase = if opts.phase_correction { self.transfer_phase(scheme, opts.frame)? } else { ONE };
        let inputs = Pauli::ALL.iter().map(|&q| self.frame.to_modes(&encoding.encode_operator(q))).collect();
        let readouts = Pauli::ALL
            .iter()
            .map(|&p| Ok(self.frame.to_modes(&encoding.readout(p, phase)?)))
            .collect::<Result<_>>()?;
        let n = self.n();
        let space = self.frame.space();
        let antiparallel = self.frame.to_modes(&space.antiparallel_projector(n, n - 1)?);
        let mut single = space.zeros();
        for site in [n - 1, n - 2] {
            single[(1 << site, 1 << site)] = ONE;
        }
        let antiparallel_single = self.frame.to_modes(&single);
        let mirror = (opts.frame == Frame::Dissipative).then(|| self.frame.phases(self.spec.tau(), 0.0));
        Ok(ChannelKernel { scheme, opts: *opts, inputs, readouts, antiparallel, antiparallel_single, mirror })
    }

    pub fn channel(&self, rates: &RateModel, scheme: Scheme, opts: &TransferOptions) -> Result<ChannelReport> {
        self.kernel(scheme, opts)?.evaluate(self, rates)
    }

    /// Received 2×2 logical state for a pure input `α|0⟩ + β|1⟩`, by direct
    /// evolution of the encoded state (not through the Pauli map).
    pub fn received_state(
        &self,
        rates: &RateModel,
        scheme: Scheme,
        amplitudes: [Complex64; 2],
        opts: &TransferOptions,
    ) -> Result<DMatrix<Complex64>> {
        let encoding = Encoding::new(scheme, self.n())?;
        let [a, b] = amplitudes;
        let rho_in = [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]];
        let generator = self.generator(rates, opts.frame)?;
        let t = opts.time.unwrap_or(self.spec.tau());
        let mut rho = opts.engine.propagate(&generator, &self.frame.to_modes(&encoding.encode_matrix(&rho_in)), t)?.state;
        if opts.frame == Frame::Dissipative {
            rho = ModeFrame::conjugate_by_phases(&rho, &self.frame.phases(self.spec.tau(), 0.0));
        }
        let phase = if opts.phase_correction { self.transfer_phase(scheme, opts.frame)? } else { ONE };
        let mut out = DMatrix::<Complex64>::zeros(2, 2);
        for p in Pauli::ALL {
            let d = self.frame.to_modes(&encoding.readout(p, phase)?);
            let coeff = 0.5 * trace_product(&d, &rho).re;
            let m = p.matrix();
            for i in 0..2 {
                for j in 0..2 {
                    out[(i, j)] += m[i][j] * coeff;
                }
            }
        }
        Ok(out)
    }
}

/// Encoded inputs, read-out operators and the anti-parallel projector in
/// the mode frame for one scheme and option set.
#[derive(Debug, Clone)]
pub struct ChannelKernel {
    scheme: Scheme,
    opts: TransferOptions,
    inputs: Vec<Operator>,
    readouts: Vec<Operator>,
    antiparallel: Operator,
    antiparallel_single: Operator,
    mirror: Option<Vec<Complex64>>,
}

impl ChannelKernel {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn options(&self) -> &TransferOptions {
        &self.opts
    }

    /// Same kernel at a different evolution time.
    pub fn at_time(mut self, time: Option<f64>) -> Self {
        self.opts.time = time;
        self
    }

    pub fn evaluate(&self, wire: &Wire, rates: &RateModel) -> Result<ChannelReport> {
        let generator = wire.generator(rates, self.opts.frame)?;
        let t = self.opts.time.unwrap_or(wire.spec.tau());
        let evolved: Vec<(Operator, Diagnostics)> = self
            .inputs
            .par_iter()
            .map(|x0| {
                let ev = self.opts.engine.propagate(&generator, x0, t)?;
                let state = match &self.mirror {
                    Some(phases) => ModeFrame::conjugate_by_phases(&ev.state, phases),
                    None => ev.state,
                };
                Ok((state, ev.diagnostics))
            })
            .collect::<Result<_>>()?;

        let mut lambda = Matrix4::zeros();
        for (col, (e, _)) in evolved.iter().enumerate() {
            for (row, d) in self.readouts.iter().enumerate() {
                lambda[(row, col)] = 0.5 * trace_product(d, e).re;
            }
        }
        let first_row_residual = (0..4)
            .map(|q| (lambda[(0, q)] - if q == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        lambda[(0, 0)] = 1.0;
        for q in 1..4 {
            lambda[(0, q)] = 0.0;
        }
        let map = PauliTransferMap { lambda };

        let mixed = &evolved[0].0 * c(0.5);
        let p1 = single_particle_probability(&populations(&mixed));
        let p_ap = trace_product(&self.antiparallel, &mixed).re;
        let p_ap_single = trace_product(&self.antiparallel_single, &mixed).re;

        let diagnostics = evolved.iter().fold(Diagnostics::default(), |acc, (_, d)| Diagnostics {
            steps: acc.steps.max(d.steps),
            trace_drift: acc.trace_drift.max(d.trace_drift),
            hermiticity: acc.hermiticity.max(d.hermiticity),
            min_eigenvalue: match (acc.min_eigenvalue, d.min_eigenvalue) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            positivity_warning: acc.positivity_warning || d.positivity_warning,
        });

        Ok(ChannelReport {
            scheme: self.scheme,
            fidelity: average_fidelity(&map),
            map,
            p1,
            p_ap,
            p_ap_single,
            diagnostics,
            first_row_residual,
        })
    }
}

/// One-shot channel extraction with default options.
pub fn transfer_channel(spec: &ChainSpec, basis: &ModeBasis, rates: &RateModel, scheme: Scheme) -> Result<PauliTransferMap> {
    let wire = Wire::from_parts(*spec, basis.clone());
    Ok(wire.channel(rates, scheme, &TransferOptions::default())?.map)
}
