//! The Lindblad generator with jump operators `ĉ_k` (rate `γ_k`) and
//! `ĉ_k†` (rate `γ_k·p_k`).

use num_complex::Complex64;

use super::rates::RateModel;
use crate::error::{Result, WireError};
use crate::fock::{c, string_sign, Operator, ModeFrame, ZERO};

/// Dense application of the generator in any basis.
///
/// `modes` are the annihilators `ĉ_k`; pass `Some(H)` to include `−i[H, X]`.
pub fn liouvillian_apply(
    x: &Operator,
    rates: &RateModel,
    modes: &[Operator],
    hamiltonian: Option<&Operator>,
) -> Result<Operator> {
    let dim = x.nrows();
    if x.ncols() != dim {
        return Err(WireError::DimensionMismatch { expected: dim, found: x.ncols() });
    }
    if modes.len() != rates.n() {
        return Err(WireError::DimensionMismatch { expected: rates.n(), found: modes.len() });
    }
    for m in modes.iter().chain(hamiltonian) {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(WireError::DimensionMismatch { expected: dim, found: m.nrows() });
        }
    }
    let mut out = match hamiltonian {
        Some(h) => (h * x - x * h) * Complex64::new(0.0, -1.0),
        None => Operator::zeros(dim, dim),
    };
    for ((ck, &g), &p) in modes.iter().zip(rates.gammas()).zip(rates.pumps()) {
        if g == 0.0 {
            continue;
        }
        let cd = ck.adjoint();
        let n_k = &cd * ck;
        let h_k = ck * &cd;
        out += (ck * x * &cd * c(2.0) - &n_k * x - x * &n_k) * c(0.5 * g);
        if p != 0.0 {
            out += (&cd * x * ck * c(2.0) - &h_k * x - x * &h_k) * c(0.5 * g * p);
        }
    }
    Ok(out)
}

/// The generator expressed in the mode-occupation frame, where each jump
/// operator only flips one bit with a string sign. Applying it costs
/// `O(N·4ᴺ)`.
#[derive(Debug, Clone)]
pub struct ModeLiouvillian {
    n: usize,
    dim: usize,
    gammas: Vec<f64>,
    pumps: Vec<f64>,
    /// Coefficient multiplying `X_ab` (decay plus optional free phase).
    diagonal: Vec<Complex64>,
    /// Free-evolution energies `ε_a + ω·n_a`, when the Hamiltonian is on.
    energies: Option<Vec<f64>>,
}

impl ModeLiouvillian {
    /// `omega = Some(ω)` switches on the commutator with `Σ (E_k+ω) n̂_k`.
    pub fn new(frame: &ModeFrame, rates: &RateModel, omega: Option<f64>) -> Result<Self> {
        let n = frame.space().sites();
        if rates.n() != n {
            return Err(WireError::DimensionMismatch { expected: n, found: rates.n() });
        }
        let dim = 1usize << n;
        let energies: Option<Vec<f64>> = omega.map(|w| {
            frame
                .mode_energies()
                .iter()
                .enumerate()
                .map(|(m, e)| e + w * m.count_ones() as f64)
                .collect()
        });
        // per-state half rates: out of |a⟩ via decay (occupied) or pumping (empty)
        let half: Vec<f64> = (0..dim)
            .map(|a| {
                (0..n)
                    .map(|k| {
                        if a >> k & 1 == 1 {
                            0.5 * rates.gammas()[k]
                        } else {
                            0.5 * rates.gammas()[k] * rates.pumps()[k]
                        }
                    })
                    .sum()
            })
            .collect();
        let mut diagonal = vec![ZERO; dim * dim];
        for b in 0..dim {
            for a in 0..dim {
                let phase = energies.as_ref().map_or(0.0, |e| e[a] - e[b]);
                diagonal[a + b * dim] = Complex64::new(half[a] + half[b], phase);
            }
        }
        Ok(Self {
            n,
            dim,
            gammas: rates.gammas().to_vec(),
            pumps: rates.pumps().to_vec(),
            diagonal,
            energies,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn includes_hamiltonian(&self) -> bool {
        self.energies.is_some()
    }

    /// Bound on the spectral radius, used to pick a stable step.
    pub fn rate_bound(&self) -> f64 {
        let decay: f64 = self.gammas.iter().zip(&self.pumps).map(|(g, p)| g * (1.0 + p)).sum();
        let spread = self.energies.as_ref().map_or(0.0, |e| {
            let (lo, hi) = e.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
            hi - lo
        });
        decay + spread
    }

    /// `out = L(x)`, both in the mode frame.
    pub fn apply_into(&self, x: &Operator, out: &mut Operator) {
        let dim = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for (o, (d, v)) in os.iter_mut().zip(self.diagonal.iter().zip(xs)) {
            *o = -d * v;
        }
        for k in 0..self.n {
            let g = self.gammas[k];
            if g == 0.0 {
                continue;
            }
            let gp = g * self.pumps[k];
            let bit = 1usize << k;
            for b in 0..dim {
                let sb = string_sign(b, k);
                let b_occ = b & bit != 0;
                for a in 0..dim {
                    if (a & bit != 0) != b_occ {
                        continue;
                    }
                    let s = sb * string_sign(a, k);
                    let src = xs[(a ^ bit) + (b ^ bit) * dim];
                    let rate = if b_occ { gp } else { g };
                    os[a + b * dim] += src * (s * rate);
                }
            }
        }
    }

    pub fn apply(&self, x: &Operator) -> Operator {
        let mut out = Operator::zeros(self.dim, self.dim);
        self.apply_into(x, &mut out);
        out
    }

    /// Closed-form `exp(tL)(x)` in the mode frame.
    ///
    /// Single-mode dissipators commute with each other and with the free
    /// evolution, so the propagator factorizes into 2-level relaxation per
    /// mode. This is independent of the step integrator and serves as its
    /// reference.
    pub fn propagate_exact(&self, x: &Operator, t: f64) -> Operator {
        let dim = self.dim;
        let mut y = x.clone();
        let ys = y.as_mut_slice();
        for k in 0..self.n {
            let g = self.gammas[k];
            if g == 0.0 {
                continue;
            }
            let p = self.pumps[k];
            let relax = (-g * (1.0 + p) * t).exp();
            let coherence = (-0.5 * g * (1.0 + p) * t).exp();
            let empty_fraction = 1.0 / (1.0 + p);
            let bit = 1usize << k;
            for b in 0..dim {
                for a in 0..dim {
                    let (ao, bo) = (a & bit != 0, b & bit != 0);
                    if ao != bo {
                        ys[a + b * dim] *= coherence;
                    } else if !ao {
                        let s = string_sign(a, k) * string_sign(b, k);
                        let lo = a + b * dim;
                        let hi = (a | bit) + (b | bit) * dim;
                        let x_lo = ys[lo];
                        let y_hi = ys[hi] * s;
                        let total = x_lo + y_hi;
                        let new_lo = total * empty_fraction + (x_lo - total * empty_fraction) * relax;
                        ys[lo] = new_lo;
                        ys[hi] = (total - new_lo) * s;
                    }
                }
            }
        }
        if let Some(e) = &self.energies {
            for b in 0..dim {
                for a in 0..dim {
                    ys[a + b * dim] *= Complex64::from_polar(1.0, -(e[a] - e[b]) * t);
                }
            }
        }
        y
    }
}
