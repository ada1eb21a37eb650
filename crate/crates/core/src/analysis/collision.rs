//! Collision-model exponents for scheme C and the `(1 + p₁)/2` bound.

use crate::dynamics::{
    classical_populations_evolve, populations, single_particle_probability, Engine, RateModel, RatePreset, Temperature,
};
use crate::error::{Result, WireError};
use crate::fock::c;
use crate::transfer::{Encoding, Pauli, Scheme, TransferOptions, Wire};
use crate::Omega;

/// Exponents of `F ≈ ½(1 + p_ap·exp(−a₁x))` and `p_ap ≈ p₁·exp(−a₂x)` with
/// `x = e^{−β′}(Γt)²`.
///
/// `a1` uses the two-spin anti-parallel probability. `a2` uses the
/// probability that the single quasi-fermion still sits on the carrier
/// pair; `a2_two_spin` repeats that fit with the two-spin probability,
/// which also counts multi-particle configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub a1: f64,
    pub a2: f64,
    pub a2_two_spin: f64,
    /// Root-mean-square residuals of the log-linear fits.
    pub residual1: f64,
    pub residual2: f64,
    pub residual2_two_spin: f64,
    pub samples: Vec<FitSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSample {
    pub gamma_t: f64,
    pub x: f64,
    pub fidelity: f64,
    pub p1: f64,
    pub p_ap: f64,
    pub p_ap_single: f64,
    /// Whether the sample passed the `p_ap` cut and entered the fit.
    pub used: bool,
}

/// Smallest anti-parallel probability admitted to the fit.
pub const FIT_P_AP_FLOOR: f64 = 1e-3;

/// Least-squares slope through the origin and its RMS residual.
fn slope_through_origin(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let a = sxy / sxx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x).powi(2)).sum();
    (a, (ss / xs.len() as f64).sqrt())
}

/// Fits `a₁`, `a₂` from scheme C evolved for the dissipation-only times
/// `Γt` (uniform `Γ = 1`, `ω → ∞`).
pub fn fit_collision_exponents(wire: &Wire, beta_prime: f64, gamma_t: &[f64], engine: Engine) -> Result<FitResult> {
    if wire.spec().omega() != Omega::Infinite {
        return Err(WireError::DegenerateFit("collision fit needs the omega -> infinity regime".into()));
    }
    let rates = wire.rates(&RatePreset::Uniform, 1.0, Temperature::BetaPrime(beta_prime))?;
    let kernel = wire.kernel(Scheme::C, &TransferOptions { engine, ..TransferOptions::default() })?;
    let weight = (-beta_prime).exp();
    let mut samples = Vec::with_capacity(gamma_t.len());
    for &gt in gamma_t {
        if !(gt > 0.0 && gt.is_finite()) {
            return Err(WireError::DegenerateFit(format!("sample Gamma*t = {gt} must be positive")));
        }
        let report = kernel.clone().at_time(Some(gt)).evaluate(wire, &rates)?;
        let used = report.p_ap > FIT_P_AP_FLOOR
            && report.p_ap_single > FIT_P_AP_FLOOR
            && 2.0 * report.fidelity - 1.0 > 0.0;
        samples.push(FitSample {
            gamma_t: gt,
            x: weight * gt * gt,
            fidelity: report.fidelity,
            p1: report.p1,
            p_ap: report.p_ap,
            p_ap_single: report.p_ap_single,
            used,
        });
    }
    let used: Vec<&FitSample> = samples.iter().filter(|s| s.used).collect();
    let lo = used.iter().map(|s| s.gamma_t).fold(f64::INFINITY, f64::min);
    let hi = used.iter().map(|s| s.gamma_t).fold(0.0, f64::max);
    if used.len() < 3 || hi < 10.0 * lo * (1.0 - 1e-9) {
        return Err(WireError::DegenerateFit(format!(
            "{} usable samples spanning Gamma*t in [{lo}, {hi}]; need at least 3 over one decade",
            used.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|s| s.x).collect();
    let y1: Vec<f64> = used.iter().map(|s| -((2.0 * s.fidelity - 1.0) / s.p_ap).ln()).collect();
    let y2: Vec<f64> = used.iter().map(|s| -(s.p_ap_single / s.p1).ln()).collect();
    let y2_two_spin: Vec<f64> = used.iter().map(|s| -(s.p_ap / s.p1).ln()).collect();
    let (a1, residual1) = slope_through_origin(&xs, &y1);
    let (a2, residual2) = slope_through_origin(&xs, &y2);
    let (a2_two_spin, residual2_two_spin) = slope_through_origin(&xs, &y2_two_spin);
    Ok(FitResult { a1, a2, a2_two_spin, residual1, residual2, residual2_two_spin, samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub t: f64,
    pub fidelity: f64,
    /// From the classical master equation for the populations.
    pub p1: f64,
    /// From the evolved density matrix.
    pub p1_quantum: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    /// Largest `F − (1 + p₁)/2` (negative when the bound is strict).
    pub max_violation: f64,
    /// Largest `|p₁ − p₁_quantum|`.
    pub population_mismatch: f64,
}

impl BoundReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.max_violation <= tolerance
    }
}

/// Checks `F⁽ᶜ⁾(t) ≤ (1 + p₁(t))/2` on the given times.
pub fn p1_upper_bound_check(wire: &Wire, rates: &RateModel, times: &[f64], engine: Engine) -> Result<BoundReport> {
    let encoding = Encoding::new(Scheme::C, wire.n())?;
    let seed: Vec<f64> = populations(&(wire.frame().to_modes(&encoding.encode_operator(Pauli::I)) * c(0.5)))
        .into_iter()
        .map(|q| if q > -1e-12 { q.max(0.0) } else { q })
        .collect();
    let kernel = wire.kernel(Scheme::C, &TransferOptions { engine, ..TransferOptions::default() })?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let report = kernel.clone().at_time(Some(t)).evaluate(wire, rates)?;
        let p1 = single_particle_probability(&classical_populations_evolve(&seed, t, rates)?);
        rows.push(BoundRow { t, fidelity: report.fidelity, p1, p1_quantum: report.p1, bound: 0.5 * (1.0 + p1) });
    }
    let max_violation = rows.iter().map(|r| r.fidelity - r.bound).fold(f64::NEG_INFINITY, f64::max);
    let population_mismatch = rows.iter().map(|r| (r.p1 - r.p1_quantum).abs()).fold(0.0, f64::max);
    Ok(BoundReport { rows, max_violation, population_mismatch })
}
