//! First-order (weak coupling) fidelities and the closed forms quoted for
//! the limits of infinite and zero temperature.

use nalgebra::Matrix4;

use super::sweep::temperature_for;
use crate::chain::{ModeBasis, Omega};
use crate::dynamics::{Engine, ModeLiouvillian, RateModel, RatePreset};
use crate::error::{Result, WireError};
use crate::fock::{trace_product, ModeFrame};
use crate::transfer::{average_fidelity, Encoding, Frame, Pauli, PauliTransferMap, Scheme, TransferOptions, Wire};

/// Fidelity from `ρ(τ) ≈ ρ0 + τ·L(ρ0)` (dissipator only), read out with the
/// same phase-corrected decoder as the full channel.
pub fn perturbative_fidelity(wire: &Wire, rates: &RateModel, scheme: Scheme) -> Result<f64> {
    Ok(average_fidelity(&perturbative_map(wire, rates, scheme)?))
}

pub fn perturbative_map(wire: &Wire, rates: &RateModel, scheme: Scheme) -> Result<PauliTransferMap> {
    let frame = wire.frame();
    let tau = wire.spec().tau();
    let encoding = Encoding::new(scheme, wire.n())?;
    let generator = ModeLiouvillian::new(frame, rates, None)?;
    let mirror = frame.phases(tau, 0.0);
    let phase = wire.transfer_phase(scheme, Frame::Dissipative)?;
    let mut lambda = Matrix4::identity();
    for (col, &q) in Pauli::ALL.iter().enumerate().skip(1) {
        let x0 = frame.to_modes(&encoding.encode_operator(q));
        let dx = ModeFrame::conjugate_by_phases(&generator.apply(&x0), &mirror);
        for (row, &p) in Pauli::ALL.iter().enumerate().skip(1) {
            let d = frame.to_modes(&encoding.readout(p, phase)?);
            lambda[(row, col)] += tau * 0.5 * trace_product(&d, &dx).re;
        }
    }
    Ok(PauliTransferMap { lambda })
}

/// First-order closed forms at `β = 0`, with `b_{i1}` the amplitude of mode
/// `i` on site 1: `F⁽ᶜ⁾ = 1 − (τ/2)·Σγ_i(b_{i1}² + b_{i2}²)` and
/// `F⁽ᵃ⁾ = 1 + 2τ·(F_z/12 + F_xy/6)` with `F_z = −2Σγ_i b_{i1}²`,
/// `F_xy = Σγ_i(b_{i1}² − 2)`. Uniform rates and `τ = 1/2` give `1 − Γ/2`
/// and `1 − ΓN/3`.
pub fn infinite_temperature_closed_form(scheme: Scheme, basis: &ModeBasis, gammas: &[f64], tau: f64) -> f64 {
    let site1: f64 = gammas.iter().enumerate().map(|(i, g)| g * basis.amplitude(i, 0).powi(2)).sum();
    match scheme {
        Scheme::C => {
            let site2: f64 = gammas.iter().enumerate().map(|(i, g)| g * basis.amplitude(i, 1).powi(2)).sum();
            1.0 - 0.5 * tau * (site1 + site2)
        }
        Scheme::A => {
            let total: f64 = gammas.iter().sum();
            let f_z = -2.0 * site1;
            let f_xy = site1 - 2.0 * total;
            1.0 + 2.0 * tau * (f_z / 12.0 + f_xy / 6.0)
        }
    }
}

/// Closed-form zero-temperature expressions, evaluated verbatim.
///
/// These are known to be internally inconsistent (the time-dependent forms
/// do not start at 1 for `N > 1`), so they are reported next to the
/// integrator rather than used as a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTemperatureForms {
    pub first_order_a: f64,
    pub first_order_c: f64,
    pub exact_a: f64,
    pub exact_c: f64,
}

pub fn zero_temperature_forms(basis: &ModeBasis, gammas: &[f64], t: f64) -> ZeroTemperatureForms {
    let total: f64 = gammas.iter().sum();
    let weighted: f64 = gammas.iter().enumerate().map(|(i, g)| g * basis.amplitude(0, i).powi(2)).sum();
    ZeroTemperatureForms {
        first_order_a: 1.0 - 0.25 * total,
        first_order_c: 1.0 - 0.5 * weighted,
        exact_a: 0.5 * (1.0 + gammas.iter().map(|g| (-g * t / 2.0).exp()).sum::<f64>()),
        exact_c: 0.5 * (1.0 + gammas.iter().map(|g| (-g * t).exp()).sum::<f64>()),
    }
}

/// Integrator fidelities next to the closed-form zero-temperature expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTemperatureRow {
    pub t: f64,
    pub numeric_a: f64,
    pub numeric_c: f64,
    pub closed_form: ZeroTemperatureForms,
}

/// Evaluates both schemes at `β = ∞` on the given times, with the closed
/// formulas alongside. Requires `ω > (N−1)π` so that the vacuum is the
/// ground state.
pub fn zero_temperature_comparison(
    wire: &Wire,
    preset: &RatePreset,
    scale: f64,
    times: &[f64],
    engine: Engine,
) -> Result<Vec<ZeroTemperatureRow>> {
    let n = wire.n();
    let omega = wire.spec().omega();
    let min_shift = (n as f64 - 1.0) * wire.spec().coupling();
    if let Omega::Finite(w) = omega {
        if w <= min_shift {
            return Err(WireError::InvalidRates(format!(
                "zero-temperature comparison needs omega > {min_shift}, got {w}"
            )));
        }
    }
    let rates = wire.rates(preset, scale, temperature_for(wire, f64::INFINITY))?;
    let opts = TransferOptions { engine, ..TransferOptions::default() };
    let (ka, kc) = (wire.kernel(Scheme::A, &opts)?, wire.kernel(Scheme::C, &opts)?);
    times
        .iter()
        .map(|&t| {
            Ok(ZeroTemperatureRow {
                t,
                numeric_a: ka.clone().at_time(Some(t)).evaluate(wire, &rates)?.fidelity,
                numeric_c: kc.clone().at_time(Some(t)).evaluate(wire, &rates)?.fidelity,
                closed_form: zero_temperature_forms(wire.basis(), rates.gammas(), t),
            })
        })
        .collect()
}
