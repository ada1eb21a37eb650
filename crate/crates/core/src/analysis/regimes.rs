//! Parameter regimes of the threshold and dominance figures.

use std::f64::consts::PI;

use super::sweep::{linspace, SweepGrid};
use crate::chain::{ChainSpec, Omega};
use crate::dynamics::RatePreset;
use crate::error::Result;
use crate::transfer::Scheme;

#[derive(Debug, Clone, PartialEq)]
pub struct Regime {
    pub label: &'static str,
    pub n: usize,
    pub omega: Omega,
    pub preset: RatePreset,
    pub beta_axis: Vec<f64>,
    pub gamma_tau_axis: Vec<f64>,
}

impl Regime {
    pub fn spec(&self) -> Result<ChainSpec> {
        ChainSpec::new(self.n)?.with_omega(self.omega)
    }

    pub fn grid(&self) -> Result<SweepGrid> {
        SweepGrid::new(self.beta_axis.clone(), self.gamma_tau_axis.clone(), Scheme::BOTH.to_vec(), self.preset.clone())
    }

    fn infinite_omega(label: &'static str, n: usize) -> Self {
        Self {
            label,
            n,
            omega: Omega::Infinite,
            preset: RatePreset::Uniform,
            beta_axis: linspace(0.0, 4.0, 20),
            gamma_tau_axis: linspace(0.0, 1.5, 20),
        }
    }

    fn quadratic(label: &'static str, omega: f64, beta_max: f64, gamma_tau_max: f64) -> Self {
        Self {
            label,
            n: 6,
            omega: Omega::Finite(omega),
            preset: RatePreset::Quadratic,
            beta_axis: linspace(0.0, beta_max, 20),
            gamma_tau_axis: linspace(0.0, gamma_tau_max, 20),
        }
    }

    /// `N = 6`, `ω → ∞`, uniform rates, `β′` axis.
    pub fn fig1() -> Self {
        Self::infinite_omega("fig1", 6)
    }

    /// As `fig1` with `N = 7`.
    pub fn fig2() -> Self {
        Self::infinite_omega("fig2", 7)
    }

    /// `F⁽ᶜ⁾ − F⁽ᵃ⁾` along `Γτ` at `β′ = 0` for the given length.
    pub fn fig3(n: usize) -> Self {
        Self { beta_axis: vec![0.0], gamma_tau_axis: linspace(0.0, 2.0, 41), ..Self::infinite_omega("fig3", n) }
    }

    /// `ω = 5.01π`, just above the first ground-state crossing, quadratic rates.
    pub fn fig4() -> Self {
        Self::quadratic("fig4", 5.01 * PI, 1.0, 1e-2)
    }

    /// `ω = 4π`, one mode with `ω + E < 0`, quadratic rates.
    pub fn fig5() -> Self {
        Self::quadratic("fig5", 4.0 * PI, 3.0, 1e-2)
    }

    /// `ω = 0`, quadratic rates.
    pub fn fig6() -> Self {
        Self::quadratic("fig6", 0.0, 2.0, 1e-2)
    }

    /// Threshold/dominance regimes, in figure order.
    pub fn all() -> Vec<Self> {
        vec![Self::fig1(), Self::fig2(), Self::fig3(6), Self::fig3(7), Self::fig4(), Self::fig5(), Self::fig6()]
    }

    pub fn by_label(label: &str) -> Option<Vec<Self>> {
        match label {
            "fig1" => Some(vec![Self::fig1()]),
            "fig2" => Some(vec![Self::fig2()]),
            "fig3" => Some(vec![Self::fig3(6), Self::fig3(7)]),
            "fig4" => Some(vec![Self::fig4()]),
            "fig5" => Some(vec![Self::fig5()]),
            "fig6" => Some(vec![Self::fig6()]),
            _ => None,
        }
    }
}
