use std::fmt;

use crate::chain::{ChainSpec, ModeBasis, Omega};
use crate::error::{Result, WireError};

/// Temperature parameterization. `Beta` pairs with a finite `ω`,
/// `BetaPrime = ωβ` with the `ω → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Beta(f64),
    BetaPrime(f64),
}

impl Temperature {
    pub fn value(self) -> f64 {
        match self {
            Temperature::Beta(b) | Temperature::BetaPrime(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RatePreset {
    /// `γ_k = γ` for every mode.
    Uniform,
    /// `γ_k = γ·(E_k + ω)²`; finite `ω` only.
    Quadratic,
    /// `γ_k = γ·w_k` for the listed weights.
    Explicit(Vec<f64>),
}

impl fmt::Display for RatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatePreset::Uniform => f.write_str("uniform"),
            RatePreset::Quadratic => f.write_str("quadratic"),
            RatePreset::Explicit(w) => {
                f.write_str("list:")?;
                for (i, x) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

/// Per-mode decay rates `γ_k` and pump factors `p_k`; the pumping rate of
/// mode `k` is `γ_k·p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel {
    gammas: Vec<f64>,
    pumps: Vec<f64>,
    inverted: Vec<usize>,
}

impl RateModel {
    pub fn new(gammas: Vec<f64>, pumps: Vec<f64>) -> Result<Self> {
        if gammas.len() != pumps.len() {
            return Err(WireError::InvalidRates(format!(
                "{} rates but {} pump factors",
                gammas.len(),
                pumps.len()
            )));
        }
        if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(WireError::InvalidRates(format!("rate {g} is not a finite non-negative number")));
        }
        if let Some(p) = pumps.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(WireError::InvalidRates(format!("pump factor {p} is not a finite non-negative number")));
        }
        Ok(Self { gammas, pumps, inverted: Vec::new() })
    }

    /// No coupling to the bath.
    pub fn zero(n: usize) -> Self {
        Self { gammas: vec![0.0; n], pumps: vec![0.0; n], inverted: Vec::new() }
    }

    /// Rates obeying detailed balance at the given temperature.
    pub fn detailed_balance(
        spec: &ChainSpec,
        basis: &ModeBasis,
        preset: &RatePreset,
        scale: f64,
        temperature: Temperature,
    ) -> Result<Self> {
        let n = basis.n();
        if spec.n() != n {
            return Err(WireError::DimensionMismatch { expected: spec.n(), found: n });
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(WireError::InvalidRates(format!("rate scale {scale} must be finite and non-negative")));
        }
        let energies = basis.energies();
        let scale_e = energies.iter().fold(1.0_f64, |m, e| m.max(e.abs()));
        // ω + E_k, with numerically zero-energy modes snapped to exactly zero
        let shifted: Vec<f64> = match spec.omega() {
            Omega::Finite(w) => energies
                .iter()
                .map(|e| {
                    let x = w + e;
                    if x.abs() < 1e-12 * (scale_e + w) {
                        0.0
                    } else {
                        x
                    }
                })
                .collect(),
            Omega::Infinite => vec![f64::INFINITY; n],
        };
        let gammas: Vec<f64> = match (preset, spec.omega()) {
            (RatePreset::Uniform, _) => vec![scale; n],
            (RatePreset::Quadratic, Omega::Finite(_)) => shifted.iter().map(|x| scale * x * x).collect(),
            (RatePreset::Quadratic, Omega::Infinite) => {
                return Err(WireError::InvalidRates(
                    "quadratic rates diverge as omega -> infinity; use uniform or an explicit list".into(),
                ))
            }
            (RatePreset::Explicit(w), _) => {
                if w.len() != n {
                    return Err(WireError::InvalidRates(format!(
                        "explicit rate list has {} entries, chain has {n} modes",
                        w.len()
                    )));
                }
                w.iter().map(|x| scale * x).collect()
            }
        };

        let (pumps, inverted) = match (spec.omega(), temperature) {
            (Omega::Infinite, Temperature::BetaPrime(bp)) => {
                if bp.is_nan() || bp < 0.0 {
                    return Err(WireError::InvalidRates(format!("beta' = {bp} must be non-negative")));
                }
                (vec![(-bp).exp(); n], Vec::new())
            }
            (Omega::Finite(_), Temperature::Beta(beta)) => {
                if beta.is_nan() || beta < 0.0 {
                    return Err(WireError::InvalidRates(format!("beta = {beta} must be non-negative")));
                }
                let mut pumps = Vec::with_capacity(n);
                let mut inverted = Vec::new();
                for (k, &x) in shifted.iter().enumerate() {
                    if x < 0.0 {
                        inverted.push(k);
                    }
                    let p = if x == 0.0 {
                        1.0
                    } else if beta.is_infinite() {
                        if x > 0.0 {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        (-beta * x).exp()
                    };
                    if !p.is_finite() {
                        return Err(WireError::InvalidRates(format!(
                            "pump factor of mode {} overflows (omega + E = {x}, beta = {beta})",
                            k + 1
                        )));
                    }
                    pumps.push(p);
                }
                (pumps, inverted)
            }
            (Omega::Infinite, Temperature::Beta(_)) => {
                return Err(WireError::InvalidRates("infinite omega requires beta' (rescaled inverse temperature)".into()))
            }
            (Omega::Finite(_), Temperature::BetaPrime(_)) => {
                return Err(WireError::InvalidRates("beta' is only defined for infinite omega; use beta".into()))
            }
        };
        let mut model = Self::new(gammas, pumps)?;
        model.inverted = inverted;
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn pumps(&self) -> &[f64] {
        &self.pumps
    }

    /// Modes with `ω + E_k < 0`, where absorption and emission swap roles.
    pub fn inverted_modes(&self) -> &[usize] {
        &self.inverted
    }

    pub fn is_zero(&self) -> bool {
        self.gammas.iter().all(|&g| g == 0.0)
    }

    /// Upper bound on the relaxation rates of the dissipator.
    pub fn total_rate(&self) -> f64 {
        self.gammas.iter().zip(&self.pumps).map(|(g, p)| g * (1.0 + p)).sum()
    }
}
